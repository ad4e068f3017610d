#include "cho/sensitivity.hpp"

#include <algorithm>
#include <cmath>

namespace cho::sensitivity {

namespace sp = cho::spectral;
using potentials::Regularization;
using potentials::Variant;

namespace {

Field apply_K(const Field& f, double tau, double S) {
    return sp::apply_multiplier(f, [&](double l) { return 1.0 / (1.0 + tau + tau * l * l + tau * l * S); });
}

Field apply_Lambda(const Field& f) {
    return sp::apply_multiplier(f, [](double l) { return l; });
}

/// nodal f''(phi) - S
Field shifted_curvature(const Field& phi, const PotentialSpec& spec) {
    Field d(phi.grid());
    for (std::size_t i = 0; i < phi.size(); ++i) d[i] = curvature(spec, phi[i]) - spec.stabilization;
    return d;
}

Field pointwise(const Field& a, const Field& b) {
    Field out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

}  // namespace

double curvature(const PotentialSpec& spec, double phi) {
    if (spec.variant == Variant::Logarithmic && spec.reg == Regularization::None) {
        phi = std::clamp(phi, -1.0 + 1e-12, 1.0 - 1e-12);
    }
    return potentials::f_d2(spec, phi);
}

TangentTrajectory solve_linearized(const state::StateTrajectory& base, const FieldSeries& h,
                                   const PotentialSpec& spec) {
    const TimeGrid& time = base.time;
    const Grid& grid = base.grid();
    check_series(h, grid, time, "direction");
    const double tau = time.tau();
    const double S = spec.stabilization;

    TangentTrajectory out{time, zero_series(grid, time), zero_series(grid, time)};
    for (int n = 0; n < time.steps(); ++n) {
        const Field dn = shifted_curvature(base.phi[n], spec);
        const Field d_xi = pointwise(dn, out.xi[n]);
        Field rhs = out.xi[n];
        rhs.axpy(tau, h[n]);
        rhs.axpy(-tau, apply_Lambda(d_xi));
        Field xi = apply_K(rhs, tau, S);
        Field eta = apply_Lambda(xi);
        eta.axpy(S, xi);
        eta += d_xi;
        if (!xi.is_finite() || !eta.is_finite()) throw NonFinite("non-finite tangent state", n + 1);
        out.xi[n + 1] = std::move(xi);
        out.eta[n + 1] = std::move(eta);
    }
    return out;
}

AdjointTrajectory solve_adjoint(const state::StateTrajectory& base, const CostSpec& cost,
                                const PotentialSpec& spec) {
    const TimeGrid& time = base.time;
    const Grid& grid = base.grid();
    cost.validate(grid, time);
    const int nt = time.steps();
    const double tau = time.tau();
    const double S = spec.stabilization;
    const auto& [a1, a2, a3, a4] = cost.alpha;

    auto tracking_phi = [&](int k) { return a1 * (base.phi[k] - cost.phi_Q[k]); };
    auto tracking_mu = [&](int k) { return a3 * (base.mu[k] - cost.mu_Q[k]); };

    // sigma_k: everything the discrete cost attaches to xi^k except the
    // terminal term.
    auto source = [&](int k) {
        Field s = time.weight(k) * tracking_phi(k);
        if (a3 != 0.0) {
            const Field c = tracking_mu(k);
            Field lc = apply_Lambda(c);
            lc.axpy(S, c);
            s.axpy(time.weight(k), lc);
            if (k < nt) {
                const Field dn = shifted_curvature(base.phi[k], spec);
                s.axpy(time.weight(k + 1), pointwise(dn, tracking_mu(k + 1)));
            }
        }
        return s;
    };

    AdjointTrajectory adj{time, zero_series(grid, time), zero_series(grid, time), zero_series(grid, time)};
    adj.p[nt] = a2 * (base.phi[nt] - cost.phi_Omega);
    Field big_p = adj.p[nt];
    big_p.axpy(tau, source(nt));
    for (int k = nt - 1; k >= 0; --k) {
        Field kp = apply_K(big_p, tau, S);
        const Field dn = shifted_curvature(base.phi[k], spec);
        Field pk = kp;
        pk.axpy(-tau, pointwise(dn, apply_Lambda(kp)));
        if (!pk.is_finite()) throw NonFinite("non-finite adjoint state", k);
        adj.control_sensitivity[k] = std::move(kp);
        adj.p[k] = pk;
        if (k >= 1) {
            big_p = std::move(pk);
            big_p.axpy(tau, source(k));
        }
    }
    for (int k = 0; k <= nt; ++k) {
        Field q = apply_Lambda(adj.p[k]);
        if (a3 != 0.0) q -= tracking_mu(k);
        adj.q[k] = std::move(q);
    }
    return adj;
}

FieldSeries reduced_gradient(const state::StateTrajectory& base, const AdjointTrajectory& adj, const FieldSeries& u,
                             const CostSpec& cost) {
    const TimeGrid& time = base.time;
    check_series(u, base.grid(), time, "control");
    check_series(adj.control_sensitivity, base.grid(), time, "adjoint");
    const double a4 = cost.alpha[3];
    FieldSeries g = zero_series(base.grid(), time);
    for (int n = 0; n <= time.steps(); ++n) {
        if (n < time.steps()) {
            g[n] = adj.control_sensitivity[n];
            g[n] *= 1.0 / time.weight(n);
        }
        if (a4 != 0.0) g[n].axpy(a4, u[n]);
    }
    return g;
}

IdentityResidual adjoint_identity_residual(const state::StateTrajectory& base, const TangentTrajectory& tangent,
                                           const AdjointTrajectory& adj, const FieldSeries& h,
                                           const CostSpec& cost) {
    const TimeGrid& time = base.time;
    const int nt = time.steps();
    const double tau = time.tau();
    const auto& [a1, a2, a3, a4] = cost.alpha;
    check_series(h, base.grid(), time, "direction");

    std::vector<double> terms;
    for (int n = 0; n <= nt; ++n) {
        const double w = time.weight(n) * tau;
        if (a1 != 0.0) terms.push_back(w * a1 * sp::inner(base.phi[n] - cost.phi_Q[n], tangent.xi[n]));
        if (a3 != 0.0) terms.push_back(w * a3 * sp::inner(base.mu[n] - cost.mu_Q[n], tangent.eta[n]));
    }
    if (a2 != 0.0) terms.push_back(a2 * sp::inner(base.phi[nt] - cost.phi_Omega, tangent.xi[nt]));
    for (int n = 0; n < nt; ++n) terms.push_back(-tau * sp::inner(adj.control_sensitivity[n], h[n]));

    IdentityResidual r;
    double sum = 0.0;
    for (double t : terms) {
        sum += t;
        r.scale += std::abs(t);
    }
    r.residual = std::abs(sum);
    return r;
}

}  // namespace cho::sensitivity
