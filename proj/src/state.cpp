#include "cho/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cho::state {

namespace sp = cho::spectral;
using potentials::Variant;

ControlFunction::ControlFunction(TimeGrid t, FieldSeries s, double m, double mprime)
    : time(t), slices(std::move(s)), M(m), Mprime(mprime) {
    if (slices.empty()) throw ShapeMismatch("control has no slices");
    check_series(slices, slices.front().grid(), time, "control");
    if (!(M >= 0.0) || !(Mprime >= 0.0)) throw InvalidArgument("control bounds M, M' must be >= 0");
}

CompatibilityReport validate_compatibility(const Field& phi0, const ControlFunction& u, const PotentialSpec& spec,
                                           double required_margin) {
    CompatibilityReport rep;
    if (!(phi0.grid() == u.grid())) throw ShapeMismatch("initial state and control live on different grids");
    if (!spec.singular()) {
        rep.margin = std::numeric_limits<double>::infinity();
        rep.message = "D(beta) = R";
        return rep;
    }
    const auto [lo_it, hi_it] = std::minmax_element(phi0.values().begin(), phi0.values().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double m = sp::mean(phi0);
    const double bound = potentials::domain_bound(spec);
    const double margin_phi0 = std::min(bound - hi, lo + bound);
    const double margin_mean = std::min(bound - (m + u.M), (m - u.M) + bound);
    rep.margin = std::min(margin_phi0, margin_mean);
    rep.ok = rep.margin >= required_margin;
    if (!rep.ok) {
        if (margin_mean < margin_phi0) {
            rep.message = "compatibility violated: mean(phi0) +- M = [" + std::to_string(m - u.M) + ", " + std::to_string(m + u.M) +
                          "] is not inside the interior of D(beta)";
        } else {
            rep.message = "compatibility violated: range of phi0 [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] is not inside the interior of D(beta)";
        }
    } else {
        rep.message = "compatible";
    }
    return rep;
}

Field apply_f_d1(const Field& phi, const PotentialSpec& spec) {
    Field out(phi.grid());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = potentials::f_d1(spec, phi[i]);
    return out;
}

Field apply_beta(const Field& phi, const PotentialSpec& spec) {
    Field out(phi.grid());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = potentials::beta_reg(spec, phi[i]);
    return out;
}

Field apply_pi(const Field& phi, const PotentialSpec& spec) {
    Field out(phi.grid());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = potentials::pi(spec, phi[i]);
    return out;
}

StepResult step(const Field& phi_n, const Field& u_n, const PotentialSpec& spec, double tau) {
    if (!(tau > 0.0)) throw InvalidArgument("time step must be > 0");
    const Grid& grid = phi_n.grid();
    const double S = spec.stabilization;

    Field g = apply_f_d1(phi_n, spec);
    g.axpy(-S, phi_n);

    Field rhs = phi_n;
    rhs.axpy(tau, u_n);
    sp::SpectralField phi_hat = sp::to_spectral(rhs);
    const sp::SpectralField g_hat = sp::to_spectral(g);
    const auto& lam = grid.eigenvalues();
    sp::SpectralField lap_hat(grid);
    for (std::size_t i = 0; i < phi_hat.size(); ++i) {
        const double l = lam[i];
        phi_hat[i] = (phi_hat[i] - tau * l * g_hat[i]) / (1.0 + tau + tau * l * l + tau * l * S);
        lap_hat[i] = l * phi_hat[i];
    }
    StepResult out{sp::from_spectral(phi_hat), sp::from_spectral(lap_hat)};
    out.mu.axpy(S, out.phi);
    out.mu += g;
    if (!out.phi.is_finite() || !out.mu.is_finite()) {
        throw NonFinite("non-finite values after time step; reduce the step size", 1);
    }
    return out;
}

double energy(const Field& phi, const PotentialSpec& spec) {
    const double grad = sp::norm_grad(phi);
    double pot = 0.0;
    for (double v : phi.values()) pot += potentials::f_value(spec, v);
    return 0.5 * grad * grad + pot * phi.grid().cell_measure();
}

StepDiagnostics diagnose(double t, const Field& phi, const Field& mu, const PotentialSpec& spec) {
    StepDiagnostics d;
    d.t = t;
    d.mean = sp::mean(phi);
    d.energy = energy(phi, spec);
    const auto [lo, hi] = std::minmax_element(phi.values().begin(), phi.values().end());
    d.min_phi = *lo;
    d.max_phi = *hi;
    d.grad_mu = sp::norm_grad(mu);
    return d;
}

StateTrajectory simulate(const Field& phi0, const FieldSeries& u, const TimeGrid& time, const PotentialSpec& spec) {
    check_series(u, phi0.grid(), time, "control");
    StateTrajectory traj{time, {}, {}, {}};
    const int nt = time.steps();
    traj.phi.reserve(nt + 1);
    traj.mu.reserve(nt + 1);
    traj.diagnostics.reserve(nt + 1);

    Field mu0 = sp::laplacian(phi0);
    mu0 *= -1.0;
    mu0 += apply_f_d1(phi0, spec);
    traj.phi.push_back(phi0);
    traj.mu.push_back(std::move(mu0));
    traj.diagnostics.push_back(diagnose(0.0, traj.phi[0], traj.mu[0], spec));

    for (int n = 0; n < nt; ++n) {
        StepResult r = [&] {
            try {
                return step(traj.phi[n], u[n], spec, time.tau());
            } catch (const NonFinite& e) {
                throw NonFinite(e.what(), n + 1);
            }
        }();
        traj.phi.push_back(std::move(r.phi));
        traj.mu.push_back(std::move(r.mu));
        traj.diagnostics.push_back(diagnose(time.t(n + 1), traj.phi.back(), traj.mu.back(), spec));
    }
    return traj;
}

StateTrajectory simulate(const Field& phi0, const ControlFunction& u, const PotentialSpec& spec,
                         const SimulateOptions& options) {
    spec.validate();
    if (!options.override_compatibility) {
        const CompatibilityReport rep = validate_compatibility(phi0, u, spec, options.compatibility_margin);
        if (!rep.ok) throw CompatibilityError(rep.message);
    }
    return simulate(phi0, u.slices, u.time, spec);
}

double mean_closed_form(double phi0bar, std::span<const double> ubar, const TimeGrid& time, double t) {
    if (ubar.size() < static_cast<std::size_t>(time.steps())) {
        throw ShapeMismatch("mean_closed_form: need one mean control value per step");
    }
    const double tau = time.tau();
    const int full = std::clamp(static_cast<int>(std::floor(t / tau + 1e-9)), 0, time.steps());
    double m = phi0bar;
    const double decay = std::exp(-tau);
    for (int n = 0; n < full; ++n) m = decay * m + (1.0 - decay) * ubar[n];
    const double rest = t - full * tau;
    if (rest > 1e-14 * std::max(1.0, t)) {
        const double d = std::exp(-rest);
        m = d * m + (1.0 - d) * ubar[std::min(full, time.steps() - 1)];
    }
    return m;
}

std::vector<double> mean_implicit_euler(double phi0bar, std::span<const double> ubar, const TimeGrid& time) {
    std::vector<double> m(time.steps() + 1);
    m[0] = phi0bar;
    for (int n = 0; n < time.steps(); ++n) m[n + 1] = (m[n] + time.tau() * ubar[n]) / (1.0 + time.tau());
    return m;
}

std::vector<double> energy_balance_residual(const StateTrajectory& traj, const FieldSeries& u,
                                            const PotentialSpec& spec) {
    const TimeGrid& time = traj.time;
    check_series(u, traj.grid(), time, "control");
    std::vector<double> res(time.steps());
    double e_prev = energy(traj.phi[0], spec);
    for (int n = 0; n < time.steps(); ++n) {
        const double e_next = energy(traj.phi[n + 1], spec);
        const Field& mu = traj.mu[n + 1];
        const double gm = sp::norm_grad(mu);
        const Field src = u[n] - traj.phi[n + 1];
        res[n] = (e_next - e_prev) / time.tau() + gm * gm - sp::inner(mu, src);
        e_prev = e_next;
    }
    return res;
}

double default_stabilization(const PotentialSpec& spec, double lo, double hi) {
    return potentials::sup_abs_f_d2(spec, lo, hi);
}

}  // namespace cho::state
