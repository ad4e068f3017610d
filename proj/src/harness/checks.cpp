#include "cho/harness/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "cho/random.hpp"

namespace cho::harness::checks {

namespace sp = cho::spectral;
namespace pt = cho::potentials;
using pt::PotentialSpec;
using pt::Regularization;
using pt::Variant;

namespace {

random::Engine engine(std::uint64_t seed, std::uint64_t salt) { return random::Engine(seed * 1000003ULL + salt); }

double uniform(random::Engine& rng, double a, double b) {
    return a + (b - a) * 0.5 * (random::symmetric_unit(rng) + 1.0);
}

Field white_noise(const Grid& grid, random::Engine& rng, bool zero_mean) {
    Field f(grid);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = random::symmetric_unit(rng);
    if (zero_mean) {
        const double m = sp::mean(f);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] -= m;
    }
    return f;
}

Measurement at_most(double value, double threshold, std::string detail = {}) {
    return {value, threshold, std::isfinite(value) && value <= threshold, std::move(detail)};
}

std::vector<double> slice_means(const FieldSeries& u) {
    std::vector<double> out;
    out.reserve(u.size());
    for (const Field& f : u) out.push_back(sp::mean(f));
    return out;
}

double max_abs_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// trapezoid-in-time L2(H) norm
double l2h(const FieldSeries& a, const TimeGrid& time) {
    double s = 0.0;
    for (int n = 0; n <= time.steps(); ++n) s += time.weight(n) * time.tau() * std::pow(sp::norm_H(a[n]), 2);
    return std::sqrt(s);
}

double c0h(const FieldSeries& a) {
    double m = 0.0;
    for (const Field& f : a) m = std::max(m, sp::norm_H(f));
    return m;
}

FieldSeries difference(const FieldSeries& a, const FieldSeries& b) { return axpy(a, -1.0, b); }

TimeGrid halved(const TimeGrid& t) { return TimeGrid(t.final_time(), 2 * t.steps()); }

double relative_change(double coarse, double fine) {
    return std::abs(fine - coarse) / std::max(std::abs(coarse), std::numeric_limits<double>::min());
}

std::vector<PotentialSpec> regularized_specs(double eps) {
    return {PotentialSpec::logarithmic(2.0, eps, Regularization::Yosida),
            PotentialSpec::logarithmic(2.0, eps, Regularization::PiecewiseLog),
            PotentialSpec::double_obstacle(1.0, eps)};
}

}  // namespace

// ---- spectral

Measurement parseval(const Grid& grid, std::uint64_t seed, int draws) {
    auto rng = engine(seed, 101);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const Field f = white_noise(grid, rng, false);
        const sp::SpectralField s = sp::to_spectral(f);
        double sum = 0.0;
        for (std::size_t k = 0; k < s.size(); ++k) sum += s[k] * s[k];
        const double nh = std::pow(sp::norm_H(f), 2);
        worst = std::max(worst, std::abs(nh - sum) / nh);
    }
    return at_most(worst, 1e-12, fmt::format("{} random fields", draws));
}

Measurement n_symmetry(const Grid& grid, std::uint64_t seed, int draws) {
    auto rng = engine(seed, 102);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const Field f = white_noise(grid, rng, true);
        const Field g = white_noise(grid, rng, true);
        const double a = sp::inner(f, sp::solve_N(g));
        const double b = sp::inner(g, sp::solve_N(f));
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
    return at_most(worst, 1e-12, fmt::format("{} zero-mean pairs", draws));
}

Measurement poincare(const Grid& grid, std::uint64_t seed, int draws) {
    double lmin = std::numeric_limits<double>::infinity();
    for (double l : grid.eigenvalues()) {
        if (l > 0.0) lmin = std::min(lmin, l);
    }
    auto rng = engine(seed, 103);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const Field f = i % 2 ? white_noise(grid, rng, true) : random::smooth_field(grid, rng, 4, 1.0, true);
        worst = std::max(worst, sp::norm_Vstar(f) * std::sqrt(lmin) / sp::norm_H(f));
    }
    return at_most(worst, 1.0 + 1e-12, fmt::format("sqrt(lambda_min) ||f||_V* / ||f||, lambda_min = {:.6g}", lmin));
}

Measurement laplacian_inverse(const Grid& grid, std::uint64_t seed, int draws) {
    auto rng = engine(seed, 104);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        const Field f = white_noise(grid, rng, true);
        const Field r = sp::laplacian(sp::solve_N(f)) + f;
        worst = std::max(worst, sp::norm_H(r) / sp::norm_H(f));
    }
    return at_most(worst, 1e-10, "||Laplace N f + f|| / ||f||");
}

// ---- potentials

Measurement monotonicity(double eps, std::uint64_t seed, int samples) {
    auto rng = engine(seed, 111);
    std::vector<PotentialSpec> specs = regularized_specs(eps);
    specs.push_back(PotentialSpec::regular());
    double worst = 0.0;
    for (const PotentialSpec& s : specs) {
        for (int i = 0; i < samples; ++i) {
            double a = uniform(rng, -2.0, 2.0);
            double b = uniform(rng, -2.0, 2.0);
            if (a > b) std::swap(a, b);
            const double ba = pt::beta_reg(s, a);
            const double bb = pt::beta_reg(s, b);
            worst = std::max(worst, (ba - bb) / (1.0 + std::abs(ba) + std::abs(bb)));
        }
    }
    return at_most(worst, 1e-12, fmt::format("{} pairs per variant", samples));
}

Measurement yosida_lipschitz(double eps, std::uint64_t seed, int samples) {
    auto rng = engine(seed, 112);
    double worst = 0.0;
    for (const PotentialSpec& s :
         {PotentialSpec::logarithmic(2.0, eps, Regularization::Yosida), PotentialSpec::double_obstacle(1.0, eps)}) {
        for (int i = 0; i < samples; ++i) {
            const double a = uniform(rng, -2.0, 2.0);
            // half the pairs close together, where the slope bound is tight
            const double b = i % 2 ? uniform(rng, -2.0, 2.0) : a + eps * random::symmetric_unit(rng);
            const double ba = pt::beta_reg(s, a);
            const double bb = pt::beta_reg(s, b);
            const double v = std::abs(ba - bb) - std::abs(a - b) / eps;
            worst = std::max(worst, v / (1.0 + std::abs(ba) + std::abs(bb)));
        }
    }
    return at_most(worst, 1e-12, "|b(r1) - b(r2)| - |r1 - r2| / eps");
}

Measurement sandwich(double eps, std::uint64_t seed, int samples) {
    auto rng = engine(seed, 113);
    double worst = 0.0;
    for (const PotentialSpec& s :
         {PotentialSpec::logarithmic(2.0, eps, Regularization::Yosida), PotentialSpec::double_obstacle(1.0, eps)}) {
        for (int i = 0; i < samples; ++i) {
            const double r = uniform(rng, -0.999, 0.999);
            const double b0 = pt::beta_exact(s, r);
            const double be = pt::beta_reg(s, r);
            const double h0 = pt::betahat_exact(s, r);
            const double he = pt::betahat(s, r);
            const double scale = 1.0 + std::abs(b0) + std::abs(h0);
            worst = std::max({worst, (std::abs(be) - std::abs(b0)) / scale, -he / scale, (he - h0) / scale});
        }
    }
    return at_most(worst, 1e-12, "|b_eps| <= |b0| and 0 <= bhat_eps <= bhat");
}

Measurement pi_lipschitz(double eps, std::uint64_t seed, int samples) {
    auto rng = engine(seed, 114);
    std::vector<PotentialSpec> specs = regularized_specs(eps);
    specs.push_back(PotentialSpec::regular());
    double worst = 0.0;
    for (const PotentialSpec& s : specs) {
        const double L = pt::pi_lipschitz(s);
        for (int i = 0; i < samples; ++i) {
            const double r = uniform(rng, -2.0, 2.0);
            worst = std::max(worst, std::abs(pt::f_d2(s, r) - pt::beta_reg_d1(s, r)) - L);
        }
    }
    return at_most(worst, 1e-12, "|f'' - beta_reg'| - Lip(pi)");
}

Measurement exp_derivative_bound(double eps, std::uint64_t seed, int samples) {
    auto rng = engine(seed, 115);
    const PotentialSpec s = PotentialSpec::logarithmic(2.0, eps, Regularization::PiecewiseLog);
    std::vector<double> rs(static_cast<std::size_t>(samples));
    for (double& r : rs) r = uniform(rng, -2.0, 2.0);
    const pt::ExpBoundReport rep = pt::check_exp_derivative_bound(s, rs);
    return at_most(rep.max_violation, 1e-12, fmt::format("worst r = {:.6g}", rep.worst_r));
}

Measurement young_inequality(std::uint64_t seed, int samples) {
    auto rng = engine(seed, 116);
    double worst = -std::numeric_limits<double>::infinity();
    for (double p : {1.0, 2.0, 3.0}) {
        const pt::YoungConstants c = pt::young_exp_constants(p);
        for (int i = 0; i < samples; ++i) {
            const double r = uniform(rng, 0.0, 6.0);
            const double s = uniform(rng, 0.0, 6.0);
            const double lhs = r * s * std::exp(p * s);
            const double rhs = 0.5 * s * s * std::exp(p * s) + std::exp(c.kappa * r) + c.kappa_prime;
            worst = std::max(worst, (lhs - rhs) / rhs);
        }
    }
    return at_most(std::max(worst, 0.0), 1e-12, "relative excess of r s e^{ps} over the bound, p = 1, 2, 3");
}

// ---- state

Measurement discrete_mean_law(const state::StateTrajectory& traj, const FieldSeries& u) {
    const std::vector<double> ubar = slice_means(u);
    const std::vector<double> ie = state::mean_implicit_euler(sp::mean(traj.phi[0]), ubar, traj.time);
    double worst = 0.0;
    for (int n = 0; n <= traj.time.steps(); ++n) worst = std::max(worst, std::abs(sp::mean(traj.phi[n]) - ie[n]));
    return at_most(worst, 1e-12, "max_n |mean phi^n - implicit Euler|");
}

Measurement mean_formula_consistency(const state::StateTrajectory& traj, const FieldSeries& u) {
    const TimeGrid& time = traj.time;
    const std::vector<double> ubar = slice_means(u);
    const double m0 = sp::mean(traj.phi[0]);
    const double ub = max_abs_of(std::vector<double>(ubar.begin(), ubar.end() - 1));
    double err = 0.0;
    double excess = 0.0;
    for (int n = 0; n <= time.steps(); ++n) {
        const double m = sp::mean(traj.phi[n]);
        err = std::max(err, std::abs(m - state::mean_closed_form(m0, ubar, time, time.t(n))));
        const double decay = std::pow(1.0 + time.tau(), -n);
        excess = std::max(excess, std::abs(m - m0 * decay) - ub * (1.0 - decay));
    }
    const double C = 1.0 + std::abs(m0) + 2.0 * ub;
    Measurement out = at_most(err / time.tau(), C,
                              fmt::format("max error / tau against C = {:.6g}; bound excess {:.3g}", C, excess));
    out.passed = out.passed && excess <= 1e-12;
    return out;
}

Measurement separation(const state::StateTrajectory& traj) {
    double worst = 0.0;
    for (const Field& f : traj.phi) worst = std::max(worst, sp::max_abs(f));
    return at_most(worst, 1.0 - 1e-3, "max_n ||phi^n||_inf");
}

Measurement xi_bound(const state::StateTrajectory& traj, const PotentialSpec& spec) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int n = 0; n <= traj.time.steps(); ++n) {
        const Field xi = state::apply_beta(traj.phi[n], spec);
        Field rhs = traj.phi[n] + traj.mu[n];
        rhs -= state::apply_pi(traj.phi[n], spec);
        worst = std::max(worst, sp::max_abs(xi) - sp::max_abs(rhs));
    }
    return at_most(worst, 1e-8, "max_n (||beta(phi)||_inf - ||phi + mu - pi(phi)||_inf)");
}

Measurement continuous_dependence(const Field& phi0, const TimeGrid& time, const PotentialSpec& spec, double M,
                                  double Mprime, std::uint64_t seed, int pairs) {
    auto max_ratio = [&](const TimeGrid& t) {
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            auto rng = engine(seed, 200 + static_cast<std::uint64_t>(i));
            const Grid& g = phi0.grid();
            const FieldSeries u1 = control::project_Uad(random::smooth_series(g, t, rng, 3, 3, M), t, M, Mprime);
            const FieldSeries u2 = control::project_Uad(random::smooth_series(g, t, rng, 3, 3, M), t, M, Mprime);
            const auto a = state::simulate(phi0, u1, t, spec);
            const auto b = state::simulate(phi0, u2, t, spec);
            const double num = c0h(difference(a.phi, b.phi)) + l2h(difference(a.mu, b.mu), t);
            worst = std::max(worst, num / l2h(difference(u1, u2), t));
        }
        return worst;
    };
    const double coarse = max_ratio(time);
    const double fine = max_ratio(halved(time));
    return at_most(relative_change(coarse, fine), 0.2,
                   fmt::format("max ratio {:.6g} at nt = {}, {:.6g} at nt = {}", coarse, time.steps(), fine,
                               2 * time.steps()));
}

// ---- galerkin

Measurement constant_mode_law(const Field& phi0, const FieldSeries& u, const TimeGrid& time, const PotentialSpec& spec,
                              double M, int modes, int substeps) {
    const galerkin::GalerkinSystem sys = galerkin::make_system(phi0.grid(), modes);
    const Eigen::VectorXd y0 = galerkin::project_initial(sys, phi0);
    galerkin::IntegrateOptions opt;
    opt.substeps = substeps;
    const galerkin::GalerkinTrajectory tr = galerkin::integrate(sys, y0, u, spec, time, opt);
    const double unit = 1.0 / std::sqrt(phi0.grid().area());
    const std::vector<double> ubar = slice_means(u);
    const double m0 = y0(0) * unit;
    double err = 0.0;
    double excess = 0.0;
    for (int n = 0; n <= time.steps(); ++n) {
        const double m = tr.y[n](0) * unit;
        const double t = time.t(n);
        err = std::max(err, std::abs(m - state::mean_closed_form(m0, ubar, time, t)));
        excess = std::max(excess, std::abs(m - m0 * std::exp(-t)) - M * (1.0 - std::exp(-t)));
    }
    const double h = time.tau() / substeps;
    const double tol = h * h * (1.0 + std::abs(m0) + 2.0 * max_abs_of(ubar)) + 1e-13;
    Measurement out = at_most(err, tol, fmt::format("bound excess {:.3g}", excess));
    out.passed = out.passed && excess <= 1e-12;
    return out;
}

Measurement refinement_convergence(std::uint64_t seed) {
    const Grid g(16, 16, 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
    const PotentialSpec spec = PotentialSpec::regular(3.32);
    const galerkin::GalerkinSystem band = galerkin::make_system(g, 8);
    auto rng = engine(seed, 301);
    Eigen::VectorXd c(8);
    for (int i = 0; i < 8; ++i) c(i) = 0.2 * random::symmetric_unit(rng);
    const Field phi0 = galerkin::reconstruct(band, c);

    auto error = [&](int n, int nt) {
        const TimeGrid t(0.1, nt);
        const FieldSeries u = zero_series(g, t);
        const galerkin::GalerkinSystem sys = galerkin::make_system(g, n);
        const auto oracle = galerkin::integrate(sys, galerkin::project_initial(sys, phi0), u, spec, t);
        const auto pde = state::simulate(phi0, u, t, spec);
        return galerkin::compare_to_pde(sys, oracle, pde).max_err_phi;
    };
    const std::vector<double> in_time = {error(8, 50), error(8, 100), error(8, 200)};
    const std::vector<double> in_modes = {error(4, 200), in_time[2], error(16, 200)};
    double worst = 0.0;
    for (const auto* seq : {&in_time, &in_modes}) {
        for (std::size_t i = 1; i < seq->size(); ++i) worst = std::max(worst, (*seq)[i] / (*seq)[i - 1]);
    }
    Measurement out{worst, 1.0, worst < 1.0,
                    fmt::format("nt 50/100/200: {:.3g} {:.3g} {:.3g}; n 4/8/16: {:.3g} {:.3g} {:.3g}", in_time[0],
                                in_time[1], in_time[2], in_modes[0], in_modes[1], in_modes[2])};
    return out;
}

// ---- sensitivity

Measurement adjoint_exactness(const Field& phi0, const FieldSeries& u, const TimeGrid& time, const PotentialSpec& spec,
                              std::uint64_t seed, int draws) {
    const Grid& g = phi0.grid();
    const auto base = state::simulate(phi0, u, time, spec);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
        auto rng = engine(seed, 400 + static_cast<std::uint64_t>(i));
        std::array<double, 4> alpha{};
        for (double& a : alpha) a = uniform(rng, 0.1, 1.0);
        if (spec.variant == Variant::DoubleObstacle) alpha[2] = 0.0;
        control::CostSpec cost = control::CostSpec::zero_targets(g, time, alpha);
        cost.phi_Q = random::smooth_series(g, time, rng, 3, 2, 0.5);
        cost.mu_Q = random::smooth_series(g, time, rng, 3, 2, 0.5);
        cost.phi_Omega = random::smooth_field(g, rng, 3, 0.5);
        const FieldSeries h = random::smooth_series(g, time, rng, 3, 3, 1.0);
        const auto tan = sensitivity::solve_linearized(base, h, spec);
        const auto adj = sensitivity::solve_adjoint(base, cost, spec);
        worst = std::max(worst, sensitivity::adjoint_identity_residual(base, tan, adj, h, cost).relative());
    }
    return at_most(worst, 1e-10, fmt::format("{} random (h, weights, targets)", draws));
}

Measurement tangent_linearity(const Field& phi0, const FieldSeries& u, const TimeGrid& time, const PotentialSpec& spec,
                              std::uint64_t seed) {
    const Grid& g = phi0.grid();
    const auto base = state::simulate(phi0, u, time, spec);
    auto rng = engine(seed, 410);
    const FieldSeries h1 = random::smooth_series(g, time, rng, 3, 2, 1.0);
    const FieldSeries h2 = random::smooth_series(g, time, rng, 3, 2, 1.0);
    const double a = uniform(rng, -2.0, 2.0);
    const double b = uniform(rng, -2.0, 2.0);
    FieldSeries mix = h1;
    for (std::size_t n = 0; n < mix.size(); ++n) {
        mix[n] *= a;
        mix[n].axpy(b, h2[n]);
    }
    const auto t1 = sensitivity::solve_linearized(base, h1, spec);
    const auto t2 = sensitivity::solve_linearized(base, h2, spec);
    const auto tm = sensitivity::solve_linearized(base, mix, spec);
    double worst = 0.0;
    for (int n = 0; n <= time.steps(); ++n) {
        Field dx = tm.xi[n] - a * t1.xi[n];
        dx.axpy(-b, t2.xi[n]);
        Field de = tm.eta[n] - a * t1.eta[n];
        de.axpy(-b, t2.eta[n]);
        worst = std::max({worst, sp::max_abs(dx) / (1.0 + sp::max_abs(tm.xi[n])),
                          sp::max_abs(de) / (1.0 + sp::max_abs(tm.eta[n]))});
    }
    return at_most(worst, 1e-12, fmt::format("xi(a h1 + b h2) against a xi(h1) + b xi(h2), a = {:.3f}, b = {:.3f}", a, b));
}

std::array<double, 2> taylor_orders(const Field& phi0, const FieldSeries& u, const TimeGrid& time,
                                   const PotentialSpec& spec, std::uint64_t seed) {
    const auto base = state::simulate(phi0, u, time, spec);
    auto rng = engine(seed, 420);
    const FieldSeries h = random::smooth_series(phi0.grid(), time, rng, 3, 2, 1.0);
    const auto tan = sensitivity::solve_linearized(base, h, spec);
    std::vector<double> rem;
    for (double lam : {1e-1, 5e-2, 2.5e-2}) {
        const auto tr = state::simulate(phi0, axpy(u, lam, h), time, spec);
        double m = 0.0;
        for (int n = 0; n <= time.steps(); ++n) {
            Field d = tr.phi[n] - base.phi[n];
            d.axpy(-lam, tan.xi[n]);
            m = std::max(m, sp::norm_H(d));
        }
        rem.push_back(m);
    }
    return {std::log2(rem[0] / rem[1]), std::log2(rem[1] / rem[2])};
}

Measurement frechet_order(const Field& phi0, const FieldSeries& u, const TimeGrid& time, const PotentialSpec& spec,
                          std::uint64_t seed) {
    const auto [o1, o2] = taylor_orders(phi0, u, time, spec, seed);
    const double lo = std::min(o1, o2);
    return {lo, 1.8, std::isfinite(lo) && lo >= 1.8, fmt::format("orders {:.4f} {:.4f}", o1, o2)};
}

Measurement tangent_continuity(const Field& phi0, const ControlFactory& u, const TimeGrid& time,
                               const PotentialSpec& spec, std::uint64_t seed, int draws) {
    auto max_ratio = [&](const TimeGrid& t) {
        const auto base = state::simulate(phi0, u(t), t, spec);
        double worst = 0.0;
        for (int i = 0; i < draws; ++i) {
            auto rng = engine(seed, 430 + static_cast<std::uint64_t>(i));
            const FieldSeries h = random::smooth_series(phi0.grid(), t, rng, 3, 3, 1.0);
            const auto tan = sensitivity::solve_linearized(base, h, spec);
            worst = std::max(worst, (c0h(tan.xi) + l2h(tan.eta, t)) / l2h(h, t));
        }
        return worst;
    };
    const double coarse = max_ratio(time);
    const double fine = max_ratio(halved(time));
    return at_most(relative_change(coarse, fine), 0.2,
                   fmt::format("max ratio {:.6g} at nt = {}, {:.6g} at nt = {}", coarse, time.steps(), fine,
                               2 * time.steps()));
}

// ---- control

Measurement cost_nonnegative(const control::ControlProblem& problem, const control::CostSpec& cost,
                             std::uint64_t seed, int draws) {
    const Grid& g = problem.phi0.grid();
    const TimeGrid& t = problem.time;
    double minJ = std::numeric_limits<double>::infinity();
    for (int i = 0; i < draws; ++i) {
        auto rng = engine(seed, 500 + static_cast<std::uint64_t>(i));
        const FieldSeries u = random::smooth_series(g, t, rng, 3, 3, std::max(problem.M, 1e-3));
        minJ = std::min(minJ, control::cost_J(state::simulate(problem.phi0, u, t, problem.spec), u, cost));
    }
    const FieldSeries zero = zero_series(g, t);
    const auto tr = state::simulate(problem.phi0, zero, t, problem.spec);
    control::CostSpec matched = cost;
    matched.phi_Q = tr.phi;
    matched.mu_Q = tr.mu;
    matched.phi_Omega = tr.phi.back();
    const double J0 = control::cost_J(tr, zero, matched);
    control::CostSpec shifted = matched;
    for (Field& f : shifted.phi_Q) f += Field(g, 0.1);
    for (Field& f : shifted.mu_Q) f += Field(g, 0.1);
    shifted.phi_Omega += Field(g, 0.1);
    const FieldSeries small = constant_series(g, t, 0.1);
    const double J1 = control::cost_J(state::simulate(problem.phi0, small, t, problem.spec), small, shifted);
    const bool ok = minJ >= 0.0 && J0 == 0.0 && J1 > 0.0;
    return {minJ, 0.0, ok,
            fmt::format("min J over {} controls; J = {:.3g} on matched targets, {:.3g} off them", draws, J0, J1)};
}

Measurement projection_idempotent_nonexpansive(const Grid& grid, const TimeGrid& time, double M, double Mprime,
                                               const control::OptimizerConfig& config, std::uint64_t seed,
                                               int draws) {
    const Grid small(std::min(grid.nx(), 8), std::min(grid.ny(), 8), grid.lx(), grid.ly());
    const double amp = 3.0 * std::max(M, 1e-3);
    double idem = 0.0;
    double expand = 0.0;
    for (int i = 0; i < draws; ++i) {
        auto rng = engine(seed, 600 + static_cast<std::uint64_t>(i));
        const FieldSeries z1 = random::smooth_series(small, time, rng, 3, 8, amp);
        const FieldSeries z2 = random::smooth_series(small, time, rng, 3, 8, amp);
        const FieldSeries p1 = control::project_Uad(z1, time, M, Mprime, config);
        const FieldSeries p2 = control::project_Uad(z2, time, M, Mprime, config);
        const FieldSeries pp = control::project_Uad(p1, time, M, Mprime, config);
        idem = std::max(idem, norm_Q(difference(pp, p1), time) / (1.0 + norm_Q(p1, time)));
        expand = std::max(expand, norm_Q(difference(p1, p2), time) / norm_Q(difference(z1, z2), time) - 1.0);
    }
    return at_most(std::max(idem, expand), 1e-10,
                   fmt::format("idempotence {:.3g}, expansion {:.3g}", idem, expand));
}

Measurement monotone_descent(const control::OptimizeResult& result) {
    double worst = 0.0;
    for (std::size_t i = 1; i < result.history.size(); ++i) {
        worst = std::max(worst, result.history[i].J - result.history[i - 1].J);
    }
    return at_most(worst, 0.0, fmt::format("largest increase of J over {} iterations", result.history.size()));
}

Measurement existence_sanity(const control::OptimizeResult& result, double J0, const TimeGrid& time, double M,
                             double Mprime) {
    const double linf = cho::linf(result.u_star);
    const double dt = dt_norm(result.u_star, time);
    const bool feasible = linf <= M + 1e-12 && dt <= Mprime * (1.0 + 1e-9) + 1e-12;
    Measurement out = at_most(result.J - J0, 0.0,
                              fmt::format("J* - J(u0); ||u*||_inf = {:.6g}, ||d_t u*|| = {:.6g}", linf, dt));
    out.passed = out.passed && feasible;
    return out;
}

Measurement variational_inequality(const control::OptimizeResult& result, const control::ControlProblem& problem,
                                   const control::CostSpec& cost, int probes, const control::OptimizerConfig& config) {
    const control::Evaluation ev = control::evaluate(result.u_star, problem, cost);
    const control::OptimalityReport rep = control::optimality_residual(result.u_star, ev.adjoint, cost, problem.M,
                                                                       problem.Mprime, probes, config.seed, config);
    Measurement out{rep.min_normalized, -1e-6, rep.min_normalized >= -1e-6,
                    fmt::format("{} probes, min value {:.3g}, scale {:.3g}", rep.probes, rep.min_value, rep.scale)};
    return out;
}

Measurement stationarity_reached(const control::OptimizeResult& result, double tolerance) {
    const double s = result.history.empty() ? std::numeric_limits<double>::infinity()
                                             : result.history.back().stationarity;
    return at_most(s, tolerance, fmt::format("{} iterations", result.history.size() - 1));
}

// ---- scenario

Measurement gradient_fd(const control::ControlProblem& problem, const control::CostSpec& cost, const FieldSeries& u,
                        std::uint64_t seed, int directions, const control::OptimizerConfig& config) {
    const Grid& g = problem.phi0.grid();
    const TimeGrid& t = problem.time;
    const control::Evaluation ev = control::evaluate(u, problem, cost);
    auto J = [&](const FieldSeries& v) {
        return control::cost_J(state::simulate(problem.phi0, v, t, problem.spec), v, cost);
    };
    double worst = 0.0;
    std::string steps;
    for (int i = 0; i < directions; ++i) {
        auto rng = engine(seed, 700 + static_cast<std::uint64_t>(i));
        const FieldSeries raw = random::smooth_series(g, t, rng, 3, 3, std::max(problem.M, 1e-3));
        FieldSeries h = difference(control::project_Uad(axpy(u, 1.0, raw), t, problem.M, problem.Mprime, config), u);
        if (norm_Q(h, t) < 1e-12) h = raw;
        const double hmax = cho::linf(h);
        for (Field& f : h) f *= 1.0 / hmax;
        const double ad = inner_Q(ev.gradient, h, t);
        double best = std::numeric_limits<double>::infinity();
        double best_step = 0.0;
        for (double e : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
            const double fd = (J(axpy(u, e, h)) - J(axpy(u, -e, h))) / (2.0 * e);
            const double scale = std::max(std::abs(ad), std::abs(fd));
            const double err = scale <= 1e-14 * (1.0 + ev.J) ? 0.0 : std::abs(fd - ad) / scale;
            if (err < best) {
                best = err;
                best_step = e;
            }
        }
        worst = std::max(worst, best);
        steps += fmt::format("{}{:.0e}", i ? " " : "", best_step);
    }
    return at_most(worst, 1e-6, fmt::format("{} directions, best steps {}", directions, steps));
}

SeparationScenario separation_scenario(const Grid& grid, double final_time, int steps, std::uint64_t seed) {
    const TimeGrid time(final_time, steps);
    auto rng = engine(seed, 800);
    PotentialSpec spec = PotentialSpec::logarithmic(2.0, 1e-4, Regularization::PiecewiseLog);
    spec.stabilization = pt::sup_abs_f_d2(spec, -0.6, 0.6);
    Field phi0 = random::smooth_field(grid, rng, 3, 0.6);
    FieldSeries u = random::smooth_series(grid, time, rng, 3, 2, 0.2);
    return {std::move(phi0), std::move(u), time, spec, 0.2};
}

}  // namespace cho::harness::checks
