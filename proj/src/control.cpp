#include "cho/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "cho/random.hpp"

namespace cho::control {

using potentials::Variant;

void OptimizerConfig::validate() const {
    if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ValidationError("armijo_c must lie in (0,1)");
    if (!(backtrack > 0.0 && backtrack < 1.0)) throw ValidationError("backtrack factor must lie in (0,1)");
    if (!(initial_step > 0.0)) throw ValidationError("initial_step must be > 0");
    if (!(tolerance > 0.0)) throw ValidationError("tolerance must be > 0");
    if (dykstra_iters < 1) throw ValidationError("dykstra_iters must be >= 1");
    if (max_backtracks < 1) throw ValidationError("max_backtracks must be >= 1");
}

namespace {

FieldSeries clamp_box(const FieldSeries& u, double M) {
    FieldSeries out = u;
    for (Field& f : out) {
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::clamp(f[i], -M, M);
    }
    return out;
}

double max_diff(const FieldSeries& a, const FieldSeries& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) {
        for (std::size_t i = 0; i < a[n].size(); ++i) m = std::max(m, std::abs(a[n][i] - b[n][i]));
    }
    return m;
}

/// Solves (W + c D^T D) u = W z for one node, W = diag(w_n), D the forward
/// difference; Thomas algorithm on the symmetric tridiagonal system.
void smooth_node(const std::vector<double>& w, const std::vector<double>& z, double c, std::vector<double>& u,
                 std::vector<double>& scratch) {
    const std::size_t m = w.size();
    scratch.assign(m, 0.0);
    std::vector<double>& cp = scratch;
    // diagonal w_n + c (deg_n), off-diagonal -c
    double denom = w[0] + c * (m > 1 ? 1.0 : 0.0);
    cp[0] = (m > 1 ? -c : 0.0) / denom;
    u[0] = w[0] * z[0] / denom;
    for (std::size_t n = 1; n < m; ++n) {
        const double deg = (n + 1 < m) ? 2.0 : 1.0;
        const double diag = w[n] + c * deg;
        denom = diag - (-c) * cp[n - 1];
        cp[n] = (n + 1 < m ? -c : 0.0) / denom;
        u[n] = (w[n] * z[n] - (-c) * u[n - 1]) / denom;
    }
    for (std::size_t n = m - 1; n-- > 0;) u[n] -= cp[n] * u[n + 1];
}

FieldSeries smooth_all(const FieldSeries& z, const TimeGrid& time, double c) {
    const std::size_t m = z.size();
    std::vector<double> w(m), zi(m), ui(m), scratch;
    for (std::size_t n = 0; n < m; ++n) w[n] = time.weight(static_cast<int>(n)) * time.tau();
    FieldSeries out = z;
    for (std::size_t i = 0; i < z.front().size(); ++i) {
        for (std::size_t n = 0; n < m; ++n) zi[n] = z[n][i];
        smooth_node(w, zi, c, ui, scratch);
        for (std::size_t n = 0; n < m; ++n) out[n][i] = ui[n];
    }
    return out;
}

FieldSeries weighted_time_mean(const FieldSeries& z, const TimeGrid& time) {
    Field mean(z.front().grid());
    double total = 0.0;
    for (int n = 0; n <= time.steps(); ++n) {
        mean.axpy(time.weight(n), z[n]);
        total += time.weight(n);
    }
    mean *= 1.0 / total;
    return FieldSeries(z.size(), mean);
}

}  // namespace

FieldSeries project_dt_ball(const FieldSeries& u_raw, const TimeGrid& time, double Mprime) {
    if (u_raw.empty()) throw ShapeMismatch("empty control");
    check_series(u_raw, u_raw.front().grid(), time, "control");
    if (!(Mprime >= 0.0)) throw InvalidArgument("M' must be >= 0");
    if (dt_norm(u_raw, time) <= Mprime) return u_raw;
    if (Mprime == 0.0) return weighted_time_mean(u_raw, time);

    // KKT: (W + (nu/tau) D^T D) u = W z with nu >= 0 chosen so that
    // ||D_t u|| = M'. ||D_t u(nu)|| decreases in nu.
    auto at = [&](double c) { return smooth_all(u_raw, time, c); };
    double lo = 0.0;
    double hi = 1.0;
    FieldSeries u_hi = at(hi);
    while (dt_norm(u_hi, time) > Mprime) {
        lo = hi;
        hi *= 4.0;
        u_hi = at(hi);
        if (hi > 1e300) return weighted_time_mean(u_raw, time);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = (lo == 0.0) ? 0.5 * hi : std::sqrt(lo * hi);
        if (hi - lo <= 1e-14 * hi) break;
        FieldSeries u_mid = at(mid);
        if (dt_norm(u_mid, time) > Mprime) {
            lo = mid;
        } else {
            hi = mid;
            u_hi = std::move(u_mid);
        }
    }
    return u_hi;
}

FieldSeries project_Uad(const FieldSeries& u_raw, const TimeGrid& time, double M, double Mprime,
                        const OptimizerConfig& config) {
    if (u_raw.empty()) throw ShapeMismatch("empty control");
    check_series(u_raw, u_raw.front().grid(), time, "control");
    if (!(M >= 0.0) || !(Mprime >= 0.0)) throw InvalidArgument("bounds M, M' must be >= 0");

    const FieldSeries zero = zero_series(u_raw.front().grid(), time);
    FieldSeries x = u_raw;
    FieldSeries p = zero;
    FieldSeries q = zero;
    FieldSeries y = u_raw;
    for (int it = 0; it < config.dykstra_iters; ++it) {
        y = project_dt_ball(axpy(x, 1.0, p), time, Mprime);
        p = axpy(axpy(x, 1.0, p), -1.0, y);
        FieldSeries x_new = clamp_box(axpy(y, 1.0, q), M);
        q = axpy(axpy(y, 1.0, q), -1.0, x_new);
        const double change = max_diff(x_new, x);
        x = std::move(x_new);
        if (change <= 1e-10 && max_diff(x, y) <= 1e-10) break;
    }
    // The clamp is 1-Lipschitz per node, so it cannot increase ||D_t u||.
    return clamp_box(project_dt_ball(x, time, Mprime), M);
}

double stationarity(const FieldSeries& u, const FieldSeries& g, const TimeGrid& time, double M, double Mprime,
                    const OptimizerConfig& config) {
    const FieldSeries pu = project_Uad(axpy(u, -1.0, g), time, M, Mprime, config);
    return norm_Q(axpy(u, -1.0, pu), time);
}

Evaluation evaluate(const FieldSeries& u, const ControlProblem& problem, const CostSpec& cost) {
    state::StateTrajectory traj = state::simulate(problem.phi0, u, problem.time, problem.spec);
    const double J = cost_J(traj, u, cost);
    sensitivity::AdjointTrajectory adj = sensitivity::solve_adjoint(traj, cost, problem.spec);
    FieldSeries g = sensitivity::reduced_gradient(traj, adj, u, cost);
    return Evaluation{std::move(traj), J, std::move(g), std::move(adj)};
}

namespace {

HistoryRow make_row(int iter, double J, double step, double stat, const FieldSeries& u, const ControlProblem& pr) {
    return HistoryRow{iter,
                      J,
                      step,
                      stat,
                      std::max(0.0, linf(u) - pr.M),
                      std::max(0.0, dt_norm(u, pr.time) - pr.Mprime)};
}

}  // namespace

OptimizeResult optimize(const FieldSeries& u0, const ControlProblem& problem, const CostSpec& cost,
                        const OptimizerConfig& config) {
    config.validate();
    cost.validate(problem.phi0.grid(), problem.time);
    if (cost.alpha[2] > 0.0 && problem.spec.variant == Variant::DoubleObstacle) {
        throw ConfigurationError("a3 > 0 requires a single-valued beta; the double-obstacle potential is excluded");
    }
    const TimeGrid& time = problem.time;

    FieldSeries u = project_Uad(u0, time, problem.M, problem.Mprime, config);
    if (!problem.simulate.override_compatibility) {
        const state::ControlFunction cf(time, u, problem.M, problem.Mprime);
        const state::CompatibilityReport rep =
            state::validate_compatibility(problem.phi0, cf, problem.spec, problem.simulate.compatibility_margin);
        if (!rep.ok) throw CompatibilityError(rep.message);
    }

    Evaluation ev = evaluate(u, problem, cost);
    OptimizeResult res;
    double stat = stationarity(u, ev.gradient, time, problem.M, problem.Mprime, config);
    res.history.push_back(make_row(0, ev.J, 0.0, stat, u, problem));

    FieldSeries u_prev;
    FieldSeries g_prev;
    for (int k = 1; k <= config.max_iters; ++k) {
        if (stat <= config.tolerance * (1.0 + norm_Q(ev.gradient, time))) {
            res.converged = true;
            break;
        }
        double s = config.initial_step;
        if (!u_prev.empty()) {
            const FieldSeries du = axpy(u, -1.0, u_prev);
            const FieldSeries dg = axpy(ev.gradient, -1.0, g_prev);
            const double sy = inner_Q(du, dg, time);
            if (sy > 0.0) s = std::clamp(inner_Q(du, du, time) / sy, 1e-10, 1e10);
        }

        bool accepted = false;
        FieldSeries u_new;
        std::optional<Evaluation> ev_new;
        for (int b = 0; b < config.max_backtracks; ++b, s *= config.backtrack) {
            u_new = project_Uad(axpy(u, -s, ev.gradient), time, problem.M, problem.Mprime, config);
            const double moved = norm_Q(axpy(u_new, -1.0, u), time);
            try {
                ev_new = evaluate(u_new, problem, cost);
            } catch (const NonFinite&) {
                continue;
            }
            if (ev_new->J <= ev.J - config.armijo_c / s * moved * moved) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            res.stalled = true;
            break;
        }
        u_prev = std::move(u);
        g_prev = std::move(ev.gradient);
        u = std::move(u_new);
        ev = std::move(*ev_new);
        stat = stationarity(u, ev.gradient, time, problem.M, problem.Mprime, config);
        res.history.push_back(make_row(k, ev.J, s, stat, u, problem));
    }
    if (!res.converged && !res.stalled && stat <= config.tolerance * (1.0 + norm_Q(ev.gradient, time))) {
        res.converged = true;
    }
    res.u_star = std::move(u);
    res.J = ev.J;
    return res;
}

std::string history_csv(const std::vector<HistoryRow>& history) {
    std::string out = "iter,J,step,stationarity,feasibility_linf,feasibility_h1\n";
    for (const HistoryRow& r : history) {
        out += fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.iter, r.J, r.step, r.stationarity,
                           r.feasibility_linf, r.feasibility_h1);
    }
    return out;
}

OptimalityReport optimality_residual(const FieldSeries& u_star, const sensitivity::AdjointTrajectory& adj,
                                     const CostSpec& cost, double M, double Mprime, int samples, std::uint64_t seed,
                                     const OptimizerConfig& config) {
    if (u_star.empty()) throw ShapeMismatch("empty control");
    const TimeGrid& time = adj.time;
    const Grid& grid = u_star.front().grid();
    check_series(u_star, grid, time, "control");
    check_series(adj.control_sensitivity, grid, time, "adjoint");
    const double a4 = cost.alpha[3];

    FieldSeries p = zero_series(grid, time);
    for (int n = 0; n < time.steps(); ++n) p[n] = (1.0 / time.weight(n)) * adj.control_sensitivity[n];
    const FieldSeries gradient = axpy(p, a4, u_star);
    const double magnitude = norm_Q(p, time) + a4 * norm_Q(u_star, time);

    OptimalityReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    rep.min_normalized = std::numeric_limits<double>::infinity();
    auto probe = [&](const FieldSeries& u) {
        const FieldSeries d = axpy(u, -1.0, u_star);
        const double s = magnitude * norm_Q(d, time);
        const double v = inner_Q(gradient, d, time);
        rep.min_value = std::min(rep.min_value, v);
        rep.scale = std::max(rep.scale, s);
        rep.min_normalized = std::min(rep.min_normalized, s > 0.0 ? v / s : 0.0);
        ++rep.probes;
    };

    probe(project_Uad(axpy(u_star, -1.0, gradient), time, M, Mprime, config));
    random::Engine rng(seed);
    const double radii[] = {1e-3, 1e-2, 1e-1, 1.0};
    for (int s = 0; s < samples; ++s) {
        const double r = radii[s % 4] * std::max(M, 1e-12);
        const FieldSeries pert = random::smooth_series(grid, time, rng, 3, 3, r);
        probe(project_Uad(axpy(u_star, 1.0, pert), time, M, Mprime, config));
    }
    return rep;
}

}  // namespace cho::control
