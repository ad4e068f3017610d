#include "cho/harness/invariants.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "cho/harness/run.hpp"

namespace cho::harness {

using checks::Measurement;
using potentials::PotentialSpec;
using potentials::Variant;

VerifyContext::VerifyContext(RunConfig config)
    : config_(std::move(config)),
      grid_(config_.grid()),
      time_(config_.time()),
      spec_(effective_potential(config_)),
      phi0_(initial_state(config_)),
      u0_(initial_control(config_)) {}

const control::CostSpec& VerifyContext::cost() {
    if (!cost_) cost_ = cost_spec(config_);
    return *cost_;
}

const state::StateTrajectory& VerifyContext::base() {
    if (!base_) base_ = simulate_config(config_);
    return *base_;
}

const control::ControlProblem& VerifyContext::problem() {
    if (!problem_) problem_ = control_problem(config_);
    return *problem_;
}

const control::OptimizeResult& VerifyContext::optimum() {
    if (!optimum_) optimum_ = control::optimize(u0_, problem(), cost(), config_.optimizer);
    return *optimum_;
}

namespace {

/// The separation and xi-bound properties concern the logarithmic potential;
/// other configurations are checked on the built-in logarithmic scenario.
Measurement on_logarithmic(VerifyContext& c, bool xi) {
    if (c.spec().variant == Variant::Logarithmic) {
        return xi ? checks::xi_bound(c.base(), c.spec()) : checks::separation(c.base());
    }
    const auto sc = checks::separation_scenario(c.grid(), 0.5, 100, c.config().seed);
    const auto tr = state::simulate(sc.phi0, sc.u, sc.time, sc.spec);
    Measurement m = xi ? checks::xi_bound(tr, sc.spec) : checks::separation(tr);
    m.detail += " (built-in logarithmic scenario)";
    return m;
}

PotentialSpec regular_spec(const VerifyContext& c) {
    return c.spec().variant == Variant::Regular ? c.spec()
                                                : PotentialSpec::regular(potentials::sup_abs_f_d2(
                                                      PotentialSpec::regular(), -1.2, 1.2));
}

std::vector<Check> build_registry() {
    const auto seed = [](const VerifyContext& c) { return c.config().seed; };
    const auto eps = [](const VerifyContext& c) { return c.config().potential.eps; };
    return {
        {"spectral.parseval", "||f||^2 equals the sum of squared coefficients",
         [=](VerifyContext& c) { return checks::parseval(c.grid(), seed(c)); }},
        {"spectral.n_symmetry", "<f, N g> = <g, N f> on zero-mean fields",
         [=](VerifyContext& c) { return checks::n_symmetry(c.grid(), seed(c)); }},
        {"spectral.poincare", "||f||_V* <= ||f|| / sqrt(lambda_min) on zero-mean fields",
         [=](VerifyContext& c) { return checks::poincare(c.grid(), seed(c)); }},
        {"spectral.laplacian_inverse", "Laplace N = -identity on zero-mean fields",
         [=](VerifyContext& c) { return checks::laplacian_inverse(c.grid(), seed(c)); }},

        {"potentials.monotonicity", "regularized beta is nondecreasing",
         [=](VerifyContext& c) { return checks::monotonicity(eps(c), seed(c)); }},
        {"potentials.yosida_lipschitz", "Yosida beta is 1/eps-Lipschitz",
         [=](VerifyContext& c) { return checks::yosida_lipschitz(eps(c), seed(c)); }},
        {"potentials.sandwich", "|beta_eps| <= |beta0| and 0 <= betahat_eps <= betahat",
         [=](VerifyContext& c) { return checks::sandwich(eps(c), seed(c)); }},
        {"potentials.pi_lipschitz", "|f'' - beta_reg'| <= Lip(pi)",
         [=](VerifyContext& c) { return checks::pi_lipschitz(eps(c), seed(c)); }},
        {"potentials.exp_derivative_bound", "beta_eps' <= 2 exp(|beta_eps|) for the piecewise log",
         [=](VerifyContext& c) { return checks::exp_derivative_bound(eps(c), seed(c)); }},
        {"potentials.young_inequality", "r s e^{ps} <= s^2 e^{ps}/2 + e^{kappa r} + kappa'",
         [=](VerifyContext& c) { return checks::young_inequality(seed(c)); }},

        {"state.discrete_mean_law", "mean of phi follows implicit Euler for m' + m = ubar",
         [](VerifyContext& c) { return checks::discrete_mean_law(c.base(), c.u0()); }},
        {"state.mean_formula_consistency", "mean of phi is first-order close to the exact mean ODE",
         [](VerifyContext& c) { return checks::mean_formula_consistency(c.base(), c.u0()); }},
        {"state.separation", "max |phi| <= 1 - 1e-3 for the logarithmic potential",
         [](VerifyContext& c) { return on_logarithmic(c, false); }},
        {"state.xi_bound", "||beta(phi)||_inf <= ||phi + mu - pi(phi)||_inf on every snapshot",
         [](VerifyContext& c) { return on_logarithmic(c, true); }},
        {"state.continuous_dependence", "stability ratio over random control pairs is stable under tau/2",
         [=](VerifyContext& c) {
             return checks::continuous_dependence(c.phi0(), c.time(), regular_spec(c), c.config().M,
                                                  c.config().Mprime, seed(c));
         }},

        {"galerkin.constant_mode_law", "constant Galerkin mode follows m' + m = ubar within the bound",
         [](VerifyContext& c) {
             return checks::constant_mode_law(c.phi0(), c.u0(), c.time(), c.spec(), c.config().M,
                                              c.config().oracle_modes, c.config().oracle_substeps);
         }},
        {"galerkin.refinement_convergence", "oracle-PDE distance decreases as n grows and tau shrinks",
         [=](VerifyContext& c) { return checks::refinement_convergence(seed(c)); }},

        {"sensitivity.adjoint_exactness", "discrete adjoint identity to 1e-10 relative",
         [=](VerifyContext& c) { return checks::adjoint_exactness(c.phi0(), c.u0(), c.time(), c.spec(), seed(c)); }},
        {"sensitivity.tangent_linearity", "h -> (xi, eta) is linear",
         [=](VerifyContext& c) { return checks::tangent_linearity(c.phi0(), c.u0(), c.time(), c.spec(), seed(c)); }},
        {"sensitivity.frechet_order", "Taylor remainder is at least second order",
         [=](VerifyContext& c) { return checks::frechet_order(c.phi0(), c.u0(), c.time(), c.spec(), seed(c)); }},
        {"sensitivity.tangent_continuity", "||(xi, eta)|| / ||h|| bounded, stable under tau/2",
         [=](VerifyContext& c) {
             const RunConfig cfg = c.config();
             const checks::ControlFactory u = [cfg](const TimeGrid& t) {
                 return control::project_Uad(make_series(cfg.control, cfg.grid(), t, cfg.seed, 2, cfg.base_dir), t,
                                             cfg.M, cfg.Mprime, cfg.optimizer);
             };
             return checks::tangent_continuity(c.phi0(), u, c.time(), c.spec(), seed(c));
         }},

        {"control.cost_nonnegative", "J >= 0, J = 0 on matched targets",
         [=](VerifyContext& c) { return checks::cost_nonnegative(c.problem(), c.cost(), seed(c)); }},
        {"control.projection_idempotent_nonexpansive", "P o P = P and P is 1-Lipschitz",
         [=](VerifyContext& c) {
             return checks::projection_idempotent_nonexpansive(c.grid(), c.time(), c.config().M, c.config().Mprime,
                                                               c.config().optimizer, seed(c));
         }},
        {"control.monotone_descent", "accepted steps never increase J",
         [](VerifyContext& c) { return checks::monotone_descent(c.optimum()); }},
        {"control.existence_sanity", "optimizer returns a feasible u with J(u) <= J(u0)",
         [](VerifyContext& c) {
             const auto& r = c.optimum();
             return checks::existence_sanity(r, r.history.front().J, c.time(), c.config().M, c.config().Mprime);
         }},
        {"control.variational_inequality", "<p + a4 u*, u - u*> >= 0 on random feasible probes",
         [](VerifyContext& c) {
             return checks::variational_inequality(c.optimum(), c.problem(), c.cost(), c.config().vi_probes,
                                                   c.config().optimizer);
         }},

        {"scenario.gradient_fd", "adjoint gradient matches central differences",
         [=](VerifyContext& c) {
             return checks::gradient_fd(c.problem(), c.cost(), c.u0(), seed(c), c.config().fd_directions,
                                        c.config().optimizer);
         }},
        {"scenario.determinism", "two forward runs give the same diagnostics CSV",
         [](VerifyContext& c) {
             const bool same = diagnostics_csv(simulate_config(c.config())) == diagnostics_csv(c.base());
             return Measurement{same ? 0.0 : 1.0, 0.0, same, "byte comparison of diagnostics.csv"};
         }},
    };
}

}  // namespace

const std::vector<Check>& registry() {
    static const std::vector<Check> r = build_registry();
    return r;
}

std::vector<std::string> select_checks(const std::vector<std::string>& selectors) {
    std::vector<bool> chosen(registry().size(), false);
    for (const std::string& s : selectors) {
        bool hit = false;
        for (std::size_t i = 0; i < registry().size(); ++i) {
            const std::string& name = registry()[i].name;
            if (s == "all" || s == name || name.rfind(s + ".", 0) == 0) {
                chosen[i] = true;
                hit = true;
            }
        }
        if (!hit) throw ValidationError("verify.checks: no invariant matches '" + s + "'");
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < chosen.size(); ++i) {
        if (chosen[i]) out.push_back(registry()[i].name);
    }
    return out;
}

std::vector<CheckResult> run_checks(const RunConfig& config, const std::vector<std::string>& names,
                                    const std::function<void(const CheckResult&)>& on_result) {
    VerifyContext ctx(config);
    std::vector<CheckResult> out;
    for (const std::string& name : names) {
        const auto it = std::find_if(registry().begin(), registry().end(),
                                     [&](const Check& c) { return c.name == name; });
        if (it == registry().end()) throw ValidationError("unknown invariant '" + name + "'");
        CheckResult r;
        r.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            r.measurement = it->run(ctx);
        } catch (const Error& e) {
            r.error = e.kind() + ": " + e.what();
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        if (!r.error.empty()) {
            r.measurement = Measurement{std::numeric_limits<double>::quiet_NaN(), 0.0, false, r.error};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string verify_csv(const std::vector<CheckResult>& results) {
    std::string out = "name,status,value,threshold,detail\n";
    for (const CheckResult& r : results) {
        std::string detail = r.measurement.detail;
        for (char& ch : detail) {
            if (ch == '"') ch = '\'';
        }
        out += fmt::format("{},{},{:.17g},{:.17g},\"{}\"\n", r.name, r.measurement.passed ? "pass" : "fail",
                           r.measurement.value, r.measurement.threshold, detail);
    }
    return out;
}

}  // namespace cho::harness
