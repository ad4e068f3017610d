#pragma once

#include <span>
#include <string>
#include <vector>

#include "cho/potentials.hpp"
#include "cho/spacetime.hpp"

/// Forward solver for
///
///     d_t phi + phi - Laplace mu = u,    mu = -Laplace phi + f'(phi)
///
/// with homogeneous Neumann conditions, using a stabilized linearly implicit
/// cosine-spectral scheme. Per mode (j,k) with eigenvalue lambda:
///
///     (1 + tau + tau lambda^2 + tau lambda S) phi^{n+1} = phi^n + tau u^n - tau lambda g^n,
///     g^n = f'(phi^n) - S phi^n                                        (nodal),
///     mu^{n+1} = -Laplace phi^{n+1} + S phi^{n+1} + g^n                (nodal).
///
/// mu^0 = -Laplace phi^0 + f'(phi^0).
namespace cho::state {

using potentials::PotentialSpec;

/// Control u on the space-time grid together with the admissible bounds.
struct ControlFunction {
    TimeGrid time;
    FieldSeries slices;
    double M = 0.0;       ///< bound on ||u||_inf
    double Mprime = 0.0;  ///< bound on ||d_t u||_{L2(Q)}

    ControlFunction(TimeGrid t, FieldSeries s, double m, double mprime);

    [[nodiscard]] const Grid& grid() const { return slices.front().grid(); }
    [[nodiscard]] double linf() const { return cho::linf(slices); }
    [[nodiscard]] double dt_norm() const { return cho::dt_norm(slices, time); }
    [[nodiscard]] bool admissible(double tol = 1e-12) const {
        return linf() <= M + tol && dt_norm() <= Mprime + tol;
    }
};

struct StepDiagnostics {
    double t = 0.0;
    double mean = 0.0;
    double energy = 0.0;
    double min_phi = 0.0;
    double max_phi = 0.0;
    double grad_mu = 0.0;  ///< ||grad mu||
};

struct StateTrajectory {
    TimeGrid time;
    FieldSeries phi;
    FieldSeries mu;
    std::vector<StepDiagnostics> diagnostics;

    [[nodiscard]] const Grid& grid() const { return phi.front().grid(); }
};

struct CompatibilityReport {
    bool ok = true;
    /// Distance of min/max phi0 and mean(phi0) +- M to the boundary of
    /// D(beta); +inf for the regular potential.
    double margin = 0.0;
    std::string message;
};

/// Checks that min/max phi0 and mean(phi0) +- M lie inside D(beta) with at
/// least `required_margin` to spare. Always passes for the regular potential.
[[nodiscard]] CompatibilityReport validate_compatibility(const Field& phi0, const ControlFunction& u,
                                                         const PotentialSpec& spec,
                                                         double required_margin = 1e-3);

struct StepResult {
    Field phi;
    Field mu;
};

/// One step of the scheme. Throws NonFinite (step index 1) on blow-up.
[[nodiscard]] StepResult step(const Field& phi_n, const Field& u_n, const PotentialSpec& spec, double tau);

struct SimulateOptions {
    bool override_compatibility = false;
    double compatibility_margin = 1e-3;
};

/// Runs the scheme over the time grid of `u`. Throws CompatibilityError when
/// validate_compatibility fails (unless overridden) and NonFinite with the
/// failing step index.
[[nodiscard]] StateTrajectory simulate(const Field& phi0, const ControlFunction& u, const PotentialSpec& spec,
                                       const SimulateOptions& options = {});

/// Same as simulate, with the control given as bare slices (no bound checks).
[[nodiscard]] StateTrajectory simulate(const Field& phi0, const FieldSeries& u, const TimeGrid& time,
                                       const PotentialSpec& spec);

/// Exact solution of  d/dt m + m = ubar,  m(0) = phi0bar,  for ubar piecewise
/// constant on the time grid (ubar[n] on [t_n, t_{n+1})), evaluated at t.
[[nodiscard]] double mean_closed_form(double phi0bar, std::span<const double> ubar, const TimeGrid& time, double t);

/// Implicit Euler iterates of the same ODE: m^{n+1} = (m^n + tau ubar^n)/(1 + tau).
[[nodiscard]] std::vector<double> mean_implicit_euler(double phi0bar, std::span<const double> ubar,
                                                      const TimeGrid& time);

/// E(phi) = 1/2 ||grad phi||^2 + int f(phi)
[[nodiscard]] double energy(const Field& phi, const PotentialSpec& spec);

/// r^n = (E^{n+1} - E^n)/tau + ||grad mu^{n+1}||^2 - int mu^{n+1} (u^n - phi^{n+1}),
/// n = 0..nt-1.
[[nodiscard]] std::vector<double> energy_balance_residual(const StateTrajectory& traj, const FieldSeries& u,
                                                          const PotentialSpec& spec);

/// sup |f''| over [lo, hi], the default stabilization constant.
[[nodiscard]] double default_stabilization(const PotentialSpec& spec, double lo, double hi);

/// Nodal f'(phi).
[[nodiscard]] Field apply_f_d1(const Field& phi, const PotentialSpec& spec);
/// Nodal beta_reg(phi).
[[nodiscard]] Field apply_beta(const Field& phi, const PotentialSpec& spec);
/// Nodal pi(phi).
[[nodiscard]] Field apply_pi(const Field& phi, const PotentialSpec& spec);

[[nodiscard]] StepDiagnostics diagnose(double t, const Field& phi, const Field& mu, const PotentialSpec& spec);

}  // namespace cho::state
