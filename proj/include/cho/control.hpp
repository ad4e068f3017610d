#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cho/cost.hpp"
#include "cho/sensitivity.hpp"

/// Admissible set, projected-gradient optimizer and first-order optimality
/// check for
///
///     min J(u)  over  U_ad = { |u| <= M a.e., ||d_t u||_{L2(Q)} <= M' }.
namespace cho::control {

struct OptimizerConfig {
    int max_iters = 200;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
    /// stop when ||u - P(u - g)|| <= tolerance (1 + ||g||)
    double tolerance = 1e-6;
    int dykstra_iters = 50;
    int max_backtracks = 40;
    std::uint64_t seed = 0;

    /// Throws ValidationError.
    void validate() const;
};

/// Projection onto U_ad in the discrete L2(Q) inner product. Dykstra's
/// alternating scheme between the box |u| <= M and the ball
/// ||D_t u|| <= M', the ball step being exact (a tridiagonal solve per node
/// plus a scalar search on the multiplier). The result is clamped at the end,
/// so it is feasible to round-off whatever the iteration count.
[[nodiscard]] FieldSeries project_Uad(const FieldSeries& u_raw, const TimeGrid& time, double M, double Mprime,
                                      const OptimizerConfig& config = {});

/// Exact projection onto the ball ||D_t u|| <= M' alone. It keeps the
/// trapezoid-weighted time mean of every node.
[[nodiscard]] FieldSeries project_dt_ball(const FieldSeries& u_raw, const TimeGrid& time, double Mprime);

/// ||u - P(u - g)||_{L2(Q)}
[[nodiscard]] double stationarity(const FieldSeries& u, const FieldSeries& g, const TimeGrid& time, double M,
                                  double Mprime, const OptimizerConfig& config = {});

struct ControlProblem {
    Field phi0;
    potentials::PotentialSpec spec;
    TimeGrid time;
    double M = 1.0;
    double Mprime = 1.0;
    state::SimulateOptions simulate{};
};

struct Evaluation {
    state::StateTrajectory traj;
    double J = 0.0;
    FieldSeries gradient;
    sensitivity::AdjointTrajectory adjoint;
};

/// Forward run, cost, adjoint and reduced gradient at u (no projection and no
/// compatibility check).
[[nodiscard]] Evaluation evaluate(const FieldSeries& u, const ControlProblem& problem, const CostSpec& cost);

struct HistoryRow {
    int iter = 0;
    double J = 0.0;
    double step = 0.0;
    double stationarity = 0.0;
    double feasibility_linf = 0.0;  ///< max(0, ||u||_inf - M)
    double feasibility_h1 = 0.0;    ///< max(0, ||d_t u|| - M')
};

struct OptimizeResult {
    FieldSeries u_star;
    double J = 0.0;
    std::vector<HistoryRow> history;
    bool converged = false;
    /// Set when the line search ran out of backtracks; u_star is then the
    /// best iterate found.
    bool stalled = false;
};

/// Projected gradient with a Barzilai-Borwein trial step and Armijo
/// backtracking along the projection arc. Throws ConfigurationError for
/// a3 > 0 with the double-obstacle potential and CompatibilityError when the
/// initial state is incompatible with the bound M.
[[nodiscard]] OptimizeResult optimize(const FieldSeries& u0, const ControlProblem& problem, const CostSpec& cost,
                                      const OptimizerConfig& config = {});

/// Comma-separated history with header iter,J,step,stationarity,feasibility_linf,feasibility_h1.
[[nodiscard]] std::string history_csv(const std::vector<HistoryRow>& history);

struct OptimalityReport {
    /// min over probes of <g*, u - u*>_{L2(Q)}
    double min_value = 0.0;
    /// max over probes of (||p|| + a4 ||u*||) ||u - u*||
    double scale = 0.0;
    /// min over probes of <g*, u - u*> / ((||p|| + a4 ||u*||) ||u - u*||)
    double min_normalized = 0.0;
    int probes = 0;
};

/// Probes the variational inequality
///   <p, u - u*> + a4 <u*, u - u*> >= 0   for u in U_ad,
/// with p the adjoint part of the gradient, on `samples` random feasible
/// controls (projections of random perturbations of u* at several radii) plus
/// the projected-gradient point.
[[nodiscard]] OptimalityReport optimality_residual(const FieldSeries& u_star,
                                                   const sensitivity::AdjointTrajectory& adj,
                                                   const CostSpec& cost, double M, double Mprime, int samples,
                                                   std::uint64_t seed, const OptimizerConfig& config = {});

}  // namespace cho::control
