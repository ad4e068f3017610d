#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "cho/potentials.hpp"
#include "cho/state.hpp"

/// Faedo-Galerkin truncation onto the first n Neumann eigenfunctions:
///
///     y' + y + A z = g,    z = A y + G(y),
///
/// A = diag(lambda_1..lambda_n), g_j = (u, e_j), G_j(y) = (f'(sum_i y_i e_i), e_j).
/// Integrated with the implicit midpoint rule and an inner Newton solve.
/// Serves as an independent check of the spectral PDE solver.
namespace cho::galerkin {

using potentials::PotentialSpec;

struct GalerkinSystem {
    Grid grid;
    int n = 0;
    std::vector<double> lambda;             ///< nondecreasing, lambda[0] = 0
    std::vector<std::pair<int, int>> modes;  ///< (j,k) of each basis function
    Eigen::MatrixXd basis;                   ///< nodal values, grid.size() x n
};

/// First n modes ordered by nondecreasing eigenvalue, ties broken by (j,k)
/// lexicographically. Throws BadModeCount unless 1 <= n <= grid.size().
[[nodiscard]] GalerkinSystem make_system(const Grid& grid, int n);

/// H-projection of phi0 onto the span of the system's modes.
[[nodiscard]] Eigen::VectorXd project_initial(const GalerkinSystem& sys, const Field& phi0);

/// Equivalent overload creating the system on phi0's grid.
[[nodiscard]] Eigen::VectorXd project_initial(const Field& phi0, int n);

struct GalerkinTrajectory {
    TimeGrid time;
    std::vector<Eigen::VectorXd> y;  ///< state coefficients at t_0..t_nt
    std::vector<Eigen::VectorXd> z;  ///< chemical potential coefficients
};

struct IntegrateOptions {
    int substeps = 10;
    double newton_tol = 1e-12;
    int newton_max_iters = 50;
};

/// Integrates from y0 over `time`, with u piecewise constant in time
/// (u[n] on [t_n, t_{n+1})). Throws NewtonFailure if an inner solve stalls.
[[nodiscard]] GalerkinTrajectory integrate(const GalerkinSystem& sys, const Eigen::VectorXd& y0,
                                           const FieldSeries& u, const PotentialSpec& spec,
                                           const TimeGrid& time, const IntegrateOptions& options = {});

/// Nodal field of a coefficient vector.
[[nodiscard]] Field reconstruct(const GalerkinSystem& sys, const Eigen::VectorXd& coeffs);

/// (f'(phi), e_j) for phi = sum_i y_i e_i.
[[nodiscard]] Eigen::VectorXd nonlinearity(const GalerkinSystem& sys, const Eigen::VectorXd& y,
                                           const PotentialSpec& spec);

struct ComparisonReport {
    std::vector<double> err_phi;  ///< relative L2 error per output time
    std::vector<double> err_mu;
    double max_err_phi = 0.0;
    double max_err_mu = 0.0;
};

/// Per-time relative L2 distances between the Galerkin reconstruction and
/// the PDE trajectory. ShapeMismatch on differing grids or time grids.
[[nodiscard]] ComparisonReport compare_to_pde(const GalerkinSystem& sys, const GalerkinTrajectory& oracle,
                                              const state::StateTrajectory& pde);

}  // namespace cho::galerkin
