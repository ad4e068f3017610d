#pragma once

#include "cho/cost.hpp"
#include "cho/state.hpp"

/// Tangent and adjoint of the discrete forward scheme (discretize, then
/// optimize).
///
/// Writing K = (1 + tau + tau Lambda^2 + tau S Lambda)^{-1} with Lambda = -Laplace
/// and D_n = diag(f''(phi^n) - S), the linearized step is
///
///     xi^{n+1}  = K (xi^n + tau h^n - tau Lambda D_n xi^n),     xi^0 = 0,
///     eta^{n+1} = (Lambda + S) xi^{n+1} + D_n xi^n,             eta^0 = 0,
///
/// which tends to the continuous linearized system as tau -> 0. The adjoint
/// recursion is its exact transpose in the discrete L2 inner product, so the
/// reduced gradient agrees with the derivative of the discrete cost to
/// round-off.
namespace cho::sensitivity {

using control::CostSpec;
using potentials::PotentialSpec;

struct TangentTrajectory {
    TimeGrid time;
    FieldSeries xi;
    FieldSeries eta;
};

struct AdjointTrajectory {
    TimeGrid time;
    /// p^{nt} = a2 (phi(T) - phi_Omega) exactly; p^k = A_k^T (p^{k+1} + tau sigma_{k+1})
    /// for k < nt, sigma being the tracking sources attached to slice k+1.
    FieldSeries p;
    /// q^k = -Laplace p^k - a3 (mu^k - mu_Q^k)
    FieldSeries q;
    /// K (p^{k+1} + tau sigma_{k+1}): the derivative of J with respect to
    /// tau u^k through the dynamics, k < nt (zero at k = nt).
    FieldSeries control_sensitivity;
};

/// f''(phi) on the interval where the linearization is evaluated: values are
/// clamped to [-1 + 1e-12, 1 - 1e-12] for the unregularized logarithmic
/// potential and left untouched otherwise.
[[nodiscard]] double curvature(const PotentialSpec& spec, double phi);

[[nodiscard]] TangentTrajectory solve_linearized(const state::StateTrajectory& base, const FieldSeries& h,
                                                 const PotentialSpec& spec);

[[nodiscard]] AdjointTrajectory solve_adjoint(const state::StateTrajectory& base, const CostSpec& cost,
                                              const PotentialSpec& spec);

/// Riesz representative of dJ(u) in the discrete L2(Q) inner product:
/// g^n = control_sensitivity^n / w_n + a4 u^n.
[[nodiscard]] FieldSeries reduced_gradient(const state::StateTrajectory& base, const AdjointTrajectory& adj,
                                           const FieldSeries& u, const CostSpec& cost);

struct IdentityResidual {
    double residual = 0.0;  ///< |sum of tracking terms against (xi, eta) - <h, p-part>|
    double scale = 0.0;     ///< sum of the absolute values of the individual terms
    [[nodiscard]] double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

/// Discrete counterpart of
///   int_Q (a1 (phi - phi_Q) xi + a3 (mu - mu_Q) eta - h p) + a2 int_Omega (phi(T) - phi_Omega) xi(T) = 0.
[[nodiscard]] IdentityResidual adjoint_identity_residual(const state::StateTrajectory& base,
                                                         const TangentTrajectory& tangent,
                                                         const AdjointTrajectory& adj, const FieldSeries& h,
                                                         const CostSpec& cost);

}  // namespace cho::sensitivity
