#pragma once

#include <array>

#include "cho/state.hpp"

namespace cho::control {

/// Tracking-type cost
///
///   J = a1/2 int_Q |phi - phi_Q|^2 + a2/2 int_Omega |phi(T) - phi_Omega|^2
///     + a3/2 int_Q |mu - mu_Q|^2  + a4/2 int_Q |u|^2
///
/// discretized with the trapezoid rule in time and the midpoint rule in space.
struct CostSpec {
    std::array<double, 4> alpha{0.0, 0.0, 0.0, 0.0};
    FieldSeries phi_Q;
    Field phi_Omega;
    FieldSeries mu_Q;

    /// All targets zero.
    static CostSpec zero_targets(const Grid& grid, const TimeGrid& time, std::array<double, 4> alpha);

    /// Throws ValidationError (weights) or ShapeMismatch (targets).
    void validate(const Grid& grid, const TimeGrid& time) const;
};

[[nodiscard]] double cost_J(const state::StateTrajectory& traj, const FieldSeries& u, const CostSpec& cost);

}  // namespace cho::control
