#include "cho/cost.hpp"

#include <algorithm>

namespace cho::control {

CostSpec CostSpec::zero_targets(const Grid& grid, const TimeGrid& time, std::array<double, 4> alpha) {
    return CostSpec{alpha, zero_series(grid, time), Field(grid), zero_series(grid, time)};
}

void CostSpec::validate(const Grid& grid, const TimeGrid& time) const {
    for (double a : alpha) {
        if (!(a >= 0.0)) throw ValidationError("cost weights must be >= 0");
    }
    if (std::all_of(alpha.begin(), alpha.end(), [](double a) { return a == 0.0; })) {
        throw ValidationError("cost weights must not all be zero");
    }
    check_series(phi_Q, grid, time, "phi_Q");
    check_series(mu_Q, grid, time, "mu_Q");
    if (!(phi_Omega.grid() == grid)) throw ShapeMismatch("phi_Omega lives on a different grid");
}

double cost_J(const state::StateTrajectory& traj, const FieldSeries& u, const CostSpec& cost) {
    const TimeGrid& time = traj.time;
    const Grid& grid = traj.grid();
    check_series(u, grid, time, "control");
    check_series(cost.phi_Q, grid, time, "phi_Q");
    check_series(cost.mu_Q, grid, time, "mu_Q");
    if (!(cost.phi_Omega.grid() == grid)) throw ShapeMismatch("phi_Omega lives on a different grid");

    const auto& [a1, a2, a3, a4] = cost.alpha;
    double track_phi = 0.0;
    double track_mu = 0.0;
    double control = 0.0;
    for (int n = 0; n <= time.steps(); ++n) {
        const double w = time.weight(n) * time.tau();
        if (a1 != 0.0) {
            const Field d = traj.phi[n] - cost.phi_Q[n];
            track_phi += w * spectral::inner(d, d);
        }
        if (a3 != 0.0) {
            const Field d = traj.mu[n] - cost.mu_Q[n];
            track_mu += w * spectral::inner(d, d);
        }
        if (a4 != 0.0) control += w * spectral::inner(u[n], u[n]);
    }
    double final_term = 0.0;
    if (a2 != 0.0) {
        const Field d = traj.phi.back() - cost.phi_Omega;
        final_term = spectral::inner(d, d);
    }
    return 0.5 * (a1 * track_phi + a2 * final_term + a3 * track_mu + a4 * control);
}

}  // namespace cho::control
