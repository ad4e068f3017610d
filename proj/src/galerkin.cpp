#include "cho/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace cho::galerkin {

namespace sp = cho::spectral;

GalerkinSystem make_system(const Grid& grid, int n) {
    const int total = static_cast<int>(grid.size());
    if (n < 1 || n > total) {
        throw BadModeCount("mode count " + std::to_string(n) + " outside [1, " + std::to_string(total) + "]");
    }
    std::vector<std::tuple<double, int, int>> all;
    all.reserve(total);
    for (int k = 0; k < grid.ny(); ++k) {
        for (int j = 0; j < grid.nx(); ++j) all.emplace_back(grid.eigenvalue(j, k), j, k);
    }
    std::sort(all.begin(), all.end());

    GalerkinSystem sys{grid, n, {}, {}, Eigen::MatrixXd(grid.size(), n)};
    for (int i = 0; i < n; ++i) {
        const auto [lam, j, k] = all[i];
        sys.lambda.push_back(lam);
        sys.modes.emplace_back(j, k);
        const Field e = sp::eigenfunction(grid, j, k);
        for (std::size_t p = 0; p < grid.size(); ++p) sys.basis(static_cast<Eigen::Index>(p), i) = e[p];
    }
    return sys;
}

Eigen::VectorXd project_initial(const GalerkinSystem& sys, const Field& phi0) {
    if (!(phi0.grid() == sys.grid)) throw ShapeMismatch("initial state is not on the system grid");
    const Eigen::Map<const Eigen::VectorXd> v(phi0.data(), static_cast<Eigen::Index>(phi0.size()));
    return sys.basis.transpose() * v * sys.grid.cell_measure();
}

Eigen::VectorXd project_initial(const Field& phi0, int n) { return project_initial(make_system(phi0.grid(), n), phi0); }

Field reconstruct(const GalerkinSystem& sys, const Eigen::VectorXd& coeffs) {
    Field f(sys.grid);
    Eigen::Map<Eigen::VectorXd> out(f.data(), static_cast<Eigen::Index>(f.size()));
    out = sys.basis * coeffs;
    return f;
}

Eigen::VectorXd nonlinearity(const GalerkinSystem& sys, const Eigen::VectorXd& y, const PotentialSpec& spec) {
    const Eigen::VectorXd phi = sys.basis * y;
    Eigen::VectorXd fp(phi.size());
    for (Eigen::Index p = 0; p < phi.size(); ++p) fp(p) = potentials::f_d1(spec, phi(p));
    return sys.basis.transpose() * fp * sys.grid.cell_measure();
}

namespace {

Eigen::MatrixXd nonlinearity_jacobian(const GalerkinSystem& sys, const Eigen::VectorXd& y, const PotentialSpec& spec) {
    const Eigen::VectorXd phi = sys.basis * y;
    Eigen::VectorXd w(phi.size());
    for (Eigen::Index p = 0; p < phi.size(); ++p) w(p) = potentials::f_d2(spec, phi(p)) * sys.grid.cell_measure();
    return sys.basis.transpose() * w.asDiagonal() * sys.basis;
}

}  // namespace

GalerkinTrajectory integrate(const GalerkinSystem& sys, const Eigen::VectorXd& y0, const FieldSeries& u,
                             const PotentialSpec& spec, const TimeGrid& time, const IntegrateOptions& options) {
    check_series(u, sys.grid, time, "control");
    if (y0.size() != sys.n) throw ShapeMismatch("initial coefficient vector has the wrong length");
    if (options.substeps < 1) throw InvalidArgument("substeps must be >= 1");

    const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(sys.lambda.data(), sys.n);
    const Eigen::MatrixXd A = a.asDiagonal();
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(sys.n, sys.n);
    const double h = time.tau() / options.substeps;

    auto rhs = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& g) -> Eigen::VectorXd {
        const Eigen::VectorXd z = a.cwiseProduct(y) + nonlinearity(sys, y, spec);
        return g - y - a.cwiseProduct(z);
    };

    GalerkinTrajectory out{time, {}, {}};
    out.y.reserve(time.steps() + 1);
    out.z.reserve(time.steps() + 1);
    out.y.push_back(y0);
    out.z.push_back(a.cwiseProduct(y0) + nonlinearity(sys, y0, spec));

    Eigen::VectorXd y = y0;
    for (int n = 0; n < time.steps(); ++n) {
        const Eigen::Map<const Eigen::VectorXd> un(u[n].data(), static_cast<Eigen::Index>(u[n].size()));
        const Eigen::VectorXd g = sys.basis.transpose() * un * sys.grid.cell_measure();
        for (int s = 0; s < options.substeps; ++s) {
            const Eigen::VectorXd y_old = y;
            // explicit Euler predictor, then Newton on
            // R(y1) = y1 - y0 - h F((y0 + y1)/2)
            Eigen::VectorXd y1 = y_old + h * rhs(y_old, g);
            bool converged = false;
            for (int it = 0; it < options.newton_max_iters; ++it) {
                const Eigen::VectorXd ym = 0.5 * (y_old + y1);
                const Eigen::VectorXd res = y1 - y_old - h * rhs(ym, g);
                const Eigen::MatrixXd jf = -identity - A * (A + nonlinearity_jacobian(sys, ym, spec));
                const Eigen::MatrixXd jr = identity - 0.5 * h * jf;
                const Eigen::VectorXd delta = jr.partialPivLu().solve(res);
                y1 -= delta;
                if (!y1.allFinite()) break;
                if (delta.norm() <= options.newton_tol * (1.0 + y1.norm())) {
                    converged = true;
                    break;
                }
            }
            if (!converged) {
                throw NewtonFailure("implicit midpoint Newton solve failed in step " + std::to_string(n + 1) +
                                    "; reduce the step");
            }
            y = y1;
        }
        out.y.push_back(y);
        out.z.push_back(a.cwiseProduct(y) + nonlinearity(sys, y, spec));
    }
    return out;
}

ComparisonReport compare_to_pde(const GalerkinSystem& sys, const GalerkinTrajectory& oracle,
                                const state::StateTrajectory& pde) {
    if (!(sys.grid == pde.grid())) throw ShapeMismatch("oracle and PDE trajectories live on different grids");
    if (!(oracle.time == pde.time) || oracle.y.size() != pde.phi.size()) {
        throw ShapeMismatch("oracle and PDE trajectories use different time grids");
    }
    auto rel = [](const Field& a, const Field& b) {
        const double nb = sp::norm_H(b);
        const double d = sp::norm_H(a - b);
        if (nb == 0.0) return d;
        return d / nb;
    };
    ComparisonReport rep;
    for (std::size_t n = 0; n < oracle.y.size(); ++n) {
        rep.err_phi.push_back(rel(reconstruct(sys, oracle.y[n]), pde.phi[n]));
        rep.err_mu.push_back(rel(reconstruct(sys, oracle.z[n]), pde.mu[n]));
    }
    rep.max_err_phi = *std::max_element(rep.err_phi.begin(), rep.err_phi.end());
    rep.max_err_mu = *std::max_element(rep.err_mu.begin(), rep.err_mu.end());
    return rep;
}

}  // namespace cho::galerkin
