#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cho/galerkin.hpp"
#include "cho/random.hpp"

using namespace cho;
using namespace cho::galerkin;
using potentials::PotentialSpec;
namespace sp = cho::spectral;

namespace {
const double kL = 2 * std::numbers::pi;
}

TEST(System, OrderingAndModeCount) {
    const Grid g(8, 8, kL, kL);
    const GalerkinSystem sys = make_system(g, 10);
    EXPECT_EQ(sys.lambda.front(), 0.0);
    for (int i = 1; i < sys.n; ++i) EXPECT_LE(sys.lambda[i - 1], sys.lambda[i]);
    // ties broken lexicographically in (j, k)
    EXPECT_EQ(sys.modes[1], std::make_pair(0, 1));
    EXPECT_EQ(sys.modes[2], std::make_pair(1, 0));
    EXPECT_THROW((void)make_system(g, 0), BadModeCount);
    EXPECT_THROW((void)make_system(g, 65), BadModeCount);
}

TEST(Projection, Examples) {
    const Grid g(12, 12, kL, kL);
    const Eigen::VectorXd c = project_initial(sp::eigenfunction(g, 1, 0), 4);
    EXPECT_NEAR(c(2), 1.0, 1e-12);
    EXPECT_NEAR(c(0), 0.0, 1e-12);
    EXPECT_NEAR(c(1), 0.0, 1e-12);
    const GalerkinSystem one = make_system(g, 1);
    const Field k(g, 0.7);
    EXPECT_LE(sp::max_abs(reconstruct(one, project_initial(one, k)) - k), 1e-13);
    random::Engine rng(2);
    const Field f = random::smooth_field(g, rng, 6, 1.0);
    const GalerkinSystem sys = make_system(g, 8);
    EXPECT_LE(project_initial(sys, f).norm(), sp::norm_H(f) * (1 + 1e-12));
}

TEST(Integrate, ConstantModeMatchesClosedForm) {
    const Grid g(8, 8, kL, kL);
    const TimeGrid t(0.1, 100);
    const GalerkinSystem sys = make_system(g, 1);
    FieldSeries u = zero_series(g, t);
    std::vector<double> ubar(t.steps());
    for (int n = 0; n <= t.steps(); ++n) u[n] = Field(g, 1.0 + std::cos(20 * t.t(n)));
    for (int n = 0; n < t.steps(); ++n) ubar[n] = sp::mean(u[n]);
    Eigen::VectorXd y0(1);
    y0(0) = 0.3 * std::sqrt(g.area());
    IntegrateOptions opt;
    opt.substeps = 100;
    const GalerkinTrajectory tr = integrate(sys, y0, u, PotentialSpec::regular(), t, opt);
    for (int n = 0; n <= t.steps(); ++n) {
        EXPECT_NEAR(tr.y[n](0) / std::sqrt(g.area()), state::mean_closed_form(0.3, ubar, t, t.t(n)), 1e-10);
    }
}

TEST(Integrate, LinearSingleMode) {
    // For |phi| < 1 the regularized obstacle potential is linear: f'(r) = -2 c2 r.
    const Grid g(16, 16, kL, kL);
    const double c2 = 0.5;
    const PotentialSpec spec = PotentialSpec::double_obstacle(c2, 0.1);
    const GalerkinSystem sys = make_system(g, 6);
    const TimeGrid t(1.0, 50);
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(6);
    y0(4) = 0.5;
    const double lam = sys.lambda[4];
    IntegrateOptions opt;
    opt.substeps = 100;
    const GalerkinTrajectory tr = integrate(sys, y0, zero_series(g, t), spec, t, opt);
    for (int n = 0; n <= t.steps(); ++n) {
        EXPECT_NEAR(tr.y[n](4), 0.5 * std::exp(-(1 + lam * lam - 2 * c2 * lam) * t.t(n)), 1e-8);
    }
}

TEST(Compare, LinearBandLimited) {
    const Grid g(16, 16, kL, kL);
    const PotentialSpec spec = PotentialSpec::double_obstacle(0.5, 0.1);
    const GalerkinSystem sys = make_system(g, 8);
    const TimeGrid t(0.01, 400);
    Eigen::VectorXd y0(8);
    random::Engine rng(4);
    for (int i = 0; i < 8; ++i) y0(i) = 0.3 * random::symmetric_unit(rng);
    const Field phi0 = reconstruct(sys, y0);
    const auto pde = state::simulate(phi0, zero_series(g, t), t, spec);
    const auto orc = integrate(sys, y0, zero_series(g, t), spec, t, {});
    EXPECT_LE(compare_to_pde(sys, orc, pde).max_err_phi, 1e-6);
}

TEST(Compare, StationaryAndMismatch) {
    const Grid g(16, 16, kL, kL);
    const TimeGrid t(0.5, 20);
    const PotentialSpec spec = PotentialSpec::regular(2.0);
    const GalerkinSystem sys = make_system(g, 4);
    const Field one(g, 1.0);
    const auto pde = state::simulate(one, constant_series(g, t, 1.0), t, spec);
    const auto orc = integrate(sys, project_initial(sys, one), constant_series(g, t, 1.0), spec, t, {});
    const auto rep = compare_to_pde(sys, orc, pde);
    EXPECT_LE(rep.max_err_phi, 1e-10);
    const GalerkinSystem other = make_system(Grid(8, 8, kL, kL), 4);
    EXPECT_THROW((void)compare_to_pde(other, orc, pde), ShapeMismatch);
}

TEST(Properties, ConstantModeBound) {
    const Grid g(12, 12, kL, kL);
    const TimeGrid t(1.0, 40);
    const GalerkinSystem sys = make_system(g, 6);
    random::Engine rng(6);
    const FieldSeries u = random::smooth_series(g, t, rng, 2, 3, 0.4);
    const Field phi0 = random::smooth_field(g, rng, 2, 0.5);
    const auto tr = integrate(sys, project_initial(sys, phi0), u, PotentialSpec::regular(), t, {});
    const double m0 = sp::mean(phi0);
    for (const auto& y : tr.y) {
        const double m = y(0) / std::sqrt(g.area());
        EXPECT_LE(m, m0 + 0.4 + 1e-12);
        EXPECT_GE(m, m0 - 0.4 - 1e-12);
    }
}

TEST(Properties, RefinementConvergence) {
    const Grid g(16, 16, kL, kL);
    const PotentialSpec spec = PotentialSpec::regular(2.0);
    random::Engine rng(9);
    const Field phi0 = random::smooth_field(g, rng, 3, 0.3);
    double prev = 1e300;
    for (int n : {3, 6, 12, 24}) {
        const TimeGrid t(0.1, 100);
        const GalerkinSystem sys = make_system(g, n);
        const auto pde = state::simulate(phi0, zero_series(g, t), t, spec);
        const auto orc = integrate(sys, project_initial(sys, phi0), zero_series(g, t), spec, t, {});
        const double e = compare_to_pde(sys, orc, pde).max_err_phi;
        EXPECT_LT(e, prev) << n;
        prev = e;
    }
}
