#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cho/random.hpp"
#include "cho/state.hpp"

using namespace cho;
using namespace cho::state;
using potentials::PotentialSpec;
using potentials::Regularization;
namespace sp = cho::spectral;

namespace {

const double kL = 2 * std::numbers::pi;

ControlFunction constant_control(const Grid& g, const TimeGrid& t, double v, double M) {
    return ControlFunction(t, constant_series(g, t, v), M, 1.0);
}

std::vector<double> means(const FieldSeries& s) {
    std::vector<double> m;
    for (const Field& f : s) m.push_back(sp::mean(f));
    return m;
}

}  // namespace

TEST(Compatibility, Examples) {
    const Grid g(8, 8, 1.0, 1.0);
    const TimeGrid t(1.0, 10);
    const auto rep_reg = validate_compatibility(Field(g, 5.0), constant_control(g, t, 0.0, 100.0),
                                                PotentialSpec::regular());
    EXPECT_TRUE(rep_reg.ok);

    const PotentialSpec log = PotentialSpec::logarithmic(2.0, 0.01, Regularization::PiecewiseLog);
    const auto fail = validate_compatibility(Field(g, 0.0), constant_control(g, t, 2.0, 2.0), log);
    EXPECT_FALSE(fail.ok);
    EXPECT_NE(fail.message.find("compatibility"), std::string::npos);

    const auto pass = validate_compatibility(Field(g, 0.2), constant_control(g, t, 0.0, 0.5), log);
    EXPECT_TRUE(pass.ok);
    EXPECT_NEAR(pass.margin, 0.3, 1e-12);
}

TEST(Simulate, RefusesIncompatibleData) {
    const Grid g(8, 8, 1.0, 1.0);
    const TimeGrid t(1.0, 10);
    const PotentialSpec log = PotentialSpec::logarithmic(2.0, 0.01, Regularization::PiecewiseLog, 2.0);
    const ControlFunction u = constant_control(g, t, 2.0, 2.0);
    EXPECT_THROW((void)simulate(Field(g, 0.0), u, log), CompatibilityError);
    SimulateOptions opt;
    opt.override_compatibility = true;
    EXPECT_NO_THROW((void)simulate(Field(g, 0.0), u, log, opt));
}

TEST(Step, StationaryEquilibrium) {
    const Grid g(16, 16, kL, kL);
    const PotentialSpec spec = PotentialSpec::regular(2.0);
    const StepResult r = step(Field(g, 1.0), Field(g, 1.0), spec, 0.01);
    EXPECT_LE(sp::max_abs(r.phi - Field(g, 1.0)), 1e-14);
    EXPECT_LE(sp::max_abs(r.mu), 1e-14);
}

TEST(Step, ConstantModeIsImplicitEuler) {
    const Grid g(16, 12, kL, 3.0);
    random::Engine rng(1);
    const Field phi = random::smooth_field(g, rng, 4, 0.7);
    const Field u = random::smooth_field(g, rng, 4, 0.5);
    const double tau = 0.013;
    const StepResult r = step(phi, u, PotentialSpec::regular(3.0), tau);
    EXPECT_NEAR(sp::mean(r.phi), (sp::mean(phi) + tau * sp::mean(u)) / (1 + tau), 1e-14);
}

TEST(Step, SingleModeLinearRecurrence) {
    // Inside [-1, 1] the regularized obstacle has beta = 0 and pi(r) = -2 c2 r,
    // so a single mode evolves by a scalar linear recurrence.
    const Grid g(16, 16, std::numbers::pi, std::numbers::pi);
    const double c2 = 0.75, tau = 0.02;
    const PotentialSpec spec = PotentialSpec::double_obstacle(c2, 0.1, 0.0);
    const Field e = sp::eigenfunction(g, 2, 1);
    const double lambda = 5.0;
    Field phi = 0.2 * e;
    double a = 0.2;
    for (int n = 0; n < 20; ++n) {
        phi = step(phi, Field(g), spec, tau).phi;
        a = a * (1 + tau * lambda * 2 * c2) / (1 + tau + tau * lambda * lambda);
    }
    EXPECT_LE(sp::max_abs(phi - a * e), 1e-13);
}

TEST(Simulate, FixedPoint) {
    const Grid g(16, 16, kL, kL);
    const TimeGrid t(1.0, 50);
    const StateTrajectory tr = simulate(Field(g, -1.0), constant_series(g, t, -1.0), t, PotentialSpec::regular(2.0));
    for (const Field& f : tr.phi) EXPECT_LE(sp::max_abs(f + Field(g, 1.0)), 1e-13);
}

TEST(Simulate, MeanLawAndCrossing) {
    const Grid g(32, 32, kL, kL);
    const TimeGrid t(1.0, 400);
    const PotentialSpec spec = PotentialSpec::regular(state::default_stabilization(PotentialSpec::regular(), -1.2, 1.2));
    const StateTrajectory tr = simulate(Field(g, 0.0), constant_series(g, t, 2.0), t, spec);
    const std::vector<double> ubar(t.steps(), 2.0);
    const auto ie = mean_implicit_euler(0.0, ubar, t);
    const auto m = means(tr.phi);
    for (int n = 0; n <= t.steps(); ++n) EXPECT_NEAR(m[n], ie[n], 1e-12);
    int cross = 0;
    while (m[cross] < 1.0) ++cross;
    const double tc = t.t(cross - 1) + (1.0 - m[cross - 1]) / (m[cross] - m[cross - 1]) * t.tau();
    EXPECT_NEAR(tc, std::log(2.0), 0.02 * std::log(2.0));
}

TEST(MeanClosedForm, Examples) {
    const TimeGrid t(2.0, 40);
    const std::vector<double> same(40, 0.4);
    EXPECT_NEAR(mean_closed_form(0.4, same, t, 1.37), 0.4, 1e-15);
    const std::vector<double> two(40, 2.0);
    EXPECT_NEAR(mean_closed_form(0.0, two, t, std::log(2.0)), 1.0, 1e-14);
    EXPECT_NEAR(mean_closed_form(0.0, two, t, 1.3), 2 * (1 - std::exp(-1.3)), 1e-14);
    const std::vector<double> zero(40, 0.0);
    EXPECT_NEAR(mean_closed_form(1.0, zero, t, 0.77), std::exp(-0.77), 1e-14);
}

TEST(MeanClosedForm, FirstOrderConsistency) {
    const Grid g(8, 8, kL, kL);
    random::Engine rng(3);
    double prev = 0.0;
    for (int nt : {50, 100, 200}) {
        const TimeGrid t(1.0, nt);
        std::vector<double> ubar(nt);
        FieldSeries u = zero_series(g, t);
        for (int n = 0; n <= nt; ++n) u[n] = Field(g, 0.5 * std::sin(3 * t.t(n)));
        for (int n = 0; n < nt; ++n) ubar[n] = sp::mean(u[n]);
        const StateTrajectory tr = simulate(Field(g, 0.1), u, t, PotentialSpec::regular(2.0));
        double err = 0.0;
        for (int n = 0; n <= nt; ++n) {
            err = std::max(err, std::abs(sp::mean(tr.phi[n]) - mean_closed_form(0.1, ubar, t, t.t(n))));
            EXPECT_LE(std::abs(sp::mean(tr.phi[n]) - 0.1), 0.5 + 1e-12);
        }
        if (prev > 0.0) EXPECT_NEAR(prev / err, 2.0, 0.2);
        prev = err;
    }
}

TEST(Energy, Examples) {
    const Grid g(16, 16, kL, kL);
    EXPECT_NEAR(energy(Field(g, 1.0), PotentialSpec::regular()), 0.0, 1e-14);
    const TimeGrid t(0.5, 20);
    const FieldSeries u = constant_series(g, t, 1.0);
    const StateTrajectory tr = simulate(Field(g, 1.0), u, t, PotentialSpec::regular(2.0));
    for (double r : energy_balance_residual(tr, u, PotentialSpec::regular(2.0))) EXPECT_LE(std::abs(r), 1e-10);
}

TEST(Energy, ResidualIsFirstOrder) {
    const Grid g(16, 16, kL, kL);
    const PotentialSpec spec = PotentialSpec::double_obstacle(0.5, 0.1, 0.0);
    const Field phi0 = 0.3 * sp::eigenfunction(g, 1, 2) + Field(g, 0.1);
    double prev = 0.0;
    for (int nt : {100, 200, 400}) {
        const TimeGrid t(0.5, nt);
        const StateTrajectory tr = simulate(phi0, zero_series(g, t), t, spec);
        const auto r = energy_balance_residual(tr, zero_series(g, t), spec);
        double m = 0.0;
        for (double v : r) m = std::max(m, std::abs(v));
        if (prev > 0.0) EXPECT_NEAR(prev / m, 2.0, 0.2);
        prev = m;
    }
}

TEST(Simulate, NonFiniteReportsStep) {
    const Grid g(8, 8, 1.0, 1.0);
    const TimeGrid t(10.0, 10);
    Field phi0(g);
    for (std::size_t i = 0; i < phi0.size(); ++i) phi0[i] = (i % 2 ? 40.0 : -40.0);
    try {
        (void)simulate(phi0, zero_series(g, t), t, PotentialSpec::regular(0.0));
        FAIL() << "expected NonFinite";
    } catch (const NonFinite& e) {
        EXPECT_GE(e.step(), 1);
        EXPECT_LE(e.step(), 10);
    }
}

TEST(Properties, XiBoundAndSeparation) {
    const Grid g(32, 32, kL, kL);
    const TimeGrid t(0.5, 100);
    PotentialSpec spec = PotentialSpec::logarithmic(2.0, 1e-4, Regularization::PiecewiseLog);
    spec.stabilization = default_stabilization(spec, -0.6, 0.6);
    random::Engine rng(5);
    Field phi0 = random::smooth_field(g, rng, 3, 0.6);
    const FieldSeries u = random::smooth_series(g, t, rng, 3, 2, 0.2);
    const StateTrajectory tr = simulate(phi0, ControlFunction(t, u, 0.2, 10.0), spec);
    for (int n = 0; n <= t.steps(); ++n) {
        EXPECT_LE(sp::max_abs(tr.phi[n]), 1 - 1e-3);
        const Field rhs = tr.phi[n] + tr.mu[n] - apply_pi(tr.phi[n], spec);
        EXPECT_LE(sp::max_abs(apply_beta(tr.phi[n], spec)), sp::max_abs(rhs) + 1e-8);
    }
}

TEST(Properties, ContinuousDependenceRatioBounded) {
    const Grid g(16, 16, kL, kL);
    const TimeGrid t(0.5, 50);
    const PotentialSpec spec = PotentialSpec::regular(default_stabilization(PotentialSpec::regular(), -1.2, 1.2));
    random::Engine rng(8);
    const Field phi0 = random::smooth_field(g, rng, 3, 0.5);
    for (int k = 0; k < 5; ++k) {
        const FieldSeries u1 = random::smooth_series(g, t, rng, 3, 2, 0.5);
        const FieldSeries u2 = random::smooth_series(g, t, rng, 3, 2, 0.5);
        const StateTrajectory a = simulate(phi0, u1, t, spec);
        const StateTrajectory b = simulate(phi0, u2, t, spec);
        double dphi = 0.0, dmu = 0.0, du = 0.0;
        for (int n = 0; n <= t.steps(); ++n) {
            dphi = std::max(dphi, sp::norm_H(a.phi[n] - b.phi[n]));
            const double w = t.weight(n) * t.tau();
            dmu += w * std::pow(sp::norm_H(a.mu[n] - b.mu[n]), 2);
            du += w * std::pow(sp::norm_H(u1[n] - u2[n]), 2);
        }
        const double ratio = (dphi + std::sqrt(dmu)) / std::sqrt(du);
        EXPECT_TRUE(std::isfinite(ratio));
        EXPECT_LT(ratio, 100.0);
    }
}
