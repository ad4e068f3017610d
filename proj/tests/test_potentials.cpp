#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "cho/potentials.hpp"
#include "cho/random.hpp"

using namespace cho::potentials;

namespace {

double bisect(const std::function<double(double)>& g, double lo, double hi) {
    double glo = g(lo);
    for (int i = 0; i < 300 && hi - lo > 1e-15 * (1 + std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Composite Gauss-Legendre (5 points) on [0, r].
double integrate(const std::function<double(double)>& f, double r, int panels = 400) {
    static const double x[] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                               0.9061798459386640};
    static const double w[] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                               0.2369268850561891};
    const double h = r / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = (p + 0.5) * h;
        for (int i = 0; i < 5; ++i) s += w[i] * f(c + 0.5 * h * x[i]);
    }
    return 0.5 * h * s;
}

std::vector<double> uniform(double lo, double hi, int n, unsigned seed) {
    cho::random::Engine rng(seed);
    std::vector<double> out(n);
    for (double& v : out) v = lo + (hi - lo) * 0.5 * (cho::random::symmetric_unit(rng) + 1.0);
    return out;
}

}  // namespace

TEST(Spec, Validation) {
    EXPECT_THROW(PotentialSpec::logarithmic(2.0, 1.5, Regularization::Yosida).validate(), cho::ValidationError);
    EXPECT_THROW(PotentialSpec::logarithmic(0.5, 0.1, Regularization::Yosida).validate(), cho::ValidationError);
    EXPECT_THROW(PotentialSpec::double_obstacle(-1.0, 0.1).validate(), cho::ValidationError);
    PotentialSpec bad = PotentialSpec::regular();
    bad.reg = Regularization::PiecewiseLog;
    EXPECT_THROW(bad.validate(), cho::ValidationError);
    try {
        PotentialSpec::logarithmic(2.0, 1.5, Regularization::Yosida).validate();
    } catch (const cho::ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("eps"), std::string::npos);
    }
}

TEST(Regular, Values) {
    const PotentialSpec s = PotentialSpec::regular();
    EXPECT_DOUBLE_EQ(f_value(s, 0.0), 0.25);
    EXPECT_NEAR(f_value(s, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(f_value(s, -1.0), 0.0, 1e-15);
    for (double r : {-1.7, -1.0, 0.3, 1.0, 2.2}) EXPECT_NEAR(f_d1(s, r), r * r * r - r, 1e-14);
    for (double r : {-1.7, 0.3, 2.2}) EXPECT_NEAR(f_d2(s, r), 3 * r * r - 1, 1e-14);
    EXPECT_NEAR(f_d3(s, 0.4), 2.4, 1e-14);
}

TEST(Logarithmic, Values) {
    const PotentialSpec s = PotentialSpec::logarithmic(2.0, 0.1, Regularization::None);
    EXPECT_NEAR(f_value(s, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(beta_exact(s, 0.5), std::log(3.0), 1e-14);
    EXPECT_THROW((void)f_d1(s, 1.0), cho::DomainViolation);
    EXPECT_THROW((void)beta_exact(s, -1.0), cho::DomainViolation);
    // f = (1+r)ln(1+r) + (1-r)ln(1-r) - c1 r^2
    const double r = 0.37;
    EXPECT_NEAR(f_value(s, r), (1 + r) * std::log(1 + r) + (1 - r) * std::log(1 - r) - 2 * r * r, 1e-14);
    const double h = 1e-5;
    EXPECT_NEAR(f_d2(s, r), (f_d1(s, r + h) - f_d1(s, r - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(f_d3(s, r), (f_d2(s, r + h) - f_d2(s, r - h)) / (2 * h), 1e-6);
}

TEST(Yosida, ZeroAtZero) {
    for (const PotentialSpec& s :
         {PotentialSpec::logarithmic(2.0, 0.1, Regularization::Yosida), PotentialSpec::double_obstacle(1.0, 0.3)}) {
        EXPECT_EQ(beta_yosida(s, 0.0), 0.0);
    }
}

TEST(Yosida, ObstacleClosedForm) {
    const PotentialSpec s = PotentialSpec::double_obstacle(1.0, 0.5);
    EXPECT_NEAR(beta_yosida(s, 1.5), 1.0, 1e-15);
    EXPECT_NEAR(beta_yosida(s, -1.25), -0.5, 1e-15);
    EXPECT_EQ(beta_yosida(s, 0.7), 0.0);
    EXPECT_NEAR(betahat(s, 1.5), 0.25, 1e-15);
    EXPECT_NEAR(f_d1(s, 1.5), 1.0 - 2.0 * 1.5, 1e-14);
}

TEST(Yosida, LogMatchesBisection) {
    const PotentialSpec s = PotentialSpec::logarithmic(2.0, 0.1, Regularization::Yosida);
    // s = ln((1.9 - 0.1 s)/(0.1 + 0.1 s))
    const double ref = bisect([](double v) { return v - std::log((1.9 - 0.1 * v) / (0.1 + 0.1 * v)); }, 0.0, 18.99);
    EXPECT_NEAR(beta_yosida(s, 0.9), ref, 1e-12);
    for (double r : {-3.0, -0.99, -0.2, 0.45, 1.0, 2.5}) {
        const double e = s.eps;
        const double b = bisect([&](double v) { return v - std::log((1 + r - e * v) / (1 - r + e * v)); },
                                (r - 1) / e + 1e-13, (r + 1) / e - 1e-13);
        EXPECT_NEAR(beta_yosida(s, r), b, 1e-10 * (1 + std::abs(b))) << r;
    }
}

TEST(Yosida, RegularCubicMatchesBisection) {
    PotentialSpec s = PotentialSpec::regular();
    s.reg = Regularization::Yosida;
    s.eps = 0.2;
    for (double r : {-4.0, -0.5, 0.3, 2.0}) {
        const double b = bisect([&](double v) { return v - std::pow(r - 0.2 * v, 3); }, -30.0, 30.0);
        EXPECT_NEAR(beta_yosida(s, r), b, 1e-10 * (1 + std::abs(b)));
    }
}

TEST(Yosida, DerivativesMatchFiniteDifferences) {
    for (const PotentialSpec& s : {PotentialSpec::logarithmic(2.0, 0.05, Regularization::Yosida),
                                   PotentialSpec::logarithmic(1.5, 0.3, Regularization::PiecewiseLog)}) {
        for (double r : {-1.4, -0.6, 0.1, 0.8, 1.3}) {
            const double h = 1e-6;
            EXPECT_NEAR(beta_reg_d1(s, r), (beta_reg(s, r + h) - beta_reg(s, r - h)) / (2 * h),
                        1e-6 * (1 + std::abs(beta_reg_d1(s, r))));
            EXPECT_NEAR(betahat(s, r + h) - betahat(s, r - h), 2 * h * beta_reg(s, r), 1e-8);
        }
    }
}

TEST(Betahat, QuadratureOracle) {
    const PotentialSpec s = PotentialSpec::logarithmic(2.0, 0.1, Regularization::Yosida);
    for (double r : {-0.8, 0.8, 1.4}) {
        const double q = integrate([&](double v) { return beta_yosida(s, v); }, r);
        EXPECT_NEAR(betahat(s, r), q, 1e-10);
    }
    for (double r : {-0.8, 0.8}) {
        EXPECT_GE(betahat(s, r), 0.0);
        EXPECT_LE(betahat(s, r), betahat_exact(s, r));
    }
    const PotentialSpec pl = PotentialSpec::logarithmic(2.0, 0.2, Regularization::PiecewiseLog);
    for (double r : {-1.3, 0.5, 0.95}) {
        EXPECT_NEAR(betahat(pl, r), integrate([&](double v) { return beta_piecewise_log(pl, v); }, r), 1e-10);
    }
    EXPECT_EQ(betahat(s, 0.0), 0.0);
}

TEST(PiecewiseLog, Examples) {
    const PotentialSpec s = PotentialSpec::logarithmic(2.0, 0.5, Regularization::PiecewiseLog);
    EXPECT_NEAR(beta_piecewise_log(s, 0.5), std::log(3.0), 1e-14);
    EXPECT_NEAR(beta_piecewise_log(s, 0.75), std::log(3.0) + 8.0 / 3.0 * 0.25, 1e-14);
    EXPECT_NEAR(beta_piecewise_log(s, 0.75), 1.765279, 1e-6);
    for (double r : uniform(-3, 3, 50, 2)) EXPECT_EQ(beta_piecewise_log(s, -r), -beta_piecewise_log(s, r));
    for (double r : uniform(-3, 3, 200, 3)) EXPECT_LE(beta_piecewise_log_d1(s, r), 8.0 / 3.0 + 1e-14);
    EXPECT_THROW((void)beta_piecewise_log(PotentialSpec::regular(), 0.1), cho::WrongVariant);
}

TEST(ExpBound, Examples) {
    const PotentialSpec s = PotentialSpec::logarithmic(2.0, 0.1, Regularization::PiecewiseLog);
    const double zero[] = {0.0};
    EXPECT_NEAR(check_exp_derivative_bound(s, zero).max_violation, 0.0, 1e-15);
    const double edge[] = {0.9};
    EXPECT_LE(check_exp_derivative_bound(s, edge).max_violation, 1e-12);
    const auto samples = uniform(-2, 2, 10000, 4);
    EXPECT_LE(check_exp_derivative_bound(s, samples).max_violation, 1e-12);
}

TEST(Young, Constants) {
    const YoungConstants c3 = young_exp_constants(3.0);
    EXPECT_NEAR(c3.delta, (-4 + std::sqrt(18.0)) / 2, 1e-12);
    EXPECT_NEAR(c3.kappa, 8.242641, 1e-6);
    EXPECT_NEAR(c3.kappa_prime, std::pow(3 + c3.delta, 2) / (4 * c3.delta), 1e-12);
    EXPECT_NEAR(c3.kappa_prime, 20.07627, 1e-5);
    const YoungConstants c1 = young_exp_constants(1.0);
    EXPECT_NEAR(c1.delta, (-2 + std::sqrt(6.0)) / 2, 1e-12);
    EXPECT_NEAR(c1.kappa, 4.449490, 1e-6);
    EXPECT_THROW((void)young_exp_constants(0.5), cho::InvalidArgument);
}

TEST(Young, InequalitySweep) {
    for (double p : {1.0, 2.0, 3.0}) {
        const YoungConstants c = young_exp_constants(p);
        const auto rs = uniform(0, 6, 2000, 7);
        const auto ss = uniform(0, 6, 2000, 8);
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const double r = rs[i], s = ss[i];
            const double lhs = r * s * std::exp(p * s);
            const double rhs = 0.5 * s * s * std::exp(p * s) + std::exp(c.kappa * r) + c.kappa_prime;
            EXPECT_LE(lhs, rhs * (1 + 1e-12));
        }
    }
}

TEST(Properties, MonotoneLipschitzSandwich) {
    const std::vector<PotentialSpec> specs = {PotentialSpec::logarithmic(2.0, 0.05, Regularization::Yosida),
                                              PotentialSpec::logarithmic(2.0, 0.05, Regularization::PiecewiseLog),
                                              PotentialSpec::double_obstacle(1.0, 0.05)};
    const auto a = uniform(-2, 2, 2000, 9);
    const auto b = uniform(-2, 2, 2000, 10);
    for (const PotentialSpec& s : specs) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double lo = std::min(a[i], b[i]), hi = std::max(a[i], b[i]);
            EXPECT_LE(beta_reg(s, lo), beta_reg(s, hi) + 1e-12);
            if (s.reg == Regularization::Yosida) {
                EXPECT_LE(std::abs(beta_reg(s, hi) - beta_reg(s, lo)), (hi - lo) / s.eps + 1e-12);
            }
        }
    }
    const PotentialSpec y = specs[0];
    for (double r : uniform(-0.999, 0.999, 2000, 12)) {
        EXPECT_LE(std::abs(beta_yosida(y, r)), std::abs(beta_exact(y, r)) + 1e-12);
        EXPECT_GE(betahat(y, r), -1e-12);
        EXPECT_LE(betahat(y, r), betahat_exact(y, r) + 1e-12);
    }
}

TEST(Properties, PiLipschitz) {
    for (const PotentialSpec& s : {PotentialSpec::regular(), PotentialSpec::logarithmic(3.0, 0.1, Regularization::Yosida),
                                   PotentialSpec::double_obstacle(2.0, 0.1)}) {
        const double L = pi_lipschitz(s);
        for (double r : uniform(-0.9, 0.9, 500, 13)) {
            EXPECT_LE(std::abs(f_d2(s, r) - beta_reg_d1(s, r)), L + 1e-12);
        }
    }
    EXPECT_DOUBLE_EQ(pi_lipschitz(PotentialSpec::logarithmic(3.0, 0.1, Regularization::Yosida)), 6.0);
    EXPECT_DOUBLE_EQ(pi_lipschitz(PotentialSpec::double_obstacle(2.0, 0.1)), 4.0);
}

TEST(Stabilization, SupOfCurvature) {
    EXPECT_NEAR(sup_abs_f_d2(PotentialSpec::regular(), -1.2, 1.2), 3 * 1.44 - 1, 1e-12);
}
