#include "cho/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cho::potentials {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(cosh(x)) without overflow
double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

void require_log(const PotentialSpec& spec, const char* what) {
    if (spec.variant != Variant::Logarithmic) {
        throw WrongVariant(std::string(what) + " is defined for the logarithmic potential only");
    }
}

void require_eps(const PotentialSpec& spec) {
    if (!(spec.eps > 0.0 && spec.eps < 1.0)) throw ValidationError("eps must lie in (0,1)");
}

// a few ulps: both resolvent solves are bracketed, so Newton runs to round-off
constexpr double kResolventTol = 4.0 * std::numeric_limits<double>::epsilon();

// Yosida resolvent for the logarithmic beta. With y = r - eps s and
// s = beta(y) = 2 artanh(y) the fixed point reads tanh(s/2) + eps s = r,
// which is smooth and strictly increasing in s on the whole line.

double yosida_log(double r, double eps) {
    if (r == 0.0) return 0.0;
    if (r < 0.0) return -yosida_log(-r, eps);
    double lo = 0.0;
    double hi = (r + 1.0) / eps;
    auto g = [&](double s) { return std::tanh(0.5 * s) + eps * s - r; };
    auto dg = [&](double s) {
        const double c = std::cosh(0.5 * s);
        return 0.5 / (c * c) + eps;
    };
    // start from the unregularized value when it is inside the bracket
    double s = r < 1.0 ? std::min(2.0 * std::atanh(r), hi) : 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double gs = g(s);
        if (gs > 0.0) hi = s; else lo = s;
        double next = s - gs / dg(s);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double tol = kResolventTol * std::max(1.0, std::abs(s));
        if (std::abs(next - s) <= tol || hi - lo <= tol) {
            return next;
        }
        s = next;
    }
    throw ConvergenceFailure("Yosida resolvent (logarithmic) did not converge");
}

// Yosida resolvent for beta(r) = r^3: s = (r - eps s)^3.
double yosida_cubic(double r, double eps) {
    if (r == 0.0) return 0.0;
    if (r < 0.0) return -yosida_cubic(-r, eps);
    double lo = 0.0;
    double hi = std::min(r * r * r, r / eps);
    auto f = [&](double s) {
        const double y = r - eps * s;
        return s - y * y * y;
    };
    auto df = [&](double s) {
        const double y = r - eps * s;
        return 1.0 + 3.0 * eps * y * y;
    };
    double s = hi;
    for (int it = 0; it < 200; ++it) {
        const double fs = f(s);
        if (fs > 0.0) hi = s; else lo = s;
        double next = s - fs / df(s);
        if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
        const double tol = kResolventTol * std::max(1.0, std::abs(s));
        if (std::abs(next - s) <= tol || hi - lo <= tol) {
            return next;
        }
        s = next;
    }
    throw ConvergenceFailure("Yosida resolvent (regular) did not converge");
}

}  // namespace

void PotentialSpec::validate() const {
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("eps ∈ (0,1) violated: eps = " + std::to_string(eps));
    if (!(stabilization >= 0.0) || !std::isfinite(stabilization)) {
        throw ValidationError("stabilization must be a finite number >= 0");
    }
    if (variant == Variant::Logarithmic && !(c1 > 1.0)) {
        throw ValidationError("c1 > 1 required for the logarithmic potential");
    }
    if (variant == Variant::DoubleObstacle && !(c2 > 0.0)) {
        throw ValidationError("c2 > 0 required for the double obstacle potential");
    }
    if (reg == Regularization::PiecewiseLog && variant != Variant::Logarithmic) {
        throw ValidationError("piecewise_log regularization requires the logarithmic potential");
    }
    if (variant == Variant::DoubleObstacle && reg != Regularization::Yosida) {
        throw ValidationError("the double obstacle potential is only available through its Yosida regularization");
    }
}

PotentialSpec PotentialSpec::regular(double stabilization) {
    PotentialSpec s;
    s.variant = Variant::Regular;
    s.reg = Regularization::None;
    s.stabilization = stabilization;
    return s;
}

PotentialSpec PotentialSpec::logarithmic(double c1, double eps, Regularization reg, double stabilization) {
    PotentialSpec s;
    s.variant = Variant::Logarithmic;
    s.c1 = c1;
    s.eps = eps;
    s.reg = reg;
    s.stabilization = stabilization;
    return s;
}

PotentialSpec PotentialSpec::double_obstacle(double c2, double eps, double stabilization) {
    PotentialSpec s;
    s.variant = Variant::DoubleObstacle;
    s.c2 = c2;
    s.eps = eps;
    s.reg = Regularization::Yosida;
    s.stabilization = stabilization;
    return s;
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Regular: return "regular";
        case Variant::Logarithmic: return "logarithmic";
        case Variant::DoubleObstacle: return "double_obstacle";
    }
    return "?";
}

std::string to_string(Regularization r) {
    switch (r) {
        case Regularization::None: return "none";
        case Regularization::Yosida: return "yosida";
        case Regularization::PiecewiseLog: return "piecewise_log";
    }
    return "?";
}

double domain_bound(const PotentialSpec& spec) { return spec.singular() ? 1.0 : kInf; }

double beta_exact(const PotentialSpec& spec, double r) {
    switch (spec.variant) {
        case Variant::Regular: return r * r * r;
        case Variant::Logarithmic:
            if (!(std::abs(r) < 1.0)) throw DomainViolation("logarithmic beta undefined for |r| >= 1");
            return std::log1p(r) - std::log1p(-r);
        case Variant::DoubleObstacle:
            if (std::abs(r) > 1.0) throw DomainViolation("double obstacle beta undefined for |r| > 1");
            return 0.0;  // minimal section
    }
    return 0.0;
}

double beta_exact_d1(const PotentialSpec& spec, double r) {
    switch (spec.variant) {
        case Variant::Regular: return 3.0 * r * r;
        case Variant::Logarithmic:
            if (!(std::abs(r) < 1.0)) throw DomainViolation("logarithmic beta undefined for |r| >= 1");
            return 2.0 / ((1.0 - r) * (1.0 + r));
        case Variant::DoubleObstacle:
            if (!(std::abs(r) < 1.0)) throw DomainViolation("double obstacle beta is not differentiable for |r| >= 1");
            return 0.0;
    }
    return 0.0;
}

double betahat_exact(const PotentialSpec& spec, double r) {
    switch (spec.variant) {
        case Variant::Regular: return 0.25 * r * r * r * r;
        case Variant::Logarithmic: {
            if (std::abs(r) > 1.0) throw DomainViolation("logarithmic potential undefined for |r| > 1");
            const double a = 1.0 + r;
            const double b = 1.0 - r;
            return (a > 0.0 ? a * std::log(a) : 0.0) + (b > 0.0 ? b * std::log(b) : 0.0);
        }
        case Variant::DoubleObstacle:
            if (std::abs(r) > 1.0) throw DomainViolation("double obstacle potential is +inf for |r| > 1");
            return 0.0;
    }
    return 0.0;
}

double pihat(const PotentialSpec& spec, double r) {
    switch (spec.variant) {
        case Variant::Regular: return 0.25 * (1.0 - 2.0 * r * r);
        case Variant::Logarithmic: return -spec.c1 * r * r;
        case Variant::DoubleObstacle: return -spec.c2 * r * r;
    }
    return 0.0;
}

double pi(const PotentialSpec& spec, double r) { return pi_d1(spec, r) * r; }

double pi_d1(const PotentialSpec& spec, double /*r*/) {
    switch (spec.variant) {
        case Variant::Regular: return -1.0;
        case Variant::Logarithmic: return -2.0 * spec.c1;
        case Variant::DoubleObstacle: return -2.0 * spec.c2;
    }
    return 0.0;
}

double pi_lipschitz(const PotentialSpec& spec) { return std::abs(pi_d1(spec, 0.0)); }

// --- Yosida -----------------------------------------------------------------

double beta_yosida(const PotentialSpec& spec, double r) {
    require_eps(spec);
    const double eps = spec.eps;
    switch (spec.variant) {
        case Variant::Regular: return yosida_cubic(r, eps);
        case Variant::Logarithmic: return yosida_log(r, eps);
        case Variant::DoubleObstacle: return (r - std::clamp(r, -1.0, 1.0)) / eps;
    }
    return 0.0;
}

double beta_yosida_d1(const PotentialSpec& spec, double r) {
    require_eps(spec);
    const double eps = spec.eps;
    switch (spec.variant) {
        case Variant::Regular: {
            const double y = r - eps * yosida_cubic(r, eps);
            return 3.0 * y * y / (1.0 + 3.0 * eps * y * y);
        }
        case Variant::Logarithmic: {
            const double c = std::cosh(0.5 * yosida_log(r, eps));
            const double u = 1.0 / (c * c);  // 1 - y^2
            return 1.0 / (0.5 * u + eps);
        }
        case Variant::DoubleObstacle: return std::abs(r) > 1.0 ? 1.0 / eps : 0.0;
    }
    return 0.0;
}

double beta_yosida_d2(const PotentialSpec& spec, double r) {
    require_eps(spec);
    const double eps = spec.eps;
    switch (spec.variant) {
        case Variant::Regular: {
            const double y = r - eps * yosida_cubic(r, eps);
            const double d = 1.0 + 3.0 * eps * y * y;
            return 6.0 * y / (d * d * d);
        }
        case Variant::Logarithmic: {
            const double s = yosida_log(r, eps);
            const double y = std::tanh(0.5 * s);
            const double c = std::cosh(0.5 * s);
            const double u = 1.0 / (c * c);
            const double d = u + 2.0 * eps;
            return 4.0 * y * u / (d * d * d);
        }
        case Variant::DoubleObstacle: return 0.0;
    }
    return 0.0;
}

double betahat_yosida(const PotentialSpec& spec, double r) {
    require_eps(spec);
    const double eps = spec.eps;
    switch (spec.variant) {
        case Variant::Regular: {
            const double s = yosida_cubic(r, eps);
            const double y = r - eps * s;
            return 0.25 * y * y * y * y + 0.5 * eps * s * s;
        }
        case Variant::Logarithmic: {
            const double s = yosida_log(r, eps);
            const double y = std::tanh(0.5 * s);
            return y * s - 2.0 * log_cosh(0.5 * s) + 0.5 * eps * s * s;
        }
        case Variant::DoubleObstacle: {
            const double d = r - std::clamp(r, -1.0, 1.0);
            return d * d / (2.0 * eps);
        }
    }
    return 0.0;
}

// --- piecewise logarithmic --------------------------------------------------

double beta_piecewise_log(const PotentialSpec& spec, double r) {
    require_log(spec, "piecewise logarithmic regularization");
    require_eps(spec);
    const double a = 1.0 - spec.eps;
    const double ar = std::abs(r);
    if (ar <= a) return std::log1p(r) - std::log1p(-r);
    const double ba = std::log1p(a) - std::log1p(-a);
    const double slope = 2.0 / (spec.eps * (2.0 - spec.eps));
    return std::copysign(ba + slope * (ar - a), r);
}

double beta_piecewise_log_d1(const PotentialSpec& spec, double r) {
    require_log(spec, "piecewise logarithmic regularization");
    require_eps(spec);
    const double a = 1.0 - spec.eps;
    if (std::abs(r) <= a) return 2.0 / ((1.0 - r) * (1.0 + r));
    return 2.0 / (spec.eps * (2.0 - spec.eps));
}

double beta_piecewise_log_d2(const PotentialSpec& spec, double r) {
    require_log(spec, "piecewise logarithmic regularization");
    require_eps(spec);
    const double a = 1.0 - spec.eps;
    if (std::abs(r) <= a) {
        const double u = (1.0 - r) * (1.0 + r);
        return 4.0 * r / (u * u);
    }
    return 0.0;
}

double betahat_piecewise_log(const PotentialSpec& spec, double r) {
    require_log(spec, "piecewise logarithmic regularization");
    require_eps(spec);
    const double a = 1.0 - spec.eps;
    const double ar = std::abs(r);
    if (ar <= a) return betahat_exact(spec, r);
    const double ba = std::log1p(a) - std::log1p(-a);
    const double slope = 2.0 / (spec.eps * (2.0 - spec.eps));
    const double d = ar - a;
    return betahat_exact(spec, a) + ba * d + 0.5 * slope * d * d;
}

// --- dispatch ---------------------------------------------------------------

double beta_reg(const PotentialSpec& spec, double r) {
    switch (spec.reg) {
        case Regularization::None: return beta_exact(spec, r);
        case Regularization::Yosida: return beta_yosida(spec, r);
        case Regularization::PiecewiseLog: return beta_piecewise_log(spec, r);
    }
    return 0.0;
}

double beta_reg_d1(const PotentialSpec& spec, double r) {
    switch (spec.reg) {
        case Regularization::None: return beta_exact_d1(spec, r);
        case Regularization::Yosida: return beta_yosida_d1(spec, r);
        case Regularization::PiecewiseLog: return beta_piecewise_log_d1(spec, r);
    }
    return 0.0;
}

double beta_reg_d2(const PotentialSpec& spec, double r) {
    switch (spec.reg) {
        case Regularization::None:
            switch (spec.variant) {
                case Variant::Regular: return 6.0 * r;
                case Variant::Logarithmic: {
                    if (!(std::abs(r) < 1.0)) throw DomainViolation("logarithmic beta undefined for |r| >= 1");
                    const double u = (1.0 - r) * (1.0 + r);
                    return 4.0 * r / (u * u);
                }
                case Variant::DoubleObstacle:
                    if (!(std::abs(r) < 1.0)) throw DomainViolation("double obstacle beta is not differentiable for |r| >= 1");
                    return 0.0;
            }
            return 0.0;
        case Regularization::Yosida: return beta_yosida_d2(spec, r);
        case Regularization::PiecewiseLog: return beta_piecewise_log_d2(spec, r);
    }
    return 0.0;
}

double betahat(const PotentialSpec& spec, double r) {
    switch (spec.reg) {
        case Regularization::None: return betahat_exact(spec, r);
        case Regularization::Yosida: return betahat_yosida(spec, r);
        case Regularization::PiecewiseLog: return betahat_piecewise_log(spec, r);
    }
    return 0.0;
}

double f_value(const PotentialSpec& spec, double r) { return betahat(spec, r) + pihat(spec, r); }
double f_d1(const PotentialSpec& spec, double r) { return beta_reg(spec, r) + pi(spec, r); }
double f_d2(const PotentialSpec& spec, double r) { return beta_reg_d1(spec, r) + pi_d1(spec, r); }
double f_d3(const PotentialSpec& spec, double r) { return beta_reg_d2(spec, r); }

// --- inequalities -------------------------------------------------------------

ExpBoundReport check_exp_derivative_bound(const PotentialSpec& spec, std::span<const double> samples) {
    require_log(spec, "the exponential derivative bound");
    if (spec.reg != Regularization::PiecewiseLog) {
        throw WrongVariant("the exponential derivative bound is stated for the piecewise logarithmic regularization");
    }
    ExpBoundReport rep;
    rep.max_violation = -kInf;
    for (double r : samples) {
        const double v = beta_piecewise_log_d1(spec, r) - 2.0 * std::exp(std::abs(beta_piecewise_log(spec, r)));
        if (v > rep.max_violation) {
            rep.max_violation = v;
            rep.worst_r = r;
        }
        ++rep.samples;
    }
    return rep;
}

YoungConstants young_exp_constants(double p) {
    if (!(p >= 1.0)) throw InvalidArgument("young_exp_constants requires p >= 1");
    // delta^2 + (1 + p) delta - 1/2 = 0, positive root in cancellation-free form
    const double b = 1.0 + p;
    const double delta = 1.0 / (b + std::sqrt(b * b + 2.0));
    return {delta, 1.0 / delta, (p + delta) * (p + delta) / (4.0 * delta)};
}

double sup_abs_f_d2(const PotentialSpec& spec, double a, double b, int samples) {
    double m = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double r = a + (b - a) * i / (samples - 1);
        m = std::max(m, std::abs(f_d2(spec, r)));
    }
    return m;
}

}  // namespace cho::potentials
