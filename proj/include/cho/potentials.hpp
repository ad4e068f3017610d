#pragma once

#include <span>
#include <string>

#include "cho/errors.hpp"

/// Double-well potentials split as f = betahat + pihat with betahat convex,
/// beta = betahat' monotone and pi = pihat' Lipschitz, together with the
/// single-valued regularizations of beta used by the solvers.
///
///   Regular          f(r) = (r^2 - 1)^2 / 4,       beta = r^3,                 pi = -r
///   Logarithmic      f(r) = (1+r)ln(1+r) + (1-r)ln(1-r) - c1 r^2,
///                    beta = ln((1+r)/(1-r)) on (-1,1), pi = -2 c1 r
///   DoubleObstacle   f(r) = I_[-1,1](r) - c2 r^2,  beta = subdifferential of the indicator,
///                    pi = -2 c2 r
namespace cho::potentials {

enum class Variant { Regular, Logarithmic, DoubleObstacle };

/// Which single-valued stand-in for beta the solvers use. `None` means the
/// exact beta (only meaningful away from the singular set).
enum class Regularization { None, Yosida, PiecewiseLog };

struct PotentialSpec {
    Variant variant = Variant::Regular;
    double c1 = 2.0;
    double c2 = 1.0;
    double eps = 0.01;
    Regularization reg = Regularization::None;
    /// Stabilization constant S of the semi-implicit scheme.
    double stabilization = 0.0;

    /// Throws ValidationError naming the violated constraint.
    void validate() const;

    [[nodiscard]] bool singular() const noexcept { return variant != Variant::Regular; }

    static PotentialSpec regular(double stabilization = 0.0);
    static PotentialSpec logarithmic(double c1, double eps, Regularization reg, double stabilization = 0.0);
    static PotentialSpec double_obstacle(double c2, double eps, double stabilization = 0.0);
};

[[nodiscard]] std::string to_string(Variant v);
[[nodiscard]] std::string to_string(Regularization r);

// Exact convex part. Throw DomainViolation outside the interior of D(beta).
[[nodiscard]] double beta_exact(const PotentialSpec& spec, double r);
[[nodiscard]] double beta_exact_d1(const PotentialSpec& spec, double r);
[[nodiscard]] double betahat_exact(const PotentialSpec& spec, double r);

// Smooth perturbation.
[[nodiscard]] double pihat(const PotentialSpec& spec, double r);
[[nodiscard]] double pi(const PotentialSpec& spec, double r);
[[nodiscard]] double pi_d1(const PotentialSpec& spec, double r);

// The regularization of beta selected by spec.reg, its derivatives and primitive.
[[nodiscard]] double beta_reg(const PotentialSpec& spec, double r);
[[nodiscard]] double beta_reg_d1(const PotentialSpec& spec, double r);
[[nodiscard]] double beta_reg_d2(const PotentialSpec& spec, double r);
/// Primitive of beta_reg vanishing at 0 (closed form for every variant).
[[nodiscard]] double betahat(const PotentialSpec& spec, double r);

// f = betahat_reg + pihat and its derivatives.
[[nodiscard]] double f_value(const PotentialSpec& spec, double r);
[[nodiscard]] double f_d1(const PotentialSpec& spec, double r);
[[nodiscard]] double f_d2(const PotentialSpec& spec, double r);
[[nodiscard]] double f_d3(const PotentialSpec& spec, double r);

/// Moreau-Yosida regularization: the unique s with s = beta(r - eps s).
/// Safeguarded Newton with bisection fallback, run to a few ulps, at most 200
/// iterations; ConvergenceFailure otherwise.
[[nodiscard]] double beta_yosida(const PotentialSpec& spec, double r);
[[nodiscard]] double beta_yosida_d1(const PotentialSpec& spec, double r);
[[nodiscard]] double beta_yosida_d2(const PotentialSpec& spec, double r);
/// Moreau envelope of betahat: betahat(r - eps s) + eps s^2 / 2.
[[nodiscard]] double betahat_yosida(const PotentialSpec& spec, double r);

/// C1 odd regularization of the logarithmic beta: exact on [0, 1-eps], affine
/// continuation with slope beta'(1-eps) beyond. WrongVariant unless the
/// variant is Logarithmic.
[[nodiscard]] double beta_piecewise_log(const PotentialSpec& spec, double r);
[[nodiscard]] double beta_piecewise_log_d1(const PotentialSpec& spec, double r);
[[nodiscard]] double beta_piecewise_log_d2(const PotentialSpec& spec, double r);
[[nodiscard]] double betahat_piecewise_log(const PotentialSpec& spec, double r);

struct ExpBoundReport {
    double max_violation = 0.0;  ///< max of beta_eps'(r) - 2 exp(|beta_eps(r)|)
    double worst_r = 0.0;
    int samples = 0;
};

/// Evaluates beta_eps'(r) <= 2 exp(|beta_eps(r)|) at the given points.
/// Requires Logarithmic with PiecewiseLog.
[[nodiscard]] ExpBoundReport check_exp_derivative_bound(const PotentialSpec& spec,
                                                        std::span<const double> samples);

struct YoungConstants {
    double delta;
    double kappa;
    double kappa_prime;
};

/// Constants for r s e^{ps} <= s^2 e^{ps} / 2 + e^{kappa r} + kappa' (r, s >= 0):
/// delta solves delta (1 + p + delta) = 1/2, kappa = 1/delta,
/// kappa' = (p + delta)^2 / (4 delta). Requires p >= 1.
[[nodiscard]] YoungConstants young_exp_constants(double p);

/// sup |f''| over [a, b] by dense sampling (used for the default
/// stabilization constant).
[[nodiscard]] double sup_abs_f_d2(const PotentialSpec& spec, double a, double b, int samples = 4001);

/// Lipschitz constant of pi.
[[nodiscard]] double pi_lipschitz(const PotentialSpec& spec);

/// Interior of D(beta): (-inf, inf) for Regular, (-1, 1) otherwise.
[[nodiscard]] double domain_bound(const PotentialSpec& spec);

}  // namespace cho::potentials
