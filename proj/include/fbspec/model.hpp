#pragma once

#include <string>
#include <vector>

namespace fbspec {

/// Whether ModelParams::validate enforces w2 < 1 < w1. The remaining
/// physical constraints are always enforced.
enum class Admissibility { strict, relaxed };

/// Biological and therapy constants of the tumour model.
struct ModelParams {
    double w1 = 0.35;
    double w2 = 0.1;
    double delta1 = 0.8245;   // 1/day
    double delta2 = 1.035;    // 1/day
    double theta1 = 0.2;
    double K = 1.0;           // androgen half-saturation
    double a_s = 0.0;         // residual androgen level
    double b = 1.0;           // androgen decay rate, 1/day
    double beta1 = 0.1;       // mutation-rate scale, 1/day
    double D_p = 1.0;         // motility, cm^2/day
    double I = 1.0;           // inhibitor intensity in [0, 1]

    /// The literature parameter set used by the verification examples.
    /// It has w1 < 1 and therefore only validates in relaxed mode.
    static ModelParams reference_set() { return {}; }

    /// Names of every violated constraint; empty when admissible.
    std::vector<std::string> violations(Admissibility mode) const;

    /// Throws std::invalid_argument listing each violated constraint.
    void validate(Admissibility mode) const;

    /// Sets a parameter by its field name. Throws std::invalid_argument for
    /// unknown names.
    void set(const std::string& name, double value);
    double get(const std::string& name) const;
    static const std::vector<std::string>& names();
};

/// a(t) = exp(-b t) + a_s
double androgen(double t, const ModelParams& p);

/// theta1 + (1 - theta1) a / (a + K)
double alpha_p(double a, const ModelParams& p);
/// delta1 [w1 + (1 - w1) a / (a + K)]
double delta_p(double a, const ModelParams& p);
/// delta2 [w2 + (1 - w2) a / (a + K)]
double delta_q(double a, const ModelParams& p);
/// beta1 (1 - a / (1 + a_s))
double beta_mut(double a, const ModelParams& p);

/// Reaction term of the AD-cell equation, affine in p_val:
///   1 - p - delta_p(a(t)) (1 - p) - (1 - I) beta(a(t)) p
double reaction_f(double p_val, double t, const ModelParams& params);

/// Right side of the front-fixed velocity equation:
///   R (rho + 1)^2 / 2 [alpha_p p + 1 - p - delta_p p - delta_q (1 - p)]
double velocity_rhs(double p_val, double rho, double R, double t, const ModelParams& params);

}  // namespace fbspec
