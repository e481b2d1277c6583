#pragma once

#include <cstdint>
#include <string>

#include "fbspec/model.hpp"
#include "fbspec/stepper.hpp"

namespace fbspec {

/// Closed-form fields and the derivatives needed to manufacture sources.
/// `p_r_over` is p_rho / (rho + 1), supplied in closed form so the source is
/// finite at rho = -1.
struct ExactFields {
    ScalarField p, p_t, p_r, p_rr, p_r_over;
    ScalarField v, v_r;
    TimeFunction R, R_t;
};

/// A manufactured-solution problem: exact fields plus the sources that make
/// them satisfy the front-fixed system.
struct MMSCase {
    std::string name;
    ModelParams params;
    ScalarField exact_p;
    ScalarField exact_v;
    TimeFunction exact_R;
    ScalarField source_p;   // f_p
    ScalarField source_v;   // f_v
    TimeFunction source_R;  // dR/dt - v(1, t); zero for source-free radius equations

    Sources sources() const { return {source_p, source_v, source_R}; }
    /// p0 = exact_p(., 0), R0 = exact_R(0), exact closures attached.
    InitialData initial() const;
};

/// Builds a case from closed-form fields; sources are derived from the
/// supplied derivatives:
///   f_p = p_t - (rho+1) v(1,t)/R p_rho - 4 D_p/R^2 (p_rhorho + 2 p_rho/(rho+1)) - f(p)
///   f_v = d/drho((rho+1)^2 v p) - velocity_rhs(p, rho, R, t)
///   f_R = R' - v(1, t)
MMSCase make_case(std::string name, const ModelParams& params, const ExactFields& fields);

/// p = (e^t + 1)(rho^3/3 - rho), R = 1/(t+1),
/// v = -(e^{rho+1} + 1) / ((e^2 + 1)(t+1)^2).
///
/// The printed v does not vanish at rho = -1. By default the case ships
/// v - v(-1, t), which satisfies v(-1) = 0 and needs a radius source;
/// `paper_literal` keeps v as printed (source-free radius equation).
MMSCase example1(bool paper_literal = false,
                 const ModelParams& params = ModelParams::reference_set());

/// p = e^t (rho^4 - 2 rho^2), R = 1/(t+1), v = -(sin(pi rho/2) + 1) / (2 (t+1)^2).
MMSCase example2(const ModelParams& params = ModelParams::reference_set());

struct ResidualReport {
    int samples = 0;
    double parabolic = 0.0;       // max |PDE residual| of the AD-cell equation
    double velocity = 0.0;        // max |residual| of the velocity equation
    double radius = 0.0;          // max |R' - v(1) - f_R|
    double neumann = 0.0;         // max |p_rho(+-1, t)|
    double velocity_bc = 0.0;     // max |v(-1, t)|
    double initial_radius = 0.0;  // |R(0) - 1|
};

/// Residuals of the case at random (rho, t) samples, with every derivative
/// taken by central finite differences of the exact closures. Independent of
/// the closed-form derivatives used to build the sources.
ResidualReport verify_case(const MMSCase& c, int samples, std::uint64_t seed = 20240611);

}  // namespace fbspec
