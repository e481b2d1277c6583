#include "fbspec/mms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

namespace fbspec {

namespace {

// Five-point central stencils.
template <typename F>
double d1(F&& f, double x, double h) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

template <typename F>
double d2(F&& f, double x, double h) {
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) /
           (12 * h * h);
}

constexpr double kStepT = 1e-3;
constexpr double kStepRho = 1e-2;
constexpr double kStepFlux = 1e-3;

}  // namespace

InitialData MMSCase::initial() const {
    InitialData init;
    auto p = exact_p;
    init.p0 = [p](double rho) { return p(rho, 0.0); };
    init.R0 = exact_R(0.0);
    init.exact_p = exact_p;
    init.exact_R = exact_R;
    return init;
}

MMSCase make_case(std::string name, const ModelParams& params, const ExactFields& f) {
    MMSCase c;
    c.name = std::move(name);
    c.params = params;
    c.exact_p = f.p;
    c.exact_v = f.v;
    c.exact_R = f.R;
    c.source_p = [f, params](double rho, double t) {
        const double R = f.R(t);
        const double advect = (rho + 1.0) * f.v(1.0, t) / R * f.p_r(rho, t);
        const double diffuse =
            4.0 * params.D_p / (R * R) * (f.p_rr(rho, t) + 2.0 * f.p_r_over(rho, t));
        return f.p_t(rho, t) - advect - diffuse - reaction_f(f.p(rho, t), t, params);
    };
    c.source_v = [f, params](double rho, double t) {
        const double s = rho + 1.0;
        const double p = f.p(rho, t);
        const double v = f.v(rho, t);
        const double flux_derivative = 2.0 * s * v * p + s * s * (f.v_r(rho, t) * p + v * f.p_r(rho, t));
        return flux_derivative - velocity_rhs(p, rho, f.R(t), t, params);
    };
    c.source_R = [f](double t) { return f.R_t(t) - f.v(1.0, t); };
    return c;
}

MMSCase example1(bool paper_literal, const ModelParams& params) {
    const double scale = std::exp(2.0) + 1.0;
    ExactFields f;
    f.p = [](double r, double t) { return (std::exp(t) + 1.0) * (r * r * r / 3.0 - r); };
    f.p_t = [](double r, double t) { return std::exp(t) * (r * r * r / 3.0 - r); };
    f.p_r = [](double r, double t) { return (std::exp(t) + 1.0) * (r * r - 1.0); };
    f.p_rr = [](double r, double t) { return 2.0 * (std::exp(t) + 1.0) * r; };
    f.p_r_over = [](double r, double t) { return (std::exp(t) + 1.0) * (r - 1.0); };
    // v(-1, t) = -2 / (scale (t+1)^2); the corrected field subtracts it.
    const double shift = paper_literal ? 1.0 : -1.0;
    f.v = [scale, shift](double r, double t) {
        return -(std::exp(r + 1.0) + shift) / (scale * (t + 1.0) * (t + 1.0));
    };
    f.v_r = [scale](double r, double t) {
        return -std::exp(r + 1.0) / (scale * (t + 1.0) * (t + 1.0));
    };
    f.R = [](double t) { return 1.0 / (t + 1.0); };
    f.R_t = [](double t) { return -1.0 / ((t + 1.0) * (t + 1.0)); };
    return make_case(paper_literal ? "example1-literal" : "example1", params, f);
}

MMSCase example2(const ModelParams& params) {
    constexpr double pi = std::numbers::pi;
    ExactFields f;
    f.p = [](double r, double t) { return std::exp(t) * (r * r * r * r - 2.0 * r * r); };
    f.p_t = f.p;
    f.p_r = [](double r, double t) { return std::exp(t) * (4.0 * r * r * r - 4.0 * r); };
    f.p_rr = [](double r, double t) { return std::exp(t) * (12.0 * r * r - 4.0); };
    f.p_r_over = [](double r, double t) { return 4.0 * std::exp(t) * r * (r - 1.0); };
    f.v = [](double r, double t) {
        return -(std::sin(pi * r / 2.0) + 1.0) / (2.0 * (t + 1.0) * (t + 1.0));
    };
    f.v_r = [](double r, double t) {
        return -(pi / 2.0) * std::cos(pi * r / 2.0) / (2.0 * (t + 1.0) * (t + 1.0));
    };
    f.R = [](double t) { return 1.0 / (t + 1.0); };
    f.R_t = [](double t) { return -1.0 / ((t + 1.0) * (t + 1.0)); };
    return make_case("example2", params, f);
}

ResidualReport verify_case(const MMSCase& c, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rho_dist(-0.95, 0.95);
    std::uniform_real_distribution<double> t_dist(0.01, 1.0);
    const auto& prm = c.params;
    const auto f_R = [&](double t) { return c.source_R ? c.source_R(t) : 0.0; };

    ResidualReport r;
    r.samples = samples;
    r.initial_radius = std::abs(c.exact_R(0.0) - 1.0);
    for (int k = 0; k < samples; ++k) {
        const double rho = rho_dist(rng);
        const double t = t_dist(rng);
        const double R = c.exact_R(t);
        const double p = c.exact_p(rho, t);
        const auto p_of_t = [&](double s) { return c.exact_p(rho, s); };
        const auto p_of_rho = [&](double x) { return c.exact_p(x, t); };

        const double p_t = d1(p_of_t, t, kStepT);
        const double p_r = d1(p_of_rho, rho, kStepRho);
        const double p_rr = d2(p_of_rho, rho, kStepRho);
        const double lhs = p_t - (rho + 1.0) * c.exact_v(1.0, t) / R * p_r -
                           4.0 * prm.D_p / (R * R) * (p_rr + 2.0 * p_r / (rho + 1.0));
        const double rhs = reaction_f(p, t, prm) + c.source_p(rho, t);
        r.parabolic = std::max(r.parabolic, std::abs(lhs - rhs));

        const auto flux = [&](double x) {
            return (x + 1.0) * (x + 1.0) * c.exact_v(x, t) * c.exact_p(x, t);
        };
        const double v_res = d1(flux, rho, kStepFlux) - velocity_rhs(p, rho, R, t, prm) -
                             c.source_v(rho, t);
        r.velocity = std::max(r.velocity, std::abs(v_res));

        const double R_t = d1(c.exact_R, t, kStepT);
        r.radius = std::max(r.radius, std::abs(R_t - c.exact_v(1.0, t) - f_R(t)));

        for (double end : {-1.0, 1.0}) {
            r.neumann = std::max(r.neumann, std::abs(d1(p_of_rho, end, kStepRho)));
        }
        r.velocity_bc = std::max(r.velocity_bc, std::abs(c.exact_v(-1.0, t)));
    }
    return r;
}

}  // namespace fbspec
