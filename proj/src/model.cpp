#include "fbspec/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fbspec {

namespace {

struct Field {
    const char* name;
    double ModelParams::*member;
};

constexpr Field kFields[] = {
    {"w1", &ModelParams::w1},         {"w2", &ModelParams::w2},
    {"delta1", &ModelParams::delta1}, {"delta2", &ModelParams::delta2},
    {"theta1", &ModelParams::theta1}, {"K", &ModelParams::K},
    {"a_s", &ModelParams::a_s},       {"b", &ModelParams::b},
    {"beta1", &ModelParams::beta1},   {"D_p", &ModelParams::D_p},
    {"I", &ModelParams::I},
};

double saturation(double a, const ModelParams& p) { return a / (a + p.K); }

}  // namespace

std::vector<std::string> ModelParams::violations(Admissibility mode) const {
    std::vector<std::string> out;
    for (const auto& f : kFields) {
        if (!std::isfinite(this->*f.member)) out.push_back(std::string(f.name) + " is not finite");
    }
    if (!(a_s >= 0.0 && a_s < 1.0)) out.emplace_back("0 <= a_s < 1");
    if (!(theta1 >= 0.0 && theta1 < 1.0)) out.emplace_back("0 <= theta1 < 1");
    if (!(delta1 < delta2)) out.emplace_back("delta1 < delta2");
    if (mode == Admissibility::strict) {
        if (!(w2 < 1.0)) out.emplace_back("w2 < 1");
        if (!(w1 > 1.0)) out.emplace_back("w1 > 1");
    }
    if (!(I >= 0.0 && I <= 1.0)) out.emplace_back("0 <= I <= 1");
    if (!(D_p > 0.0)) out.emplace_back("D_p > 0");
    if (!(K > 0.0)) out.emplace_back("K > 0");
    if (!(b > 0.0)) out.emplace_back("b > 0");
    return out;
}

void ModelParams::validate(Admissibility mode) const {
    const auto v = violations(mode);
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "inadmissible model parameters:";
    for (const auto& s : v) msg << " [" << s << "]";
    if (mode == Admissibility::strict) msg << " (use relaxed admissibility for the w1/w2 bounds)";
    throw std::invalid_argument(msg.str());
}

void ModelParams::set(const std::string& name, double value) {
    for (const auto& f : kFields) {
        if (name == f.name) {
            this->*f.member = value;
            return;
        }
    }
    throw std::invalid_argument("unknown model parameter '" + name + "'");
}

double ModelParams::get(const std::string& name) const {
    for (const auto& f : kFields) {
        if (name == f.name) return this->*f.member;
    }
    throw std::invalid_argument("unknown model parameter '" + name + "'");
}

const std::vector<std::string>& ModelParams::names() {
    static const std::vector<std::string> all = [] {
        std::vector<std::string> v;
        for (const auto& f : kFields) v.emplace_back(f.name);
        return v;
    }();
    return all;
}

double androgen(double t, const ModelParams& p) { return std::exp(-p.b * t) + p.a_s; }

double alpha_p(double a, const ModelParams& p) {
    return p.theta1 + (1.0 - p.theta1) * saturation(a, p);
}

double delta_p(double a, const ModelParams& p) {
    return p.delta1 * (p.w1 + (1.0 - p.w1) * saturation(a, p));
}

double delta_q(double a, const ModelParams& p) {
    return p.delta2 * (p.w2 + (1.0 - p.w2) * saturation(a, p));
}

double beta_mut(double a, const ModelParams& p) { return p.beta1 * (1.0 - a / (1.0 + p.a_s)); }

double reaction_f(double p_val, double t, const ModelParams& params) {
    const double a = androgen(t, params);
    return 1.0 - p_val - delta_p(a, params) * (1.0 - p_val) -
           (1.0 - params.I) * beta_mut(a, params) * p_val;
}

double velocity_rhs(double p_val, double rho, double R, double t, const ModelParams& params) {
    const double a = androgen(t, params);
    const double growth = alpha_p(a, params) * p_val + 1.0 - p_val -
                          delta_p(a, params) * p_val - delta_q(a, params) * (1.0 - p_val);
    const double s = rho + 1.0;
    return 0.5 * R * s * s * growth;
}

}  // namespace fbspec
