#include "fbspec/harness.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace fbspec {

namespace {

/// Runs body(i) for i in [0, count), concurrently when asked; results keep
/// index order.
template <typename Body>
auto map_levels(std::size_t count, bool parallel, Body body) {
    using Result = decltype(body(std::size_t{0}));
    std::vector<Result> out;
    out.reserve(count);
    if (!parallel || count < 2) {
        for (std::size_t i = 0; i < count; ++i) out.push_back(body(i));
        return out;
    }
    std::vector<std::future<Result>> pending;
    pending.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        pending.push_back(std::async(std::launch::async, body, i));
    }
    for (auto& f : pending) out.push_back(f.get());
    return out;
}

void require_increasing(const std::vector<int>& v, const char* what) {
    if (v.empty()) throw std::invalid_argument(std::string(what) + " is empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] <= 0) throw std::invalid_argument(std::string(what) + " entries must be positive");
        if (i > 0 && v[i] <= v[i - 1]) {
            throw std::invalid_argument(std::string(what) + ": list not increasing");
        }
    }
}

ErrorLevel level_from(int level, const RunResult& r, double error) {
    ErrorLevel out;
    out.level = level;
    out.e_inf = error;
    out.wall_seconds = r.report.wall_seconds;
    out.completed = r.report.completed;
    if (!r.report.completed) out.failure = r.report.message;
    return out;
}

void fill_rates(ErrorReport& report, double floor) {
    report.rates.clear();
    for (std::size_t i = 1; i < report.levels.size(); ++i) {
        const auto& a = report.levels[i - 1];
        const auto& b = report.levels[i];
        if (!a.completed || !b.completed || !(a.e_inf > floor) || !(b.e_inf > floor)) {
            report.rates.emplace_back(std::nullopt);
            continue;
        }
        report.rates.emplace_back(convergence_rate(a.e_inf, b.e_inf, a.level, b.level));
    }
}

/// First time level entering E-inf; the initial datum is excluded.
constexpr int kFirstScoredStep = 1;

}  // namespace

StudyCase study_case(const MMSCase& c, BootstrapMode bootstrap) {
    StudyCase s;
    s.name = c.name;
    s.params = c.params;
    s.initial = c.initial();
    s.sources = c.sources();
    s.exact_p = c.exact_p;
    s.bootstrap = bootstrap;
    return s;
}

double base_model_profile(double rho) {
    const double r2 = 0.25 * (rho + 1.0) * (rho + 1.0);
    return 0.7 + 0.2 * (2.0 * r2 - r2 * r2);
}

StudyCase base_model_case(const ModelParams& params) {
    StudyCase s;
    s.name = "base-model";
    s.params = params;
    s.initial.p0 = base_model_profile;
    s.initial.R0 = 1.0;
    s.bootstrap = BootstrapMode::extrapolated_euler;
    return s;
}

RunSpec make_run_spec(const StudyCase& c, int N, int M, double T, int stride) {
    RunSpec spec;
    spec.N = N;
    spec.grid = TimeGrid::make(T, M);
    spec.params = c.params;
    spec.initial = c.initial;
    spec.sources = c.sources;
    spec.bootstrap = c.bootstrap;
    spec.options = c.options;
    spec.stride = stride;
    return spec;
}

double e_infinity(const Trajectory& numeric, const ScalarField& exact) {
    double worst = 0.0;
    for (const auto& level : numeric.levels) {
        if (level.step < kFirstScoredStep) continue;
        for (std::size_t i = 0; i < numeric.nodes.size(); ++i) {
            const double diff =
                std::abs(exact(numeric.nodes[i], level.t) - level.p_nodes[static_cast<Eigen::Index>(i)]);
            worst = std::max(worst, diff);
        }
    }
    return worst;
}

double e_infinity(const Trajectory& numeric, const Trajectory& reference) {
    const double scale = std::max(1.0, std::abs(numeric.grid.T));
    if (std::abs(numeric.grid.T - reference.grid.T) > 1e-12 * scale) {
        throw std::invalid_argument("e_infinity: trajectories cover different final times");
    }
    if (reference.grid.M % numeric.grid.M != 0) {
        throw std::invalid_argument("e_infinity: reference steps (" +
                                    std::to_string(reference.grid.M) + ") not a multiple of " +
                                    std::to_string(numeric.grid.M));
    }
    const int factor = reference.grid.M / numeric.grid.M;
    std::unordered_map<int, std::size_t> by_step;
    for (std::size_t k = 0; k < reference.levels.size(); ++k) by_step[reference.levels[k].step] = k;

    const bool same_nodes = numeric.N == reference.N;
    const TrialBasis ref_basis(reference.N);
    double worst = 0.0;
    for (const auto& level : numeric.levels) {
        if (level.step < kFirstScoredStep) continue;
        const auto it = by_step.find(level.step * factor);
        if (it == by_step.end()) {
            throw std::invalid_argument("e_infinity: reference lacks the level matching step " +
                                        std::to_string(level.step));
        }
        const auto& ref = reference.levels[it->second];
        if (same_nodes) {
            worst = std::max(worst, (level.p_nodes - ref.p_nodes).cwiseAbs().maxCoeff());
            continue;
        }
        const auto legendre = ref_basis.to_legendre(
            std::span<const double>(ref.coeffs.data(), static_cast<std::size_t>(ref.coeffs.size())));
        for (std::size_t i = 0; i < numeric.nodes.size(); ++i) {
            const double r = legendre_series(legendre, numeric.nodes[i]);
            worst = std::max(worst, std::abs(r - level.p_nodes[static_cast<Eigen::Index>(i)]));
        }
    }
    return worst;
}

double convergence_rate(double e1, double e2, double n1, double n2) {
    if (!(e1 > 0.0) || !(e2 > 0.0)) {
        throw std::invalid_argument("convergence_rate: errors must be positive");
    }
    if (n1 == n2) throw std::invalid_argument("convergence_rate: levels must differ");
    return std::log(e2 / e1) / std::log(n1 / n2);
}

ErrorReport time_refinement_study(const StudyCase& c, int N, const std::vector<int>& Ms, double T,
                                  const StudyOptions& opt) {
    require_increasing(Ms, "M list");
    if (!c.exact_p) {
        throw std::invalid_argument("time_refinement_study: case '" + c.name +
                                    "' has no exact solution; use the self-convergence study");
    }
    ErrorReport report;
    report.axis = "time";
    report.case_name = c.name;
    report.levels = map_levels(Ms.size(), opt.parallel, [&](std::size_t i) {
        const auto r = run(make_run_spec(c, N, Ms[i], T));
        return level_from(Ms[i], r, e_infinity(r.trajectory, c.exact_p));
    });
    fill_rates(report, opt.rate_floor);
    return report;
}

ErrorReport space_refinement_study(const StudyCase& c, int M, const std::vector<int>& Ns,
                                   int N_ref, double T, const StudyOptions& opt) {
    require_increasing(Ns, "N list");
    if (N_ref < Ns.back()) {
        throw std::invalid_argument("space_refinement_study: N_ref must be >= every N");
    }
    const auto ref = run(make_run_spec(c, N_ref, M, T));
    if (!ref.report.completed) {
        throw SolverError(ref.report.reason.value_or(TerminalReason::non_finite),
                          ref.report.steps_taken, "reference run failed: " + ref.report.message);
    }
    ErrorReport report;
    report.axis = "space";
    report.case_name = c.name;
    report.levels = map_levels(Ns.size(), opt.parallel, [&](std::size_t i) {
        if (Ns[i] == N_ref) return level_from(Ns[i], ref, 0.0);
        const auto r = run(make_run_spec(c, Ns[i], M, T));
        return level_from(Ns[i], r, e_infinity(r.trajectory, ref.trajectory));
    });
    fill_rates(report, opt.rate_floor);
    return report;
}

ErrorReport self_convergence_study(const StudyCase& c, const std::vector<int>& Ms, int M_ref,
                                   int N, double T, const StudyOptions& opt) {
    require_increasing(Ms, "M list");
    int stride = 0;
    for (int M : Ms) {
        if (M_ref % M != 0) {
            throw std::invalid_argument("self_convergence_study: M_ref must be a multiple of every M");
        }
        stride = std::gcd(stride, M_ref / M);
    }
    const auto ref = run(make_run_spec(c, N, M_ref, T, stride));
    if (!ref.report.completed) {
        throw SolverError(ref.report.reason.value_or(TerminalReason::non_finite),
                          ref.report.steps_taken, "reference run failed: " + ref.report.message);
    }
    ErrorReport report;
    report.axis = "time";
    report.case_name = c.name;
    report.levels = map_levels(Ms.size(), opt.parallel, [&](std::size_t i) {
        if (Ms[i] == M_ref) return level_from(Ms[i], ref, 0.0);
        const auto r = run(make_run_spec(c, N, Ms[i], T));
        return level_from(Ms[i], r, e_infinity(r.trajectory, ref.trajectory));
    });
    fill_rates(report, opt.rate_floor);

    // Second-order extrapolation of the finest level gives the reference's own error.
    const auto& finest = report.levels.back();
    if (finest.completed && finest.level < M_ref) {
        const double ratio = static_cast<double>(finest.level) / M_ref;
        const double ref_error = finest.e_inf * ratio * ratio;
        for (auto& l : report.levels) l.reference_limited = l.e_inf < 10.0 * ref_error;
    }
    return report;
}

StabilityReport stability_study(const StudyCase& c, const std::vector<double>& eps, int M, int N,
                                double T, const StudyOptions& opt) {
    for (double e : eps) {
        if (!(e >= 0.0)) throw std::invalid_argument("stability_study: eps must be >= 0");
    }
    const auto base = run(make_run_spec(c, N, M, T));
    if (!base.report.completed) {
        throw SolverError(base.report.reason.value_or(TerminalReason::non_finite),
                          base.report.steps_taken, "base run failed: " + base.report.message);
    }
    StabilityReport report;
    report.eps_levels = eps;
    report.diffs = map_levels(eps.size(), opt.parallel, [&](std::size_t i) {
        const double e = eps[i];
        if (e == 0.0) return 0.0;
        StudyCase perturbed = c;
        const auto shift = [e](const ScalarField& f) -> ScalarField {
            if (!f) return [e](double, double) { return e; };
            return [f, e](double rho, double t) { return f(rho, t) + e; };
        };
        perturbed.sources.parabolic = shift(c.sources.parabolic);
        perturbed.sources.velocity = shift(c.sources.velocity);
        const auto r = run(make_run_spec(perturbed, N, M, T));
        if (!r.report.completed) {
            throw SolverError(r.report.reason.value_or(TerminalReason::non_finite),
                              r.report.steps_taken, "perturbed run failed: " + r.report.message);
        }
        return e_infinity(r.trajectory, base.trajectory);
    });
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (eps[i] > 0.0) {
            report.ratios.emplace_back(report.diffs[i] / eps[i]);
        } else {
            report.ratios.emplace_back(std::nullopt);
        }
    }
    return report;
}

}  // namespace fbspec
