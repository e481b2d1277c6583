#include "fbspec/cli.hpp"

#include <chrono>
#include <cstdio>
#include <string>

#include "fbspec/mms.hpp"
#include "fbspec/report_io.hpp"

namespace fbspec {

namespace {

MMSCase mms_case(const RunConfig& cfg) {
    switch (cfg.case_name) {
        case CaseName::example1: return example1(cfg.paper_literal, cfg.params);
        case CaseName::example2: return example2(cfg.params);
        case CaseName::base_model: break;
    }
    throw ConfigError("case: base-model has no manufactured solution");
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", x);
    return buf;
}

RunMeta base_meta(const RunConfig& cfg, double total_seconds) {
    RunMeta meta;
    meta.config_text = to_text(cfg);
    meta.wall_seconds.emplace_back("total", total_seconds);
    return meta;
}

void add_levels(RunMeta& meta, const ErrorReport& report) {
    for (const auto& l : report.levels) {
        const auto tag = "level_" + std::to_string(l.level);
        meta.wall_seconds.emplace_back(tag, l.wall_seconds);
        if (!l.completed) meta.notes.emplace_back("failure." + tag, l.failure);
        if (l.reference_limited) meta.notes.emplace_back("reference_limited." + tag, "true");
    }
}

template <typename Report>
void deliver(const RunConfig& cfg, const Report& report, const RunMeta& meta,
             const std::string& csv, std::ostream& out, std::ostream& log) {
    if (cfg.out.empty()) {
        out << csv;
        return;
    }
    emit_report(report, meta, cfg.out);
    log << "wrote " << cfg.out << " and " << meta_path(cfg.out) << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int study_exit(const ErrorReport& report) {
    for (const auto& l : report.levels) {
        if (!l.completed) return exit_solver;
    }
    return exit_ok;
}

void log_study(const ErrorReport& report, std::ostream& log) {
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        const auto& l = report.levels[i];
        log << (report.axis == "space" ? "N=" : "M=") << l.level << "  E_inf=" << sci(l.e_inf);
        if (i > 0 && report.rates[i - 1]) log << "  rate=" << format_real(*report.rates[i - 1]);
        if (!l.completed) log << "  FAILED: " << l.failure;
        if (l.reference_limited) log << "  (reference-limited)";
        log << "\n";
    }
}

}  // namespace

StudyCase build_case(const RunConfig& cfg) {
    StudyCase c;
    Admissibility mode = Admissibility::relaxed;
    if (cfg.case_name == CaseName::base_model) {
        c = base_model_case(cfg.params);
        if (!cfg.relax_admissibility) mode = Admissibility::strict;
    } else {
        c = study_case(mms_case(cfg));
    }
    try {
        cfg.params.validate(mode);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    validate_config(cfg);
    const auto c = build_case(cfg);
    if (!cfg.out.empty()) ensure_writable(cfg.out);
    const auto start = std::chrono::steady_clock::now();

    switch (cfg.command) {
        case Command::solve:
        case Command::mms: {
            if (cfg.command == Command::mms) {
                const auto r = verify_case(mms_case(cfg), 1000);
                log << "residuals over " << r.samples << " samples: parabolic=" << sci(r.parabolic)
                    << " velocity=" << sci(r.velocity) << " radius=" << sci(r.radius)
                    << " neumann=" << sci(r.neumann) << " v(-1)=" << sci(r.velocity_bc) << "\n";
            }
            const auto result = run(make_run_spec(c, cfg.N, cfg.M, cfg.T, cfg.stride));
            auto meta = base_meta(cfg, seconds_since(start));
            meta.notes.emplace_back("completed", result.report.completed ? "true" : "false");
            meta.notes.emplace_back("steps_taken", std::to_string(result.report.steps_taken));
            meta.notes.emplace_back("max_condition", format_real(result.report.max_condition));
            meta.notes.emplace_back("velocity_fallbacks",
                                    std::to_string(result.report.velocity_fallbacks));
            if (c.exact_p) {
                const double e = e_infinity(result.trajectory, c.exact_p);
                meta.notes.emplace_back("e_inf", format_real(e));
                log << "E_inf against the exact solution: " << sci(e) << "\n";
            }
            if (!result.trajectory.levels.empty()) {
                const auto& last = result.trajectory.levels.back();
                log << "t=" << last.t << "  R=" << format_real(last.R)
                    << "  v(1)=" << format_real(last.v1) << "\n";
            }
            deliver(cfg, result.trajectory, meta, trajectory_csv(result.trajectory), out, log);
            if (!result.report.completed) {
                log << "terminated: " << result.report.message << "\n";
                return exit_solver;
            }
            return exit_ok;
        }
        case Command::time_study: {
            const auto report = time_refinement_study(c, cfg.N, cfg.M_list, cfg.T);
            auto meta = base_meta(cfg, seconds_since(start));
            add_levels(meta, report);
            log_study(report, log);
            deliver(cfg, report, meta, error_csv(report), out, log);
            return study_exit(report);
        }
        case Command::space_study: {
            const auto report = space_refinement_study(c, cfg.M, cfg.N_list, cfg.N_ref, cfg.T);
            auto meta = base_meta(cfg, seconds_since(start));
            add_levels(meta, report);
            log_study(report, log);
            deliver(cfg, report, meta, error_csv(report), out, log);
            return study_exit(report);
        }
        case Command::self_convergence: {
            const auto report = self_convergence_study(c, cfg.M_list, cfg.M_ref, cfg.N, cfg.T);
            auto meta = base_meta(cfg, seconds_since(start));
            add_levels(meta, report);
            log_study(report, log);
            deliver(cfg, report, meta, error_csv(report), out, log);
            return study_exit(report);
        }
        case Command::stability: {
            const auto report = stability_study(c, cfg.eps_list, cfg.M, cfg.N, cfg.T);
            const auto meta = base_meta(cfg, seconds_since(start));
            for (std::size_t i = 0; i < report.eps_levels.size(); ++i) {
                log << "eps=" << sci(report.eps_levels[i]) << "  diff=" << sci(report.diffs[i]);
                if (report.ratios[i]) log << "  ratio=" << format_real(*report.ratios[i]);
                log << "\n";
            }
            deliver(cfg, report, meta, stability_csv(report), out, log);
            return exit_ok;
        }
    }
    return exit_ok;
}

}  // namespace fbspec
