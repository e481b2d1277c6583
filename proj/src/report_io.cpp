#include "fbspec/report_io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef FBSPEC_VERSION
#define FBSPEC_VERSION "unknown"
#endif

namespace fbspec {

namespace fs = std::filesystem;

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string error_csv(const ErrorReport& report) {
    std::ostringstream s;
    s << "level,e_inf,rate\n";
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        s << report.levels[i].level << ',' << format_real(report.levels[i].e_inf) << ',';
        if (i > 0 && i - 1 < report.rates.size() && report.rates[i - 1]) {
            s << format_real(*report.rates[i - 1]);
        }
        s << '\n';
    }
    return s.str();
}

std::string stability_csv(const StabilityReport& report) {
    std::ostringstream s;
    s << "eps,diff,ratio\n";
    for (std::size_t i = 0; i < report.eps_levels.size(); ++i) {
        s << format_real(report.eps_levels[i]) << ',' << format_real(report.diffs[i]) << ',';
        if (i < report.ratios.size() && report.ratios[i]) s << format_real(*report.ratios[i]);
        s << '\n';
    }
    return s.str();
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::ostringstream s;
    s << "t,R,v1";
    for (std::size_t j = 0; j < trajectory.nodes.size(); ++j) s << ",p_node_" << j;
    s << '\n';
    for (const auto& level : trajectory.levels) {
        s << format_real(level.t) << ',' << format_real(level.R) << ',' << format_real(level.v1);
        for (Eigen::Index j = 0; j < level.p_nodes.size(); ++j) {
            s << ',' << format_real(level.p_nodes[j]);
        }
        s << '\n';
    }
    return s.str();
}

std::string meta_path(const std::string& csv_path) {
    fs::path p(csv_path);
    p.replace_extension(".meta");
    return p.string();
}

std::string meta_text(const RunMeta& meta, const std::string& timestamp) {
    std::ostringstream s;
    s << "version = " << version_string() << "\n"
      << "timestamp = " << timestamp << "\n";
    for (const auto& [label, seconds] : meta.wall_seconds) {
        s << "wall_seconds." << label << " = " << format_real(seconds) << "\n";
    }
    for (const auto& [key, value] : meta.notes) s << key << " = " << value << "\n";
    s << "# config\n" << meta.config_text;
    return s.str();
}

std::string version_string() { return FBSPEC_VERSION; }

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void ensure_writable(const std::string& path) {
    if (path.empty()) throw IoError("output path is empty");
    const fs::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory '" + p.parent_path().string() +
                          "': " + ec.message());
        }
    }
    if (fs::is_directory(p, ec)) throw IoError("output path '" + path + "' is a directory");
    std::ofstream probe(path, std::ios::app);
    if (!probe) throw IoError("cannot open '" + path + "' for writing");
}

void write_text(const std::string& path, const std::string& content) {
    ensure_writable(path);
    std::ofstream out(path, std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw IoError("failed writing '" + path + "'");
}

namespace {

void emit(const std::string& csv, const RunMeta& meta, const std::string& path) {
    if (meta_path(path) == path) {
        throw IoError("output path '" + path + "' would collide with its .meta companion");
    }
    write_text(path, csv);
    write_text(meta_path(path), meta_text(meta, utc_timestamp()));
}

}  // namespace

void emit_report(const ErrorReport& report, const RunMeta& meta, const std::string& path) {
    emit(error_csv(report), meta, path);
}

void emit_report(const StabilityReport& report, const RunMeta& meta, const std::string& path) {
    emit(stability_csv(report), meta, path);
}

void emit_report(const Trajectory& trajectory, const RunMeta& meta, const std::string& path) {
    emit(trajectory_csv(trajectory), meta, path);
}

}  // namespace fbspec
