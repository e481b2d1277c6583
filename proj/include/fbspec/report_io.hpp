#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fbspec/harness.hpp"

namespace fbspec {

/// File-system failure; the message names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits; parses back to the same double.
std::string format_real(double x);

/// `level,e_inf,rate`; rate is blank on the first row and when undefined.
std::string error_csv(const ErrorReport& report);

/// `eps,diff,ratio`; ratio is blank for eps = 0.
std::string stability_csv(const StabilityReport& report);

/// `t,R,v1,p_node_0..p_node_N`, one row per retained level.
std::string trajectory_csv(const Trajectory& trajectory);

/// Everything recorded in the `.meta` companion besides the timestamp.
struct RunMeta {
    std::string config_text;
    std::vector<std::pair<std::string, double>> wall_seconds;
    std::vector<std::pair<std::string, std::string>> notes;
};

/// Same basename with a `.meta` suffix: out/a.csv -> out/a.meta.
std::string meta_path(const std::string& csv_path);

std::string meta_text(const RunMeta& meta, const std::string& timestamp);

/// git-describe string baked in at configure time.
std::string version_string();

/// Current UTC time, ISO 8601.
std::string utc_timestamp();

/// Creates parent directories and checks that `path` can be opened for
/// writing. Throws IoError.
void ensure_writable(const std::string& path);

/// Writes `content` to `path`. Throws IoError.
void write_text(const std::string& path, const std::string& content);

/// Writes the CSV and its `.meta` companion.
void emit_report(const ErrorReport& report, const RunMeta& meta, const std::string& path);
void emit_report(const StabilityReport& report, const RunMeta& meta, const std::string& path);
void emit_report(const Trajectory& trajectory, const RunMeta& meta, const std::string& path);

}  // namespace fbspec
