#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fbspec/model.hpp"

namespace fbspec {

enum class Command { solve, mms, time_study, space_study, stability, self_convergence };
enum class CaseName { example1, example2, base_model };

std::string to_string(Command c);
std::string to_string(CaseName c);

/// Invalid configuration; the message names each offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Command command = Command::solve;
    CaseName case_name = CaseName::example1;
    int N = 20;
    int M = 100;
    double T = 1.0;
    std::vector<int> M_list{100, 200, 1000};
    std::vector<int> N_list{10, 20, 100};
    int N_ref = 600;
    int M_ref = 20000;
    std::vector<double> eps_list{1e-6, 1e-8, 1e-10};
    int stride = 1;
    std::string out;
    bool paper_literal = false;
    bool relax_admissibility = false;
    ModelParams params = ModelParams::reference_set();
};

/// Applies one key=value setting. Model parameters are addressed by their
/// field name (w1, D_p, ...). Throws ConfigError for unknown keys and
/// malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parses flat `key = value` text; `#` starts a comment, lists are written
/// `[a, b, c]`. Settings are applied on top of `base`.
RunConfig parse_config_text(const std::string& text, const RunConfig& base = {},
                            const std::string& source = "config");

/// Reads and parses a config file. Throws ConfigError when it cannot be read.
RunConfig parse_config_file(const std::string& path, const RunConfig& base = {});

/// Every violated constraint, one message each; empty when valid.
std::vector<std::string> config_violations(const RunConfig& cfg);

/// Throws ConfigError listing every violation.
void validate_config(const RunConfig& cfg);

/// key=value text that parses back to an identical config.
std::string to_text(const RunConfig& cfg);

}  // namespace fbspec
