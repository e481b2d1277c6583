#include "fbspec/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "fbspec/report_io.hpp"

namespace fbspec {

namespace {

constexpr std::array<std::pair<Command, const char*>, 6> kCommands{{
    {Command::solve, "solve"},
    {Command::mms, "mms"},
    {Command::time_study, "time-study"},
    {Command::space_study, "space-study"},
    {Command::stability, "stability"},
    {Command::self_convergence, "self-convergence"},
}};

constexpr std::array<std::pair<CaseName, const char*>, 3> kCases{{
    {CaseName::example1, "example1"},
    {CaseName::example2, "example2"},
    {CaseName::base_model, "base-model"},
}};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string bad_value(const std::string& key, const std::string& value, const char* expected) {
    return "invalid value '" + value + "' for key '" + key + "': expected " + expected;
}

int to_int(const std::string& key, const std::string& text) {
    const auto s = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ConfigError(bad_value(key, text, "an integer"));
    }
    return v;
}

double to_real(const std::string& key, const std::string& text) {
    const auto s = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError(bad_value(key, text, "a real number"));
    }
    if (used != s.size() || !std::isfinite(v)) {
        throw ConfigError(bad_value(key, text, "a finite real number"));
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& text) {
    const auto s = trim(text);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(bad_value(key, text, "true or false"));
}

std::vector<std::string> split_list(const std::string& key, const std::string& text) {
    const auto s = trim(text);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
        throw ConfigError(bad_value(key, text, "a list [a, b, ...]"));
    }
    std::vector<std::string> items;
    const auto body = trim(s.substr(1, s.size() - 2));
    if (body.empty()) return items;
    std::stringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) items.push_back(trim(item));
    return items;
}

std::vector<int> to_int_list(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split_list(key, text)) out.push_back(to_int(key, item));
    return out;
}

std::vector<double> to_real_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(key, text)) out.push_back(to_real(key, item));
    return out;
}

template <typename T>
std::string list_text(const std::vector<T>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        if constexpr (std::is_floating_point_v<T>) {
            s += format_real(v[i]);
        } else {
            s += std::to_string(v[i]);
        }
    }
    return s + "]";
}

template <typename T>
void check_list(std::vector<std::string>& out, const char* key, const std::vector<T>& v,
                bool allow_zero, bool increasing) {
    if (v.empty()) {
        out.push_back(std::string(key) + ": list is empty");
        return;
    }
    for (const auto x : v) {
        if (x < 0 || (!allow_zero && x == 0)) {
            out.push_back(std::string(key) + ": entries must be positive");
            break;
        }
    }
    for (std::size_t i = 1; increasing && i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) {
            out.push_back(std::string(key) + ": list not increasing");
            break;
        }
    }
}

}  // namespace

std::string to_string(Command c) {
    for (const auto& [k, name] : kCommands) {
        if (k == c) return name;
    }
    return "?";
}

std::string to_string(CaseName c) {
    for (const auto& [k, name] : kCases) {
        if (k == c) return name;
    }
    return "?";
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
    const auto key = trim(raw_key);
    const auto v = trim(value);
    if (key == "command") {
        for (const auto& [k, name] : kCommands) {
            if (v == name) {
                cfg.command = k;
                return;
            }
        }
        throw ConfigError(bad_value(key, value,
                                    "one of solve, mms, time-study, space-study, stability, "
                                    "self-convergence"));
    }
    if (key == "case") {
        for (const auto& [k, name] : kCases) {
            if (v == name) {
                cfg.case_name = k;
                return;
            }
        }
        throw ConfigError(bad_value(key, value, "one of example1, example2, base-model"));
    }
    if (key == "N") { cfg.N = to_int(key, v); return; }
    if (key == "M") { cfg.M = to_int(key, v); return; }
    if (key == "T") { cfg.T = to_real(key, v); return; }
    if (key == "M_list") { cfg.M_list = to_int_list(key, v); return; }
    if (key == "N_list") { cfg.N_list = to_int_list(key, v); return; }
    if (key == "N_ref") { cfg.N_ref = to_int(key, v); return; }
    if (key == "M_ref") { cfg.M_ref = to_int(key, v); return; }
    if (key == "eps_list") { cfg.eps_list = to_real_list(key, v); return; }
    if (key == "stride") { cfg.stride = to_int(key, v); return; }
    if (key == "out") { cfg.out = v; return; }
    if (key == "paper_literal") { cfg.paper_literal = to_bool(key, v); return; }
    if (key == "relax_admissibility") { cfg.relax_admissibility = to_bool(key, v); return; }
    const auto& names = ModelParams::names();
    if (std::find(names.begin(), names.end(), key) != names.end()) {
        cfg.params.set(key, to_real(key, v));
        return;
    }
    throw ConfigError("unknown key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text, const RunConfig& base,
                            const std::string& source) {
    RunConfig cfg = base;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key=value");
        }
        try {
            apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path, const RunConfig& base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), base, path);
}

std::vector<std::string> config_violations(const RunConfig& cfg) {
    std::vector<std::string> out;
    if (cfg.N < 1) out.push_back("N: must be >= 1");
    if (cfg.M < 2) out.push_back("M: must be >= 2");
    if (!(cfg.T > 0.0)) out.push_back("T: must be > 0");
    if (cfg.stride < 1) out.push_back("stride: must be >= 1");
    if (cfg.N_ref < 1) out.push_back("N_ref: must be >= 1");
    if (cfg.M_ref < 2) out.push_back("M_ref: must be >= 2");
    check_list(out, "M_list", cfg.M_list, false, true);
    check_list(out, "N_list", cfg.N_list, false, true);
    check_list(out, "eps_list", cfg.eps_list, true, false);
    if (cfg.paper_literal && cfg.case_name != CaseName::example1) {
        out.push_back("paper_literal: only applies to case example1");
    }
    const bool needs_exact = cfg.command == Command::mms || cfg.command == Command::time_study;
    if (needs_exact && cfg.case_name == CaseName::base_model) {
        out.push_back("case: base-model has no exact solution; use self-convergence");
    }
    if (cfg.command == Command::space_study && !cfg.N_list.empty() &&
        cfg.N_ref < cfg.N_list.back()) {
        out.push_back("N_ref: must be >= every entry of N_list");
    }
    if (cfg.command == Command::self_convergence) {
        for (int M : cfg.M_list) {
            if (M > 0 && cfg.M_ref % M != 0) {
                out.push_back("M_ref: must be a multiple of every entry of M_list");
                break;
            }
        }
    }
    return out;
}

void validate_config(const RunConfig& cfg) {
    const auto v = config_violations(cfg);
    if (v.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& s : v) msg += "\n  " + s;
    throw ConfigError(msg);
}

std::string to_text(const RunConfig& cfg) {
    std::ostringstream s;
    s << "command = " << to_string(cfg.command) << "\n"
      << "case = " << to_string(cfg.case_name) << "\n"
      << "N = " << cfg.N << "\n"
      << "M = " << cfg.M << "\n"
      << "T = " << format_real(cfg.T) << "\n"
      << "M_list = " << list_text(cfg.M_list) << "\n"
      << "N_list = " << list_text(cfg.N_list) << "\n"
      << "N_ref = " << cfg.N_ref << "\n"
      << "M_ref = " << cfg.M_ref << "\n"
      << "eps_list = " << list_text(cfg.eps_list) << "\n"
      << "stride = " << cfg.stride << "\n";
    if (!cfg.out.empty()) s << "out = " << cfg.out << "\n";
    s << "paper_literal = " << (cfg.paper_literal ? "true" : "false") << "\n"
      << "relax_admissibility = " << (cfg.relax_admissibility ? "true" : "false") << "\n";
    for (const auto& name : ModelParams::names()) {
        s << name << " = " << format_real(cfg.params.get(name)) << "\n";
    }
    return s.str();
}

}  // namespace fbspec
