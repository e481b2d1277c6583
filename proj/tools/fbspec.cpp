#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fbspec/cli.hpp"
#include "fbspec/report_io.hpp"

using namespace fbspec;

int main(int argc, char** argv) {
    CLI::App app{"Front-fixed spectral solver for a prostate-tumour free-boundary model"};
    app.set_version_flag("--version", version_string());

    std::string command;
    std::string config_file;
    std::optional<int> N, M, stride;
    std::optional<double> T;
    std::optional<std::string> case_name, out;
    bool paper_literal = false;
    bool relax = false;
    std::vector<std::string> params;

    app.add_option("command", command,
                   "solve | mms | time-study | space-study | stability | self-convergence")
        ->required();
    app.add_option("--config", config_file, "key=value config file");
    app.add_option("--N", N, "polynomial degree");
    app.add_option("--M", M, "number of time steps");
    app.add_option("--T", T, "final time");
    app.add_option("--case", case_name, "example1 | example2 | base-model");
    app.add_option("--out", out, "CSV output path (a .meta file is written next to it)");
    app.add_option("--stride", stride, "keep every stride-th time level");
    app.add_flag("--paper-literal", paper_literal, "Example 1 with the velocity as printed");
    app.add_flag("--relax-admissibility", relax, "allow w1 <= 1 or w2 >= 1 for the base model");
    app.add_option("--param", params, "key=value override of any config key, repeatable");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        RunConfig cfg;
        if (!config_file.empty()) cfg = parse_config_file(config_file);
        apply_setting(cfg, "command", command);
        if (N) cfg.N = *N;
        if (M) cfg.M = *M;
        if (T) cfg.T = *T;
        if (stride) cfg.stride = *stride;
        if (case_name) apply_setting(cfg, "case", *case_name);
        if (out) cfg.out = *out;
        if (paper_literal) cfg.paper_literal = true;
        if (relax) cfg.relax_admissibility = true;
        for (const auto& kv : params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("--param expects key=value, got '" + kv + "'");
            }
            apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        return execute(cfg, std::cout, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return exit_io;
    } catch (const SolverError& e) {
        std::cerr << "solver stopped: " << e.what() << "\n";
        return exit_solver;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_solver;
    }
}
