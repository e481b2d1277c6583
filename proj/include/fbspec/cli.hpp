#pragma once

#include <ostream>

#include "fbspec/config.hpp"
#include "fbspec/harness.hpp"

namespace fbspec {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_solver = 2, exit_io = 3 };

/// The study case a config selects, with its model parameters checked:
/// manufactured cases in relaxed mode, the base model strictly unless
/// relax_admissibility is set. Throws ConfigError.
StudyCase build_case(const RunConfig& cfg);

/// Runs the configured command. CSV goes to cfg.out (with a `.meta`
/// companion) when set and to `out` otherwise; a short summary goes to `log`.
/// Returns exit_ok, or exit_solver when a run hit a terminal condition.
/// Throws ConfigError, IoError or SolverError.
int execute(const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace fbspec
