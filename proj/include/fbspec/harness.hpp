#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbspec/mms.hpp"
#include "fbspec/stepper.hpp"

namespace fbspec {

/// Everything a study needs to launch runs of one problem.
struct StudyCase {
    std::string name;
    ModelParams params;
    InitialData initial;
    Sources sources;
    ScalarField exact_p;  // empty when no closed form exists
    BootstrapMode bootstrap = BootstrapMode::extrapolated_euler;
    SchemeOptions options;
};

/// Manufactured case; uses the exact bootstrap by default.
StudyCase study_case(const MMSCase& c, BootstrapMode bootstrap = BootstrapMode::exact);

/// Initial volume fraction of the unforced model: 0.7 + 0.2 (2 r^2 - r^4) with
/// r = (rho + 1)/2. Even in r (smooth at the centre), lies in [0.7, 0.9] and
/// satisfies the Neumann conditions.
double base_model_profile(double rho);

/// The unforced tumour model (no sources, no exact solution).
StudyCase base_model_case(const ModelParams& params);

RunSpec make_run_spec(const StudyCase& c, int N, int M, double T, int stride = 1);

/// max over retained levels and Gauss nodes of |exact - numeric|.
double e_infinity(const Trajectory& numeric, const ScalarField& exact);

/// max over the levels of `numeric` and its Gauss nodes of the difference to
/// `reference`. The reference may use a finer time grid (its step count must
/// be a multiple of numeric's, with every needed level retained) and a
/// different N (its expansion is evaluated at numeric's nodes). Throws
/// std::invalid_argument for incommensurate grids.
double e_infinity(const Trajectory& numeric, const Trajectory& reference);

/// s = log(e2/e1) / log(n1/n2). Throws std::invalid_argument when an error
/// is not positive or n1 == n2.
double convergence_rate(double e1, double e2, double n1, double n2);

struct ErrorLevel {
    int level = 0;  // M or N
    double e_inf = 0.0;
    double wall_seconds = 0.0;
    bool completed = true;
    std::string failure;
    bool reference_limited = false;  // within 10x of the reference's own error estimate
};

struct ErrorReport {
    std::string axis;  // "time" or "space"
    std::string case_name;
    std::vector<ErrorLevel> levels;
    std::vector<std::optional<double>> rates;  // size levels - 1; absent when undefined
};

struct StabilityReport {
    std::vector<double> eps_levels;
    std::vector<double> diffs;
    std::vector<std::optional<double>> ratios;  // diff / eps, absent for eps == 0
};

struct StudyOptions {
    bool parallel = true;
    /// Errors at or below this are roundoff; rates touching them are absent.
    double rate_floor = 1e-11;
};

/// E-inf against the exact solution for each M at fixed N.
ErrorReport time_refinement_study(const StudyCase& c, int N, const std::vector<int>& Ms, double T,
                                  const StudyOptions& opt = {});

/// E-inf against an N_ref run for each N at fixed M.
ErrorReport space_refinement_study(const StudyCase& c, int M, const std::vector<int>& Ns,
                                   int N_ref, double T, const StudyOptions& opt = {});

/// E-inf against a fine M_ref run for each M at fixed N.
ErrorReport self_convergence_study(const StudyCase& c, const std::vector<int>& Ms, int M_ref,
                                   int N, double T, const StudyOptions& opt = {});

/// Base run against runs with constant eps added to the right sides of the
/// AD-cell and velocity equations.
StabilityReport stability_study(const StudyCase& c, const std::vector<double>& eps, int M, int N,
                                double T, const StudyOptions& opt = {});

}  // namespace fbspec
