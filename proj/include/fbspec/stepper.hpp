#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbspec/model.hpp"
#include "fbspec/polybasis.hpp"

namespace fbspec {

using ScalarField = std::function<double(double rho, double t)>;
using TimeFunction = std::function<double(double t)>;
using Profile = std::function<double(double rho)>;

struct TimeGrid {
    double T = 1.0;
    int M = 2;
    double h = 0.5;
    double h_star = 1.0 / 3.0;  // 2h/3

    /// Throws std::invalid_argument unless T > 0 and M >= 2.
    static TimeGrid make(double T, int M);

    double t(int n) const { return n * h; }
};

/// Optional forcing. Empty members contribute nothing.
struct Sources {
    ScalarField parabolic;  // added to the right side of the AD-cell equation
    ScalarField velocity;   // added to the right side of the velocity equation
    TimeFunction radius;    // added to dR/dt
};

/// Which boundary velocity drives the radius update.
///
/// `lagged` uses v_n(1) exactly as in the three-term update
///   R_{n+1} = R_n - (R_{n-1} - R_n)/3 + h* v_n(1),
/// which is only first-order consistent because the left side approximates
/// R'(t_{n+1}). `extrapolated` uses 2 v_n(1) - v_{n-1}(1), the same
/// second-order linearization the parabolic step applies to v(1).
enum class RadiusVelocity { lagged, extrapolated };

struct SchemeOptions {
    RadiusVelocity radius_velocity = RadiusVelocity::extrapolated;
    double eps_div = 1e-10;
    double max_condition = 1e13;
};

enum class TerminalReason { collapse, singular_system, non_finite };

std::string to_string(TerminalReason reason);

/// Terminal condition of a time march: carries the step at which it hit.
class SolverError : public std::runtime_error {
public:
    SolverError(TerminalReason reason, int step, const std::string& what);
    TerminalReason reason() const { return reason_; }
    int step() const { return step_; }

private:
    TerminalReason reason_;
    int step_;
};

/// Basis data frozen at the collocation nodes.
///
/// Collocation uses the (N+1)-point Gauss rule, one node per trial function,
/// so every step solves a square system. All nodes are interior, which keeps
/// the 2 b'/(rho + 1) term of the radial Laplacian finite.
class Discretization {
public:
    explicit Discretization(int n);

    int n() const { return basis_.n(); }
    int size() const { return basis_.size(); }
    const TrialBasis& basis() const { return basis_; }
    const QuadratureRule& rule() const { return rule_; }
    const std::vector<double>& nodes() const { return rule_.nodes; }

    /// B(j, i) = b_i(x_j)
    const Eigen::MatrixXd& values() const { return values_; }
    /// B'(j, i) = b_i'(x_j)
    const Eigen::MatrixXd& first() const { return first_; }
    /// b_i''(x_j) + 2 b_i'(x_j) / (x_j + 1)
    const Eigen::MatrixXd& radial_laplacian() const { return radial_; }

    /// 16-point panel rule used for the velocity integral.
    const QuadratureRule& panel() const { return panel_; }

    Eigen::VectorXd nodal(const Eigen::VectorXd& coeffs) const { return values_ * coeffs; }
    double expand(const Eigen::VectorXd& coeffs, double x) const;

private:
    TrialBasis basis_;
    QuadratureRule rule_;
    QuadratureRule panel_;
    Eigen::MatrixXd values_;
    Eigen::MatrixXd first_;
    Eigen::MatrixXd radial_;
};

/// Two time levels of the discrete solution.
struct SolverState {
    int step = 0;  // index n of the newest level
    Eigen::VectorXd coeffs_n, coeffs_nm1;
    Eigen::VectorXd p_nodes_n, p_nodes_nm1;
    Eigen::VectorXd v_nodes_n;  // velocity at the Gauss nodes, level n
    double v1_n = 0.0, v1_nm1 = 0.0;
    double R_n = 1.0, R_nm1 = 1.0;
};

struct RadiusStep {
    double radius = 0.0;
    bool collapsed = false;  // radius <= 0 (or not finite)
};

/// R_{n+1} = R_n - (R_{n-1} - R_n)/3 + h* v
RadiusStep radius_update(double R_n, double R_nm1, double v, double h_star);

struct VelocitySamples {
    Eigen::VectorXd nodes;           // v at the Gauss nodes
    double at_one = 0.0;             // v(1)
    std::vector<int> fallback_nodes; // nodes where v was interpolated
    bool boundary_fallback = false;  // v(1) was extrapolated
};

/// Solves d/drho((rho+1)^2 v p) = velocity_rhs + f_v with v(-1) = 0.
///
/// W(rho) = int_{-1}^{rho} (velocity_rhs + f_v) is accumulated panel by panel
/// between consecutive nodes and v = W / ((rho+1)^2 p). Where
/// |(rho+1)^2 p| < eps_div the sample is replaced by interpolation through the
/// nearest well-conditioned nodes and reported in `fallback_nodes`.
VelocitySamples reconstruct_velocity(const Discretization& disc, const Eigen::VectorXd& coeffs,
                                     double R, double t, const ModelParams& params,
                                     const ScalarField& f_v = {}, double eps_div = 1e-10);

struct StepSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
};

/// Collocation system for level n+1. Row j is
///
///   [b_i - h* g(x_j) b_i' - 4 h* D_p / R_{n+1}^2 (b_i'' + 2 b_i'/(x_j+1))] a_i = g*(x_j)
///
/// with g(x) = (x+1)(2 v_n(1) - v_{n-1}(1)) / R_{n+1} and
/// g* = p_n - (p_{n-1} - p_n)/3 + h* (2 f(p_n) - f(p_{n-1})) plus the
/// extrapolated source h* (2 f_p(t_n) - f_p(t_{n-1})) when present.
StepSystem assemble_step_system(const SolverState& state, double R_np1, const Discretization& disc,
                                const TimeGrid& grid, const ModelParams& params,
                                const ScalarField& f_p = {});

/// Dense LU with partial pivoting. Throws SolverError(singular_system) when
/// the 1-norm condition estimate exceeds max_condition. `condition`, when
/// given, receives the estimate.
Eigen::VectorXd solve_step_system(const StepSystem& system, int step, double max_condition = 1e13,
                                  double* condition = nullptr);

struct InitialData {
    Profile p0;
    double R0 = 1.0;
    // Only consulted for BootstrapMode::exact.
    ScalarField exact_p;
    TimeFunction exact_R;
};

/// backward_euler: one semi-implicit Euler step of size h.
/// extrapolated_euler: two half steps and one full step combined as
/// 2 u(h/2, h/2) - u(h); L-stable with O(h^3) local error.
/// exact: level 1 projected from the exact solution.
enum class BootstrapMode { backward_euler, extrapolated_euler, exact };

/// Running diagnostics shared by bootstrap and advance.
struct StepDiagnostics {
    double projection_residual = 0.0;
    int velocity_fallbacks = 0;
    double max_condition = 0.0;
};

/// Least-squares projection of a profile onto the trial basis, sampled at
/// a 2(N+1)-point Gauss rule. `residual` receives the max sample misfit.
Eigen::VectorXd project_profile(const Discretization& disc, const Profile& profile,
                                double* residual = nullptr);

/// Builds levels 0 and 1. Level 0 is the projected p0; level 1 follows `mode`.
SolverState bootstrap(const InitialData& initial, const TimeGrid& grid, const Discretization& disc,
                      const ModelParams& params, const Sources& sources, BootstrapMode mode,
                      const SchemeOptions& options = {}, StepDiagnostics* diag = nullptr);

/// One step of the scheme: radius first (R_{n+1} enters the operator), then
/// the collocation solve, then velocity reconstruction at the new level.
SolverState advance(const SolverState& state, const TimeGrid& grid, const Discretization& disc,
                    const ModelParams& params, const Sources& sources,
                    const SchemeOptions& options = {}, StepDiagnostics* diag = nullptr);

struct TrajectoryLevel {
    int step = 0;
    double t = 0.0;
    Eigen::VectorXd coeffs;
    Eigen::VectorXd p_nodes;
    double R = 1.0;
    double v1 = 0.0;
};

struct Trajectory {
    int N = 0;
    TimeGrid grid;
    std::vector<double> nodes;
    std::vector<TrajectoryLevel> levels;
};

struct RunSpec {
    int N = 20;
    TimeGrid grid;
    ModelParams params;
    InitialData initial;
    Sources sources;
    BootstrapMode bootstrap = BootstrapMode::extrapolated_euler;
    SchemeOptions options;
    int stride = 1;
};

struct RunReport {
    bool completed = false;
    std::optional<TerminalReason> reason;
    std::string message;
    int steps_taken = 0;
    double projection_residual = 0.0;
    int velocity_fallbacks = 0;
    double max_condition = 0.0;
    double wall_seconds = 0.0;
};

struct RunResult {
    Trajectory trajectory;
    RunReport report;
};

/// Full march from bootstrap to T. Levels whose index is a multiple of
/// `stride` are kept, plus the last level reached. Terminal conditions stop
/// the march and leave a partial trajectory.
RunResult run(const RunSpec& spec);

}  // namespace fbspec
