#include "fbspec/stepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace fbspec {

namespace {

constexpr int kPanelPoints = 16;

double eval_or_zero(const ScalarField& f, double rho, double t) { return f ? f(rho, t) : 0.0; }
double eval_or_zero(const TimeFunction& f, double t) { return f ? f(t) : 0.0; }

/// Lagrange interpolation through (xs, ys) evaluated at x.
double lagrange(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double term = ys[i];
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (k != i) term *= (x - xs[k]) / (xs[i] - xs[k]);
        }
        sum += term;
    }
    return sum;
}

/// Up to four well-conditioned nodes closest to `target`.
std::vector<std::size_t> nearest_good(const std::vector<double>& nodes, const std::vector<bool>& good,
                                      double target) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (good[j]) idx.push_back(j);
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(nodes[a] - target) < std::abs(nodes[b] - target);
    });
    if (idx.size() > 4) idx.resize(4);
    return idx;
}

/// L = B - dt g(x) B' - (4 dt D_p / R^2) Lrad with g(x) = (x+1) * speed / R.
Eigen::MatrixXd build_operator(const Discretization& disc, double dt, double speed, double R,
                               double D_p) {
    const auto& x = disc.nodes();
    const double diffusion = 4.0 * dt * D_p / (R * R);
    Eigen::MatrixXd A = disc.values() - diffusion * disc.radial_laplacian();
    for (int j = 0; j < disc.size(); ++j) {
        const double g = (x[static_cast<std::size_t>(j)] + 1.0) * speed / R;
        A.row(j) -= dt * g * disc.first().row(j);
    }
    return A;
}

void check_finite(const Eigen::VectorXd& v, int step, const char* what) {
    if (!v.allFinite()) {
        throw SolverError(TerminalReason::non_finite, step,
                          std::string("non-finite ") + what + " at step " + std::to_string(step));
    }
}

VelocitySamples velocity_at(const Discretization& disc, const Eigen::VectorXd& coeffs, double R,
                            double t, const ModelParams& params, const Sources& sources,
                            const SchemeOptions& options, StepDiagnostics* diag) {
    auto v = reconstruct_velocity(disc, coeffs, R, t, params, sources.velocity, options.eps_div);
    if (diag) {
        diag->velocity_fallbacks +=
            static_cast<int>(v.fallback_nodes.size()) + (v.boundary_fallback ? 1 : 0);
    }
    return v;
}

}  // namespace

std::string to_string(TerminalReason reason) {
    switch (reason) {
        case TerminalReason::collapse: return "collapse";
        case TerminalReason::singular_system: return "singular_system";
        case TerminalReason::non_finite: return "non_finite";
    }
    return "unknown";
}

SolverError::SolverError(TerminalReason reason, int step, const std::string& what)
    : std::runtime_error(what), reason_(reason), step_(step) {}

TimeGrid TimeGrid::make(double T, int M) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("TimeGrid: T must be > 0");
    if (M < 2) throw std::invalid_argument("TimeGrid: M must be >= 2");
    TimeGrid g;
    g.T = T;
    g.M = M;
    g.h = T / M;
    g.h_star = 2.0 * g.h / 3.0;
    return g;
}

Discretization::Discretization(int n)
    : basis_(n), rule_(gauss_rule(n + 1)), panel_(gauss_rule(kPanelPoints)) {
    const int size = basis_.size();
    values_.resize(size, size);
    first_.resize(size, size);
    radial_.resize(size, size);
    std::vector<double> b0(static_cast<std::size_t>(size));
    std::vector<double> b1(b0.size());
    std::vector<double> b2(b0.size());
    for (int j = 0; j < size; ++j) {
        const double x = rule_.nodes[static_cast<std::size_t>(j)];
        basis_.eval_all(x, 0, b0);
        basis_.eval_all(x, 1, b1);
        basis_.eval_all(x, 2, b2);
        for (int i = 0; i < size; ++i) {
            const auto k = static_cast<std::size_t>(i);
            values_(j, i) = b0[k];
            first_(j, i) = b1[k];
            radial_(j, i) = b2[k] + 2.0 * b1[k] / (x + 1.0);
        }
    }
}

double Discretization::expand(const Eigen::VectorXd& coeffs, double x) const {
    return basis_.expand(std::span<const double>(coeffs.data(), coeffs.size()), x);
}

RadiusStep radius_update(double R_n, double R_nm1, double v, double h_star) {
    RadiusStep out;
    out.radius = R_n - (R_nm1 - R_n) / 3.0 + h_star * v;
    out.collapsed = !(out.radius > 0.0) || !std::isfinite(out.radius);
    return out;
}

VelocitySamples reconstruct_velocity(const Discretization& disc, const Eigen::VectorXd& coeffs,
                                     double R, double t, const ModelParams& params,
                                     const ScalarField& f_v, double eps_div) {
    const auto legendre = disc.basis().to_legendre(
        std::span<const double>(coeffs.data(), static_cast<std::size_t>(coeffs.size())));
    const auto p_at = [&](double x) { return legendre_series(legendre, x); };
    const auto integrand = [&](double rho) {
        return velocity_rhs(p_at(rho), rho, R, t, params) + eval_or_zero(f_v, rho, t);
    };

    const auto& nodes = disc.nodes();
    const std::size_t count = nodes.size();
    std::vector<double> W(count);
    double accumulated = 0.0;
    double left = -1.0;
    for (std::size_t j = 0; j < count; ++j) {
        accumulated += disc.panel().integrate(integrand, left, nodes[j]);
        W[j] = accumulated;
        left = nodes[j];
    }
    const double W_one = accumulated + disc.panel().integrate(integrand, left, 1.0);

    VelocitySamples out;
    out.nodes.resize(static_cast<Eigen::Index>(count));
    std::vector<bool> good(count, true);
    std::vector<double> v(count, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
        const double s = nodes[j] + 1.0;
        const double denom = s * s * p_at(nodes[j]);
        if (std::abs(denom) < eps_div) {
            good[j] = false;
            out.fallback_nodes.push_back(static_cast<int>(j));
        } else {
            v[j] = W[j] / denom;
        }
    }
    const bool any_good = std::find(good.begin(), good.end(), true) != good.end();
    for (int j : out.fallback_nodes) {
        const auto k = static_cast<std::size_t>(j);
        if (!any_good) {
            v[k] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const auto near = nearest_good(nodes, good, nodes[k]);
        std::vector<double> xs, ys;
        for (auto i : near) {
            xs.push_back(nodes[i]);
            ys.push_back(v[i]);
        }
        v[k] = lagrange(xs, ys, nodes[k]);
    }
    for (std::size_t j = 0; j < count; ++j) out.nodes[static_cast<Eigen::Index>(j)] = v[j];

    const double denom_one = 4.0 * p_at(1.0);
    if (std::abs(denom_one) < eps_div) {
        out.boundary_fallback = true;
        if (!any_good) {
            out.at_one = std::numeric_limits<double>::quiet_NaN();
        } else {
            const auto near = nearest_good(nodes, good, 1.0);
            std::vector<double> xs, ys;
            for (auto i : near) {
                xs.push_back(nodes[i]);
                ys.push_back(v[i]);
            }
            out.at_one = lagrange(xs, ys, 1.0);
        }
    } else {
        out.at_one = W_one / denom_one;
    }
    return out;
}

StepSystem assemble_step_system(const SolverState& state, double R_np1, const Discretization& disc,
                                const TimeGrid& grid, const ModelParams& params,
                                const ScalarField& f_p) {
    const int n = state.step;
    const double t_n = grid.t(n);
    const double t_nm1 = grid.t(n - 1);
    const double hs = grid.h_star;

    StepSystem sys;
    sys.matrix = build_operator(disc, hs, 2.0 * state.v1_n - state.v1_nm1, R_np1, params.D_p);
    sys.rhs.resize(disc.size());
    const auto& x = disc.nodes();
    for (int j = 0; j < disc.size(); ++j) {
        const double pn = state.p_nodes_n[j];
        const double pnm1 = state.p_nodes_nm1[j];
        const double xj = x[static_cast<std::size_t>(j)];
        double g = pn - (pnm1 - pn) / 3.0 +
                   hs * (2.0 * reaction_f(pn, t_n, params) - reaction_f(pnm1, t_nm1, params));
        if (f_p) g += hs * (2.0 * f_p(xj, t_n) - f_p(xj, t_nm1));
        sys.rhs[j] = g;
    }
    return sys;
}

Eigen::VectorXd solve_step_system(const StepSystem& system, int step, double max_condition,
                                  double* condition) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.matrix);
    // The estimator misses exact singularity; the pivot ratio is a lower bound.
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double smallest = pivots.minCoeff();
    const double rcond = lu.rcond();
    double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    cond = smallest > 0.0 ? std::max(cond, pivots.maxCoeff() / smallest)
                          : std::numeric_limits<double>::infinity();
    if (condition) *condition = cond;
    if (!(cond <= max_condition)) {
        std::ostringstream msg;
        msg << "collocation system singular or ill-conditioned at step " << step
            << " (condition estimate " << cond << ")";
        throw SolverError(TerminalReason::singular_system, step, msg.str());
    }
    Eigen::VectorXd a = lu.solve(system.rhs);
    a += lu.solve(system.rhs - system.matrix * a);
    check_finite(a, step, "coefficients");
    return a;
}

Eigen::VectorXd project_profile(const Discretization& disc, const Profile& profile,
                                double* residual) {
    const auto sample = gauss_rule(2 * disc.size());
    const auto rows = static_cast<Eigen::Index>(sample.nodes.size());
    Eigen::MatrixXd A(rows, disc.size());
    Eigen::VectorXd y(rows);
    std::vector<double> b(static_cast<std::size_t>(disc.size()));
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double x = sample.nodes[static_cast<std::size_t>(r)];
        disc.basis().eval_all(x, 0, b);
        for (int i = 0; i < disc.size(); ++i) A(r, i) = b[static_cast<std::size_t>(i)];
        y[r] = profile(x);
    }
    Eigen::VectorXd a = A.colPivHouseholderQr().solve(y);
    if (residual) *residual = (A * a - y).cwiseAbs().maxCoeff();
    return a;
}

namespace {

struct EulerLevel {
    Eigen::VectorXd coeffs;
    Eigen::VectorXd p_nodes;
    double R = 0.0;
    double v1 = 0.0;
};

/// One backward-Euler step of size dt from time t: explicit radius and
/// advection speed; diffusion, reaction (affine in p) and source at t + dt.
EulerLevel euler_substep(const EulerLevel& from, double t, double dt, const Discretization& disc,
                         const ModelParams& params, const Sources& sources,
                         const SchemeOptions& options, StepDiagnostics* diag, bool need_velocity) {
    EulerLevel out;
    out.R = from.R + dt * (from.v1 + eval_or_zero(sources.radius, t));
    if (!(out.R > 0.0)) {
        throw SolverError(TerminalReason::collapse, 1, "tumour radius collapsed at step 1");
    }
    StepSystem sys;
    const double t1 = t + dt;
    const double f0 = reaction_f(0.0, t1, params);
    const double slope = reaction_f(1.0, t1, params) - f0;
    sys.matrix = build_operator(disc, dt, from.v1, out.R, params.D_p) - dt * slope * disc.values();
    sys.rhs.resize(disc.size());
    for (int j = 0; j < disc.size(); ++j) {
        const double x = disc.nodes()[static_cast<std::size_t>(j)];
        sys.rhs[j] = from.p_nodes[j] + dt * (f0 + eval_or_zero(sources.parabolic, x, t1));
    }
    double cond = 0.0;
    out.coeffs = solve_step_system(sys, 1, options.max_condition, &cond);
    if (diag) diag->max_condition = std::max(diag->max_condition, cond);
    out.p_nodes = disc.nodal(out.coeffs);
    if (need_velocity) {
        out.v1 = velocity_at(disc, out.coeffs, out.R, t + dt, params, sources, options, diag).at_one;
    }
    return out;
}

}  // namespace

SolverState bootstrap(const InitialData& initial, const TimeGrid& grid, const Discretization& disc,
                      const ModelParams& params, const Sources& sources, BootstrapMode mode,
                      const SchemeOptions& options, StepDiagnostics* diag) {
    if (!initial.p0) throw std::invalid_argument("bootstrap: initial profile missing");
    if (!(initial.R0 > 0.0)) throw std::invalid_argument("bootstrap: R0 must be > 0");

    SolverState s;
    double residual = 0.0;
    s.coeffs_nm1 = project_profile(disc, initial.p0, &residual);
    if (diag) diag->projection_residual = std::max(diag->projection_residual, residual);
    s.p_nodes_nm1 = disc.nodal(s.coeffs_nm1);
    s.R_nm1 = initial.R0;
    const double t0 = grid.t(0);
    const double t1 = grid.t(1);
    const auto v0 = velocity_at(disc, s.coeffs_nm1, s.R_nm1, t0, params, sources, options, diag);
    s.v1_nm1 = v0.at_one;

    if (mode == BootstrapMode::exact) {
        if (!initial.exact_p || !initial.exact_R) {
            throw std::invalid_argument("bootstrap: exact mode needs exact_p and exact_R");
        }
        s.coeffs_n = project_profile(
            disc, [&](double x) { return initial.exact_p(x, t1); }, &residual);
        if (diag) diag->projection_residual = std::max(diag->projection_residual, residual);
        s.R_n = initial.exact_R(t1);
    } else {
        const EulerLevel start{s.coeffs_nm1, s.p_nodes_nm1, s.R_nm1, s.v1_nm1};
        const auto full = euler_substep(start, t0, grid.h, disc, params, sources, options, diag,
                                        false);
        if (mode == BootstrapMode::backward_euler) {
            s.coeffs_n = full.coeffs;
            s.R_n = full.R;
        } else {
            const double half = 0.5 * grid.h;
            const auto mid = euler_substep(start, t0, half, disc, params, sources, options, diag,
                                           true);
            const auto two = euler_substep(mid, t0 + half, half, disc, params, sources, options,
                                           diag, false);
            s.coeffs_n = 2.0 * two.coeffs - full.coeffs;
            s.R_n = 2.0 * two.R - full.R;
            if (!(s.R_n > 0.0)) {
                throw SolverError(TerminalReason::collapse, 1, "tumour radius collapsed at step 1");
            }
        }
    }
    check_finite(s.coeffs_n, 1, "coefficients");
    s.p_nodes_n = disc.nodal(s.coeffs_n);
    const auto v1 = velocity_at(disc, s.coeffs_n, s.R_n, t1, params, sources, options, diag);
    s.v_nodes_n = v1.nodes;
    s.v1_n = v1.at_one;
    s.step = 1;
    if (!std::isfinite(s.v1_n) || !std::isfinite(s.v1_nm1)) {
        throw SolverError(TerminalReason::non_finite, 1, "non-finite boundary velocity at step 1");
    }
    return s;
}

SolverState advance(const SolverState& state, const TimeGrid& grid, const Discretization& disc,
                    const ModelParams& params, const Sources& sources,
                    const SchemeOptions& options, StepDiagnostics* diag) {
    const int n = state.step;
    const int next = n + 1;
    const double speed_n = state.v1_n + eval_or_zero(sources.radius, grid.t(n));
    const double speed_nm1 = state.v1_nm1 + eval_or_zero(sources.radius, grid.t(n - 1));
    const double speed = options.radius_velocity == RadiusVelocity::lagged
                             ? speed_n
                             : 2.0 * speed_n - speed_nm1;
    const auto radius = radius_update(state.R_n, state.R_nm1, speed, grid.h_star);
    if (radius.collapsed) {
        std::ostringstream msg;
        msg << "tumour radius collapsed at step " << next << " (R = " << radius.radius << ")";
        throw SolverError(TerminalReason::collapse, next, msg.str());
    }

    const auto sys = assemble_step_system(state, radius.radius, disc, grid, params,
                                          sources.parabolic);
    double cond = 0.0;
    Eigen::VectorXd coeffs = solve_step_system(sys, next, options.max_condition, &cond);
    if (diag) diag->max_condition = std::max(diag->max_condition, cond);

    SolverState out;
    out.step = next;
    out.coeffs_nm1 = state.coeffs_n;
    out.p_nodes_nm1 = state.p_nodes_n;
    out.v1_nm1 = state.v1_n;
    out.R_nm1 = state.R_n;
    out.coeffs_n = std::move(coeffs);
    out.p_nodes_n = disc.nodal(out.coeffs_n);
    out.R_n = radius.radius;
    const auto v = velocity_at(disc, out.coeffs_n, out.R_n, grid.t(next), params, sources,
                               options, diag);
    out.v_nodes_n = v.nodes;
    out.v1_n = v.at_one;
    if (!std::isfinite(out.v1_n)) {
        throw SolverError(TerminalReason::non_finite, next,
                          "non-finite boundary velocity at step " + std::to_string(next));
    }
    return out;
}

RunResult run(const RunSpec& spec) {
    const auto start = std::chrono::steady_clock::now();
    if (spec.stride < 1) throw std::invalid_argument("run: stride must be >= 1");

    RunResult result;
    auto& traj = result.trajectory;
    auto& report = result.report;
    const Discretization disc(spec.N);
    traj.N = spec.N;
    traj.grid = spec.grid;
    traj.nodes = disc.nodes();

    const auto keep = [&](int step) { return step % spec.stride == 0; };
    const auto record = [&](int step, const Eigen::VectorXd& coeffs, const Eigen::VectorXd& nodal,
                            double R, double v1) {
        traj.levels.push_back({step, spec.grid.t(step), coeffs, nodal, R, v1});
    };

    StepDiagnostics diag;
    SolverState state;
    try {
        state = bootstrap(spec.initial, spec.grid, disc, spec.params, spec.sources,
                          spec.bootstrap, spec.options, &diag);
        record(0, state.coeffs_nm1, state.p_nodes_nm1, state.R_nm1, state.v1_nm1);
        if (keep(1) || spec.grid.M == 1) {
            record(1, state.coeffs_n, state.p_nodes_n, state.R_n, state.v1_n);
        }
        report.steps_taken = 1;
        while (state.step < spec.grid.M) {
            state = advance(state, spec.grid, disc, spec.params, spec.sources, spec.options, &diag);
            report.steps_taken = state.step;
            if (keep(state.step) || state.step == spec.grid.M) {
                record(state.step, state.coeffs_n, state.p_nodes_n, state.R_n, state.v1_n);
            }
        }
        report.completed = true;
    } catch (const SolverError& e) {
        report.completed = false;
        report.reason = e.reason();
        report.message = e.what();
        // Keep the last good level so the partial trajectory ends where the march stopped.
        if (state.step > 0 && (traj.levels.empty() || traj.levels.back().step != state.step)) {
            record(state.step, state.coeffs_n, state.p_nodes_n, state.R_n, state.v1_n);
        }
    }
    report.projection_residual = diag.projection_residual;
    report.velocity_fallbacks = diag.velocity_fallbacks;
    report.max_condition = diag.max_condition;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace fbspec
