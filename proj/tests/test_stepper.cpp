#include <cmath>
#include <limits>

#include "doctest.h"
#include "fbspec/harness.hpp"
#include "fbspec/mms.hpp"
#include "fbspec/stepper.hpp"

using namespace fbspec;
using doctest::Approx;

namespace {

// delta_p = delta_q = alpha_p = 1 and I = 1: the reaction term and the
// velocity integrand vanish for every p.
ModelParams inert_params(double D_p) {
    auto p = ModelParams::reference_set();
    p.theta1 = 1.0;
    p.w1 = 1.0;
    p.delta1 = 1.0;
    p.w2 = 1.0;
    p.delta2 = 1.0;
    p.I = 1.0;
    p.D_p = D_p;
    return p;
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("time grid") {
    const auto g = TimeGrid::make(1.0, 100);
    CHECK(g.h == Approx(0.01));
    CHECK(g.h_star == 2.0 * g.h / 3.0);
    CHECK(g.t(100) == Approx(1.0));
    CHECK_THROWS_AS(TimeGrid::make(1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::make(0.0, 10), std::invalid_argument);
}

TEST_CASE("radius update") {
    const auto fixed = radius_update(1.0, 1.0, 0.0, 0.2);
    CHECK(fixed.radius == 1.0);
    CHECK_FALSE(fixed.collapsed);
    CHECK(radius_update(1.0, 1.0, -0.3, 0.2).radius == Approx(1.0 - 0.06));
    CHECK(radius_update(1.0, 1.2, 0.0, 0.1).radius == Approx(1.0 - 0.2 / 3.0));
    CHECK(radius_update(0.1, 0.1, -1.0, 0.5).collapsed);
}

TEST_CASE("radius update local error against R = 1/(t+1)") {
    const auto R = [](double t) { return 1.0 / (t + 1.0); };
    const auto Rp = [](double t) { return -1.0 / ((t + 1.0) * (t + 1.0)); };
    const auto local = [&](double h, bool extrapolate) {
        const double t = 0.3;
        const double v = extrapolate ? 2.0 * Rp(t) - Rp(t - h) : Rp(t);
        return std::abs(radius_update(R(t), R(t - h), v, 2.0 * h / 3.0).radius - R(t + h));
    };
    // Extrapolated speed: third-order local error; lagged: second order.
    const double ext = local(1e-2, true) / local(5e-3, true);
    const double lag = local(1e-2, false) / local(5e-3, false);
    CHECK(ext == Approx(8.0).epsilon(0.05));
    CHECK(lag == Approx(4.0).epsilon(0.05));
}

TEST_CASE("discretization shapes") {
    const Discretization d(12);
    CHECK(d.size() == 13);
    CHECK(d.values().rows() == 13);
    CHECK(d.values().cols() == 13);
    CHECK(d.nodes().size() == 13);
    CHECK(d.panel().nodes.size() == 16);
    for (int j = 0; j < 13; ++j) {
        const double x = d.nodes()[j];
        for (int i = 0; i < 13; ++i) {
            CHECK(d.values()(j, i) == Approx(trial_eval(i, x, 0)));
            const double lap = trial_eval(i, x, 2) + 2.0 * trial_eval(i, x, 1) / (x + 1.0);
            CHECK(d.radial_laplacian()(j, i) == Approx(lap));
        }
    }
}

TEST_CASE("velocity reconstruction") {
    const Discretization d(10);
    const auto params = ModelParams::reference_set();
    Eigen::VectorXd one = Eigen::VectorXd::Zero(d.size());
    one[0] = 1.0;  // b_0 = 1
    const double R = 1.3, t = 0.4;
    const auto cancel = [&](double rho, double tt) { return -velocity_rhs(1.0, rho, R, tt, params); };

    SUBCASE("zero integrand gives zero velocity") {
        const auto v = reconstruct_velocity(d, one, R, t, params, cancel);
        CHECK(max_abs(v.nodes) < 1e-14);
        CHECK(std::abs(v.at_one) < 1e-14);
        CHECK(v.fallback_nodes.empty());
    }
    SUBCASE("c (rho+1)^2 integrand with p = 1 gives c (rho+1)/3") {
        const double c = 0.7;
        const auto fv = [&](double rho, double tt) {
            return c * (rho + 1.0) * (rho + 1.0) + cancel(rho, tt);
        };
        const auto v = reconstruct_velocity(d, one, R, t, params, fv);
        for (int j = 0; j < d.size(); ++j) {
            CHECK(v.nodes[j] == Approx(c * (d.nodes()[j] + 1.0) / 3.0).epsilon(1e-13));
        }
        CHECK(v.at_one == Approx(2.0 * c / 3.0).epsilon(1e-13));
    }
}

TEST_CASE("velocity of the manufactured fields at t = 0") {
    // The flux (rho+1)^2 v p vanishes at rho = -1 for both variants, so the
    // reconstruction recovers the supplied field in either case.
    for (bool literal : {false, true}) {
        CAPTURE(literal);
        const auto c = example1(literal);
        const Discretization d(20);  // 21 nodes: rho = 0 is a node and p vanishes there
        const auto coeffs = project_profile(d, [&](double x) { return c.exact_p(x, 0.0); });
        const auto v = reconstruct_velocity(d, coeffs, 1.0, 0.0, c.params, c.source_v);
        CHECK(v.at_one == Approx(c.exact_v(1.0, 0.0)).epsilon(1e-10));
        REQUIRE(v.fallback_nodes.size() == 1);
        const int zero_node = v.fallback_nodes[0];
        CHECK(d.nodes()[zero_node] == 0.0);
        for (int j = 0; j < d.size(); ++j) {
            const double exact = c.exact_v(d.nodes()[j], 0.0);
            CHECK(v.nodes[j] == Approx(exact).epsilon(j == zero_node ? 1e-3 : 1e-10));
        }
    }
}

TEST_CASE("property: degenerate step is the identity") {
    const Discretization d(16);
    const auto params = inert_params(0.0);
    const auto grid = TimeGrid::make(1.0, 50);
    const auto profile = [](double x) { return 0.5 + 0.1 * (x * x * x / 3.0 - x); };

    SolverState s;
    s.step = 1;
    s.coeffs_n = project_profile(d, profile);
    s.coeffs_nm1 = s.coeffs_n;
    s.p_nodes_n = d.nodal(s.coeffs_n);
    s.p_nodes_nm1 = s.p_nodes_n;
    s.R_n = s.R_nm1 = 1.0;
    s.v1_n = s.v1_nm1 = 0.0;

    const auto sys = assemble_step_system(s, 1.0, d, grid, params);
    CHECK(sys.matrix.rows() == d.size());
    CHECK(sys.matrix.cols() == d.size());
    CHECK((sys.matrix - d.values()).cwiseAbs().maxCoeff() == 0.0);
    const auto a = solve_step_system(sys, 2);
    CHECK(max_abs(a - s.coeffs_n) <= 1e-12);

    const auto next = advance(s, grid, d, params, {});
    CHECK(max_abs(next.coeffs_n - s.coeffs_n) <= 1e-12);
    CHECK(next.R_n == 1.0);
}

TEST_CASE("singular system is a terminal condition") {
    StepSystem sys;
    sys.matrix = Eigen::MatrixXd::Identity(4, 4);
    sys.matrix.row(2).setZero();
    sys.rhs = Eigen::VectorXd::Ones(4);
    try {
        solve_step_system(sys, 7);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.reason() == TerminalReason::singular_system);
        CHECK(e.step() == 7);
    }
}

TEST_CASE("projection") {
    const Discretization d(6);
    double residual = 1.0;
    project_profile(d, [](double x) { return 2.0 * (x * x * x / 3.0 - x); }, &residual);
    CHECK(residual <= 1e-12);
    // Outside the trial space: nonzero misfit is reported.
    project_profile(d, [](double x) { return x; }, &residual);
    CHECK(residual > 1e-3);
}

TEST_CASE("bootstrap keeps a constant profile") {
    const Discretization d(8);
    const auto params = inert_params(1.0);
    const auto grid = TimeGrid::make(1.0, 20);
    InitialData init;
    init.p0 = [](double) { return 0.6; };
    for (auto mode : {BootstrapMode::backward_euler, BootstrapMode::extrapolated_euler}) {
        const auto s = bootstrap(init, grid, d, params, {}, mode);
        CHECK(s.step == 1);
        CHECK(max_abs(s.p_nodes_n.array() - 0.6) <= 1e-12);
        CHECK(s.R_n == Approx(1.0));
        CHECK(std::abs(s.v1_n) < 1e-14);
    }
}

TEST_CASE("exact bootstrap reproduces the first level") {
    const auto c = example2();
    const Discretization d(20);
    const auto grid = TimeGrid::make(1.0, 100);
    const auto s = bootstrap(c.initial(), grid, d, c.params, c.sources(), BootstrapMode::exact);
    for (int j = 0; j < d.size(); ++j) {
        CHECK(s.p_nodes_n[j] == Approx(c.exact_p(d.nodes()[j], grid.h)).epsilon(1e-13));
    }
    CHECK(s.R_n == c.exact_R(grid.h));
    InitialData missing;
    missing.p0 = c.initial().p0;
    CHECK_THROWS_AS(bootstrap(missing, grid, d, c.params, {}, BootstrapMode::exact),
                    std::invalid_argument);
}

TEST_CASE("one step of the manufactured problem from exact levels") {
    const auto c = example1();
    const Discretization d(20);
    const auto grid = TimeGrid::make(1.0, 1000);
    const auto s = bootstrap(c.initial(), grid, d, c.params, c.sources(), BootstrapMode::exact);
    const auto next = advance(s, grid, d, c.params, c.sources());
    CHECK(next.step == 2);
    double err = 0.0;
    for (int j = 0; j < d.size(); ++j) {
        err = std::max(err, std::abs(next.p_nodes_n[j] - c.exact_p(d.nodes()[j], grid.t(2))));
    }
    CHECK(err <= 1e-5);
    CHECK(next.R_n == Approx(c.exact_R(grid.t(2))).epsilon(1e-8));
    CHECK(max_abs(next.p_nodes_n - d.nodal(next.coeffs_n)) <= 1e-12);
}

TEST_CASE("run: level bookkeeping") {
    const auto params = inert_params(0.0);
    RunSpec spec;
    spec.N = 6;
    spec.params = params;
    spec.initial.p0 = [](double x) { return 0.5 + 0.1 * (x * x * x / 3.0 - x); };

    spec.grid = TimeGrid::make(1.0, 2);
    auto r = run(spec);
    CHECK(r.report.completed);
    REQUIRE(r.trajectory.levels.size() == 3);
    for (const auto& l : r.trajectory.levels) {
        CHECK(max_abs(l.p_nodes - r.trajectory.levels[0].p_nodes) <= 1e-12);
    }

    spec.grid = TimeGrid::make(1.0, 100);
    spec.stride = 10;
    r = run(spec);
    CHECK(r.trajectory.levels.size() == 11);
    CHECK(r.trajectory.levels.back().step == 100);

    spec.stride = 7;
    r = run(spec);
    CHECK(r.trajectory.levels.size() == 16);  // 0, 7, ..., 98 and the final level
    CHECK(r.trajectory.levels.back().step == 100);
}

TEST_CASE("run: collapse ends the march with a partial trajectory") {
    auto spec = make_run_spec(study_case(example2()), 8, 50, 1.0);
    spec.sources.radius = [](double) { return -10.0; };
    const auto r = run(spec);
    CHECK_FALSE(r.report.completed);
    REQUIRE(r.report.reason.has_value());
    CHECK(*r.report.reason == TerminalReason::collapse);
    CHECK(r.report.steps_taken > 0);
    CHECK(r.report.steps_taken < 50);
    CHECK(r.trajectory.levels.back().R > 0.0);
}

TEST_CASE("property: stationary trial-space solution is held fixed") {
    ExactFields f;
    f.p = [](double r, double) { return 2.0 + 0.1 * (r * r * r / 3.0 - r); };
    f.p_t = [](double, double) { return 0.0; };
    f.p_r = [](double r, double) { return 0.1 * (r * r - 1.0); };
    f.p_rr = [](double r, double) { return 0.2 * r; };
    f.p_r_over = [](double r, double) { return 0.1 * (r - 1.0); };
    f.v = [](double, double) { return 0.0; };
    f.v_r = [](double, double) { return 0.0; };
    f.R = [](double) { return 1.0; };
    f.R_t = [](double) { return 0.0; };
    const auto c = make_case("stationary", ModelParams::reference_set(), f);
    for (auto mode : {BootstrapMode::backward_euler, BootstrapMode::extrapolated_euler}) {
        auto sc = study_case(c, mode);
        const auto r = run(make_run_spec(sc, 10, 40, 1.0));
        REQUIRE(r.report.completed);
        CHECK(e_infinity(r.trajectory, c.exact_p) <= 1e-11);
        CHECK(r.trajectory.levels.back().R == Approx(1.0).epsilon(1e-12));
    }
}
