#include <cmath>

#include "doctest.h"
#include "fbspec/harness.hpp"

using namespace fbspec;
using doctest::Approx;

namespace {

Trajectory synthetic(int N, int M, double offset) {
    Trajectory tr;
    tr.N = N;
    tr.grid = TimeGrid::make(1.0, M);
    tr.nodes = gauss_rule(N + 1).nodes;
    for (int n = 0; n <= M; ++n) {
        TrajectoryLevel l;
        l.step = n;
        l.t = tr.grid.t(n);
        l.p_nodes.resize(N + 1);
        for (int j = 0; j <= N; ++j) l.p_nodes[j] = std::sin(tr.nodes[j] + l.t) + offset;
        tr.levels.push_back(l);
    }
    return tr;
}

}  // namespace

TEST_CASE("convergence rate") {
    CHECK(convergence_rate(4e-3, 1e-3, 100, 200) == Approx(2.0));
    CHECK(convergence_rate(1.0169e-3, 2.5075e-4, 100, 200) ==
          Approx(std::log2(1.0169e-3 / 2.5075e-4)).epsilon(1e-14));
    // Published rates come from unrounded errors; five-digit inputs carry ~1e-4.
    CHECK(convergence_rate(1.0169e-3, 2.5075e-4, 100, 200) == Approx(2.019912).epsilon(1e-4));
    CHECK(convergence_rate(4.1583e-4, 1.0243e-4, 100, 200) == Approx(2.0212768).epsilon(1e-4));
    CHECK_THROWS_AS(convergence_rate(0.0, 1e-3, 100, 200), std::invalid_argument);
    CHECK_THROWS_AS(convergence_rate(1e-3, -1e-3, 100, 200), std::invalid_argument);
    CHECK_THROWS_AS(convergence_rate(1e-3, 1e-4, 100, 100), std::invalid_argument);
}

TEST_CASE("property: rate is invariant under common scaling") {
    for (double c : {1e-6, 0.5, 3.0, 1e4}) {
        CHECK(convergence_rate(c * 3e-3, c * 2e-4, 50, 400) ==
              Approx(convergence_rate(3e-3, 2e-4, 50, 400)).epsilon(1e-13));
    }
    for (double e : {1e-9, 1e-3, 1.0}) {
        CHECK(convergence_rate(4 * e, e, 30, 60) == Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("e_infinity identities") {
    const auto a = synthetic(6, 10, 0.0);
    const auto b = synthetic(6, 10, 0.25);
    CHECK(e_infinity(a, a) == 0.0);
    CHECK(e_infinity(a, b) == Approx(0.25));
    CHECK(e_infinity(b, a) == e_infinity(a, b));
    CHECK(e_infinity(a, [](double x, double t) { return std::sin(x + t) - 0.5; }) == Approx(0.5));
}

TEST_CASE("e_infinity rejects incommensurate grids") {
    const auto a = synthetic(4, 10, 0.0);
    CHECK_THROWS_AS(e_infinity(a, synthetic(4, 15, 0.0)), std::invalid_argument);
    auto other_T = synthetic(4, 20, 0.0);
    other_T.grid = TimeGrid::make(2.0, 20);
    CHECK_THROWS_AS(e_infinity(a, other_T), std::invalid_argument);
    auto thinned = synthetic(4, 20, 0.0);
    thinned.levels.erase(thinned.levels.begin() + 2);  // step 2 missing
    CHECK_THROWS_AS(e_infinity(a, thinned), std::invalid_argument);
    CHECK(e_infinity(a, synthetic(4, 20, 0.0)) == 0.0);
}

TEST_CASE("time study: degenerate case has no rates") {
    ExactFields f;
    f.p = [](double r, double) { return 1.0 + 0.1 * (r * r * r / 3.0 - r); };
    f.p_t = [](double, double) { return 0.0; };
    f.p_r = [](double r, double) { return 0.1 * (r * r - 1.0); };
    f.p_rr = [](double r, double) { return 0.2 * r; };
    f.p_r_over = [](double r, double) { return 0.1 * (r - 1.0); };
    f.v = f.v_r = [](double, double) { return 0.0; };
    f.R = [](double) { return 1.0; };
    f.R_t = [](double) { return 0.0; };
    const auto c = study_case(make_case("steady", ModelParams::reference_set(), f));
    const auto rep = time_refinement_study(c, 8, {10, 20, 40}, 1.0);
    REQUIRE(rep.levels.size() == 3);
    REQUIRE(rep.rates.size() == 2);
    for (const auto& l : rep.levels) CHECK(l.e_inf <= 1e-11);
    for (const auto& r : rep.rates) CHECK_FALSE(r.has_value());
}

TEST_CASE("time study: second order for example 2 at moderate N") {
    const auto c = study_case(example2());
    const auto rep = time_refinement_study(c, 20, {50, 100, 200}, 1.0);
    REQUIRE(rep.rates.size() == 2);
    CHECK(rep.axis == "time");
    CHECK(rep.case_name == "example2");
    for (std::size_t i = 1; i < rep.levels.size(); ++i) {
        CHECK(rep.levels[i].e_inf < rep.levels[i - 1].e_inf);
    }
    for (const auto& r : rep.rates) {
        REQUIRE(r.has_value());
        CHECK(*r == Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("study input checks") {
    const auto c = study_case(example2());
    try {
        time_refinement_study(c, 10, {200, 100}, 1.0);
        FAIL("expected a rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("list not increasing") != std::string::npos);
    }
    CHECK_THROWS_AS(time_refinement_study(base_model_case(ModelParams::reference_set()), 10,
                                          {10, 20}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(space_refinement_study(c, 20, {10, 20}, 15, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(self_convergence_study(c, {30, 40}, 100, 8, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(stability_study(c, {-1e-6}, 20, 8, 1.0), std::invalid_argument);
}

TEST_CASE("space study: self comparison is zero and errors fall") {
    const auto c = study_case(example2());
    const auto rep = space_refinement_study(c, 20, {4, 8, 16}, 16, 1.0);
    CHECK(rep.axis == "space");
    CHECK(rep.levels.back().e_inf == 0.0);
    CHECK(rep.levels[1].e_inf < rep.levels[0].e_inf);
    CHECK_FALSE(rep.rates.back().has_value());
}

TEST_CASE("self-convergence: M = M_ref gives zero") {
    const auto c = base_model_case(ModelParams::reference_set());
    const auto rep = self_convergence_study(c, {20, 40, 80}, 80, 10, 1.0);
    CHECK(rep.levels.back().e_inf == 0.0);
    CHECK(rep.levels[1].e_inf < rep.levels[0].e_inf);
}

TEST_CASE("stability: zero perturbation and linear response") {
    const auto c = study_case(example2());
    const auto rep = stability_study(c, {0.0, 1e-6, 1e-8}, 50, 8, 1.0);
    REQUIRE(rep.diffs.size() == 3);
    REQUIRE(rep.ratios.size() == 3);
    CHECK(rep.diffs[0] == 0.0);
    CHECK_FALSE(rep.ratios[0].has_value());
    REQUIRE(rep.ratios[1].has_value());
    REQUIRE(rep.ratios[2].has_value());
    CHECK(*rep.ratios[1] > 0.0);
    CHECK(*rep.ratios[2] == Approx(*rep.ratios[1]).epsilon(0.1));
}

TEST_CASE("base model profile") {
    CHECK(base_model_profile(-1.0) == Approx(0.7));
    CHECK(base_model_profile(1.0) == Approx(0.9));
    const double h = 1e-6;
    for (double x : {-1.0 + h, 1.0 - h}) {
        const double d = (base_model_profile(x + h) - base_model_profile(x - h)) / (2 * h);
        CHECK(std::abs(d) < 1e-5);
    }
    for (double x = -1.0; x <= 1.0; x += 0.05) {
        CHECK(base_model_profile(x) >= 0.7 - 1e-15);
        CHECK(base_model_profile(x) <= 0.9 + 1e-15);
    }
}

TEST_CASE("serial and parallel studies agree") {
    const auto c = study_case(example2());
    StudyOptions serial;
    serial.parallel = false;
    const auto a = time_refinement_study(c, 10, {20, 40}, 1.0, serial);
    const auto b = time_refinement_study(c, 10, {20, 40}, 1.0);
    for (std::size_t i = 0; i < a.levels.size(); ++i) CHECK(a.levels[i].e_inf == b.levels[i].e_inf);
}
