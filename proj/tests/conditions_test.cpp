#include <cmath>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "coexist/conditions.hpp"
#include "coexist/errors.hpp"
#include "coexist/grid.hpp"
#include "coexist/linops.hpp"
#include "coexist/logistic.hpp"
#include "coexist/model.hpp"

using namespace coexist;

namespace {

Theta scalar_theta(const Grid& g, double a, double b) {
    ScalarGrowth fg;
    fg.f = [a, b](double z) { return a - b * z; };
    fg.f_prime = [b](double) { return -b; };
    fg.c0 = a / b;
    return solve_logistic(g, fg);
}

} // namespace

TEST_SUITE("conditions") {

TEST_CASE("theta ratio of a profile with itself is one") {
    const Grid g = Grid::interval(M_PI, 80);
    const Theta t = scalar_theta(g, 5.0, 1.0);
    CHECK(theta_ratio_sup(t, t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("theta ratio scales with a constant factor") {
    const Grid g = Grid::interval(M_PI, 80);
    const Theta t = scalar_theta(g, 5.0, 1.0);
    Theta doubled = t;
    for (int i = 0; i < g.size(); ++i) doubled.field[i] = 2.0 * t.field[i];
    CHECK(theta_ratio_sup(doubled, t) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("theta ratio rejects a vanishing denominator") {
    const Grid g = Grid::interval(M_PI, 40);
    const Theta pos = scalar_theta(g, 5.0, 1.0);
    Theta zero{ScalarField(g, 0.0), true, 0.0, 0};
    CHECK_THROWS_AS(theta_ratio_sup(pos, zero), EvaluationError);
}

TEST_CASE("lv bracket ratio is finite and above one") {
    const Grid g = Grid::interval(M_PI, 120);
    const Theta upper = scalar_theta(g, 5.0, 1.0);
    const Theta lower = scalar_theta(g, 4.5, 1.0);
    const double r = theta_ratio_sup(upper, lower);
    CHECK(r > 1.0);
    CHECK(r < 10.0);
}

TEST_CASE("report for the reference lv model") {
    const Grid g = Grid::interval(M_PI, 120);
    const GrowthModel m = classical_lv(5.0, 1.0, 0.1, 5.0, 0.1, 1.0);
    const Thresholds t = compute_thresholds(m);
    const ConditionReport rep = condition_report(m, t, g);
    const double lam = lambda1_zero(g);

    const ConditionRecord& a = rep.find("existence_A");
    CHECK(a.holds);
    CHECK(a.lhs == doctest::Approx(5.0));
    CHECK(a.rhs == doctest::Approx(lam + 0.5).epsilon(1e-9));

    CHECK_FALSE(rep.find("nonexistence_C").holds);
    CHECK(rep.find("uniqueness_B").holds);
    CHECK(rep.find("uniqueness_B").lhs == doctest::Approx(4.0));
    CHECK(rep.find("perturbation_31A").holds);
    CHECK(rep.find("cor33_B").holds);
}

TEST_CASE("small rates trigger the nonexistence record") {
    const Grid g = Grid::interval(M_PI, 80);
    const GrowthModel m = classical_lv(0.5, 1.0, 0.1, 5.0, 0.1, 1.0);
    const ConditionReport rep = condition_report(m, compute_thresholds(m), g);
    CHECK(rep.find("nonexistence_C").holds);
    CHECK_FALSE(rep.find("existence_A").holds);
    // The u brackets vanish, so the uniqueness ratios are undefined.
    CHECK_FALSE(rep.find("uniqueness_B").evaluable);
}

TEST_CASE("decoupled system satisfies uniqueness with zero right side") {
    const Grid g = Grid::interval(M_PI, 80);
    GrowthModel m = classical_lv(5.0, 1.0, 1.0, 5.0, 1.0, 1.0);
    // Remove the cross terms; the partials stay positive at zero slope
    // limit is not allowed by the factory, so construct directly.
    m.g = [](double u, double) { return u; };
    m.h = [](double, double v) { return v; };
    m.gv = [](double, double) { return 0.0; };
    m.hu = [](double, double) { return 0.0; };
    const Thresholds t = compute_thresholds(m);
    const Brackets br = super_sub_pair(m, t, g);
    CHECK_FALSE(br.degraded);
    const ConditionReport rep = condition_report(m, t, g);
    const ConditionRecord& b = rep.find("uniqueness_B");
    CHECK(b.holds);
    CHECK(b.lhs == doctest::Approx(4.0));
    CHECK(b.rhs == doctest::Approx(0.0));
}

TEST_CASE("nonexistence implies the existence record fails") {
    const Grid g = Grid::interval(M_PI, 60);
    for (double a : {0.3, 0.9, 1.0}) {
        const GrowthModel m = classical_lv(a, 1.0, 0.1, 0.7, 0.1, 1.0);
        const ConditionReport rep = condition_report(m, compute_thresholds(m), g);
        if (rep.find("nonexistence_C").holds)
            CHECK_FALSE(rep.find("existence_A").holds);
    }
}

TEST_CASE("existence implies the perturbation hypotheses numerically") {
    const Grid g = Grid::interval(M_PI, 100);
    const GrowthModel models[] = {
        classical_lv(5.0, 1.0, 0.1, 5.0, 0.1, 1.0),
        classical_lv(3.0, 1.0, 0.05, 3.0, 0.05, 1.0),
        classical_lv(6.0, 1.2, 0.2, 5.5, 0.15, 1.1),
        nonlinear_demo(5.0, 5.0, 1.0, 0.1, 0.1, 1.0, 0.05),
    };
    for (const GrowthModel& m : models) {
        const ConditionReport rep = condition_report(m, compute_thresholds(m), g);
        if (rep.find("existence_A").holds) {
            CHECK(rep.find("perturbation_31A").evaluable);
            CHECK(rep.find("perturbation_31A").holds);
        }
    }
}

TEST_CASE("threshold sign checks need region-level thresholds") {
    const Grid g = Grid::interval(M_PI, 60);
    const GrowthModel m = classical_lv(4.0, 1.0, 0.1, 4.0, 0.1, 1.0);
    // Thresholds computed at the larger rates of a surrounding rectangle
    // leave a strict margin at the interior point.
    const GrowthModel corner = classical_lv(5.0, 1.0, 0.1, 5.0, 0.1, 1.0);
    const Thresholds region_t = compute_thresholds(corner);
    const ConditionReport rep = condition_report(m, region_t, g);
    CHECK(rep.find("cor42_C").holds);
    CHECK(rep.find("cor42_C").lhs == doctest::Approx(5.0));
}

TEST_CASE("report is deterministic") {
    const Grid g = Grid::interval(M_PI, 80);
    const GrowthModel m = classical_lv(5.0, 1.0, 0.1, 5.0, 0.1, 1.0);
    const Thresholds t = compute_thresholds(m);
    const std::string j1 = condition_report(m, t, g).to_json();
    const std::string j2 = condition_report(m, t, g).to_json();
    CHECK(j1 == j2);
}

TEST_CASE("report json is well formed and carries all six records") {
    const Grid g = Grid::interval(M_PI, 60);
    const GrowthModel m = classical_lv(5.0, 1.0, 0.1, 5.0, 0.1, 1.0);
    const ConditionReport rep = condition_report(m, compute_thresholds(m), g);
    const nlohmann::json j = nlohmann::json::parse(rep.to_json());
    CHECK(j["conditions"].size() == 6);
    CHECK(j.contains("lambda1"));
    CHECK(j.contains("h"));
    for (const auto& rec : j["conditions"]) {
        CHECK(rec.contains("name"));
        CHECK(rec.contains("lhs"));
        CHECK(rec.contains("rhs"));
        CHECK(rec.contains("holds"));
    }
}

} // TEST_SUITE
