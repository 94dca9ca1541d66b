#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "coexist/coexistence.hpp"
#include "coexist/errors.hpp"
#include "coexist/grid.hpp"
#include "coexist/linops.hpp"
#include "coexist/logistic.hpp"
#include "coexist/model.hpp"
#include "oracles.hpp"

using namespace coexist;

namespace {

const GrowthModel kLv = classical_lv(5.0, 1.0, 0.1, 5.0, 0.1, 1.0);

Theta scalar_theta(const Grid& g, double a, double b, double log_tol = 1e-9) {
    ScalarGrowth fg;
    fg.f = [a, b](double z) { return a - b * z; };
    fg.f_prime = [b](double) { return -b; };
    fg.c0 = a / b;
    return solve_logistic(g, fg, log_tol);
}

} // namespace

TEST_SUITE("coexistence") {

TEST_CASE("brackets reproduce the two scalar logistic profiles") {
    const Grid g = Grid::interval(M_PI, 120);
    const Thresholds t = compute_thresholds(kLv);
    const Brackets br = super_sub_pair(kLv, t, g);
    CHECK_FALSE(br.degraded);

    // u_upper solves f(z) = 5 - z, u_lower solves f(z) = 4.5 - z.
    const Theta upper = scalar_theta(g, 5.0, 1.0);
    const Theta lower = scalar_theta(g, 4.5, 1.0);
    for (int i = 0; i < g.size(); ++i) {
        CHECK(br.u_upper.field[i] == doctest::Approx(upper.field[i]).epsilon(1e-7));
        CHECK(br.u_lower.field[i] == doctest::Approx(lower.field[i]).epsilon(1e-7));
        CHECK(br.u_lower.field[i] < br.u_upper.field[i]); // strict in the interior
        CHECK(br.v_lower.field[i] < br.v_upper.field[i]);
    }
}

TEST_CASE("subcritical rates give an all-zero degraded bracket") {
    const Grid g = Grid::interval(M_PI, 60);
    const GrowthModel m = classical_lv(0.5, 1.0, 0.1, 0.5, 0.1, 1.0);
    const Brackets br = super_sub_pair(m, compute_thresholds(m), g);
    CHECK(br.degraded);
    CHECK(br.u_upper.is_zero);
    CHECK(br.u_lower.is_zero);
    CHECK(br.v_upper.is_zero);
    CHECK(br.v_lower.is_zero);
}

TEST_CASE("symmetric parameters give symmetric brackets") {
    const Grid g = Grid::interval(M_PI, 80);
    const Brackets br = super_sub_pair(kLv, compute_thresholds(kLv), g);
    for (int i = 0; i < g.size(); ++i) {
        CHECK(br.u_upper.field[i] == doctest::Approx(br.v_upper.field[i]).epsilon(1e-10));
        CHECK(br.u_lower.field[i] == doctest::Approx(br.v_lower.field[i]).epsilon(1e-10));
    }
}

TEST_CASE("both corners agree in the uniqueness regime") {
    const Grid g = Grid::interval(M_PI, 120);
    const Thresholds t = compute_thresholds(kLv);
    const Brackets br = super_sub_pair(kLv, t, g);
    const SteadyState up = monotone_solve(kLv, g, br, StartCorner::FromUpper);
    const SteadyState low = monotone_solve(kLv, g, br, StartCorner::FromLower);
    CHECK(up.residual_u <= 1e-8);
    CHECK(up.residual_v <= 1e-8);
    double gap = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        gap = std::max(gap, std::fabs(up.u[i] - low.u[i]));
        gap = std::max(gap, std::fabs(up.v[i] - low.v[i]));
    }
    CHECK(gap < 1e-6);
}

TEST_CASE("a subcritical u rate collapses u to zero") {
    const Grid g = Grid::interval(M_PI, 100);
    const GrowthModel m = classical_lv(0.5, 1.0, 0.1, 5.0, 0.1, 1.0);
    const Thresholds t = compute_thresholds(m);
    const Brackets br = super_sub_pair(m, t, g);
    const SteadyState up = monotone_solve(m, g, br, StartCorner::FromUpper);
    CHECK(inf_norm(up.u) < 1e-6);
    CHECK(inf_norm(up.v) > 1.0);
}

TEST_CASE("fully symmetric system reduces to one logistic profile") {
    const Grid g = Grid::interval(M_PI, 150);
    const Thresholds t = compute_thresholds(kLv);
    const Brackets br = super_sub_pair(kLv, t, g);
    const SteadyState s = monotone_solve(kLv, g, br, StartCorner::FromUpper);
    for (int i = 0; i < g.size(); ++i)
        CHECK(std::fabs(s.u[i] - s.v[i]) <= 1e-7);
    const Theta reduced = scalar_theta(g, 5.0, 1.1);
    for (int i = 0; i < g.size(); ++i)
        CHECK(std::fabs(s.u[i] - reduced.field[i]) <= 1e-6);
}

TEST_CASE("corner sequences squeeze monotonically") {
    const Grid g = Grid::interval(M_PI, 60);
    const Thresholds t = compute_thresholds(kLv);
    const Brackets br = super_sub_pair(kLv, t, g);

    std::vector<ScalarField> up_u, up_v, low_u, low_v;
    MonotoneOptions up_opts, low_opts;
    up_opts.observer = [&](int, const ScalarField& u, const ScalarField& v) {
        up_u.push_back(u);
        up_v.push_back(v);
    };
    low_opts.observer = [&](int, const ScalarField& u, const ScalarField& v) {
        low_u.push_back(u);
        low_v.push_back(v);
    };
    monotone_solve(kLv, g, br, StartCorner::FromUpper, up_opts);
    monotone_solve(kLv, g, br, StartCorner::FromLower, low_opts);

    const size_t steps = std::min(up_u.size(), low_u.size());
    REQUIRE(steps > 3);
    for (size_t k = 0; k < steps; ++k) {
        for (int i = 0; i < g.size(); ++i) {
            CHECK(low_u[k][i] <= up_u[k][i] + 1e-9);
            CHECK(up_v[k][i] <= low_v[k][i] + 1e-9);
            if (k > 0) {
                CHECK(up_u[k][i] <= up_u[k - 1][i] + 1e-9);  // upper u descends
                CHECK(low_u[k][i] >= low_u[k - 1][i] - 1e-9); // lower u ascends
            }
        }
    }
}

TEST_CASE("converged states sit inside the theta sandwich") {
    const Grid g = Grid::interval(M_PI, 100);
    const Thresholds t = compute_thresholds(kLv);
    const Brackets br = super_sub_pair(kLv, t, g);
    for (StartCorner corner : {StartCorner::FromUpper, StartCorner::FromLower}) {
        const SteadyState s = monotone_solve(kLv, g, br, corner);
        for (int i = 0; i < g.size(); ++i) {
            CHECK(s.u[i] >= br.u_lower.field[i] - 1e-7);
            CHECK(s.u[i] <= br.u_upper.field[i] + 1e-7);
            CHECK(s.v[i] >= br.v_lower.field[i] - 1e-7);
            CHECK(s.v[i] <= br.v_upper.field[i] + 1e-7);
        }
    }
}

TEST_CASE("a converged positive state is a principal eigenfunction at zero") {
    const Grid g = Grid::interval(M_PI, 100);
    const Thresholds t = compute_thresholds(kLv);
    const Brackets br = super_sub_pair(kLv, t, g, 1e-10);
    MonotoneOptions mo;
    mo.sys_tol = 1e-9;
    const SteadyState s = monotone_solve(kLv, g, br, StartCorner::FromUpper, mo);
    ScalarField qu(g), qv(g);
    for (int i = 0; i < g.size(); ++i) {
        qu[i] = kLv.g(s.u[i], s.v[i]) - kLv.a;
        qv[i] = kLv.h(s.u[i], s.v[i]) - kLv.d;
    }
    CHECK(std::fabs(principal_eigenpair(g, qu).lambda1) <= 1e-9);
    CHECK(std::fabs(principal_eigenpair(g, qv).lambda1) <= 1e-9);
}

TEST_CASE("species swap mirrors the state") {
    const Grid g = Grid::interval(M_PI, 80);
    const GrowthModel m = classical_lv(5.0, 1.0, 0.1, 4.0, 0.12, 1.1);
    const GrowthModel mirrored = classical_lv(4.0, 1.1, 0.12, 5.0, 0.1, 1.0);

    const SteadyState s = monotone_solve(m, g, super_sub_pair(m, compute_thresholds(m), g),
                                         StartCorner::FromUpper);
    const SteadyState sm = monotone_solve(
        mirrored, g, super_sub_pair(mirrored, compute_thresholds(mirrored), g),
        StartCorner::FromUpper);
    for (int i = 0; i < g.size(); ++i) {
        CHECK(std::fabs(s.u[i] - sm.v[i]) <= 1e-6);
        CHECK(std::fabs(s.v[i] - sm.u[i]) <= 1e-6);
    }
}

TEST_CASE("system residual vanishes at the origin state") {
    const Grid g = Grid::interval(M_PI, 40);
    auto [ru, rv] = system_residual(kLv, g, ScalarField(g, 0.0), ScalarField(g, 0.0));
    CHECK(inf_norm(ru) == 0.0);
    CHECK(inf_norm(rv) == 0.0);
}

TEST_CASE("residual grows linearly under small perturbations") {
    const Grid g = Grid::interval(M_PI, 100);
    const Thresholds t = compute_thresholds(kLv);
    const Brackets br = super_sub_pair(kLv, t, g, 1e-10);
    MonotoneOptions mo;
    mo.sys_tol = 1e-10;
    const SteadyState s = monotone_solve(kLv, g, br, StartCorner::FromUpper, mo);
    const EigenResult eig = principal_eigenpair(g, ScalarField(g, 0.0));

    const auto perturbed_norm = [&](double delta) {
        ScalarField u(g);
        for (int i = 0; i < g.size(); ++i) u[i] = s.u[i] + delta * eig.phi1[i];
        auto [ru, rv] = system_residual(kLv, g, u, s.v);
        (void)rv;
        return inf_norm(ru);
    };
    const double r1 = perturbed_norm(1e-3);
    const double r2 = perturbed_norm(2e-3);
    CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("linearization at the origin is two decoupled shifted laplacians") {
    const Grid g = Grid::interval(M_PI, 50);
    const FrechetOperator A(kLv, g, ScalarField(g, 0.0), ScalarField(g, 0.0));
    std::mt19937 rng(2);
    const ScalarField phi = oracles::random_field(g, rng);
    const ScalarField psi = oracles::random_field(g, rng);
    auto [au, av] = A.apply(phi, psi);
    const ScalarField lphi = apply_laplacian(g, phi);
    const ScalarField lpsi = apply_laplacian(g, psi);
    for (int i = 0; i < g.size(); ++i) {
        CHECK(au[i] == doctest::Approx(-lphi[i] - kLv.a * phi[i]).epsilon(1e-12));
        CHECK(av[i] == doctest::Approx(-lpsi[i] - kLv.d * psi[i]).epsilon(1e-12));
    }
}

TEST_CASE("linearization matches central differences of the residual") {
    const Grid g = Grid::interval(M_PI, 120);
    const GrowthModel m = nonlinear_demo(5.0, 5.0, 1.0, 0.1, 0.1, 1.0, 0.05);
    const Thresholds t = compute_thresholds(m);
    const Brackets br = super_sub_pair(m, t, g);
    const SteadyState s = monotone_solve(m, g, br, StartCorner::FromUpper);
    const FrechetOperator A = assemble_frechet_apply(m, s);

    std::mt19937 rng(9);
    const double eps = 1e-6;
    for (int trial = 0; trial < 10; ++trial) {
        const ScalarField phi = oracles::random_field(g, rng);
        const ScalarField psi = oracles::random_field(g, rng);
        auto [au, av] = A.apply(phi, psi);

        ScalarField up(g), vp(g), um(g), vm(g);
        for (int i = 0; i < g.size(); ++i) {
            up[i] = s.u[i] + eps * phi[i];
            vp[i] = s.v[i] + eps * psi[i];
            um[i] = s.u[i] - eps * phi[i];
            vm[i] = s.v[i] - eps * psi[i];
        }
        auto [rup, rvp] = system_residual(m, g, up, vp);
        auto [rum, rvm] = system_residual(m, g, um, vm);

        // The operator action is the negative of the residual derivative.
        double err = 0.0, scale = 0.0;
        for (int i = 0; i < g.size(); ++i) {
            const double fd_u = -(rup[i] - rum[i]) / (2.0 * eps);
            const double fd_v = -(rvp[i] - rvm[i]) / (2.0 * eps);
            err = std::max(err, std::fabs(au[i] - fd_u));
            err = std::max(err, std::fabs(av[i] - fd_v));
            scale = std::max(scale, std::max(std::fabs(au[i]), std::fabs(av[i])));
        }
        CHECK(err <= 1e-5 * scale);
    }
}

TEST_CASE("linearization is linear and its adjoint is consistent") {
    const Grid g = Grid::interval(2.0, 40);
    const Thresholds t = compute_thresholds(kLv);
    const Brackets br = super_sub_pair(kLv, t, g);
    const SteadyState s = monotone_solve(kLv, g, br, StartCorner::FromUpper);
    const FrechetOperator A = assemble_frechet_apply(kLv, s);

    std::mt19937 rng(31);
    const ScalarField p1 = oracles::random_field(g, rng);
    const ScalarField q1 = oracles::random_field(g, rng);
    const ScalarField p2 = oracles::random_field(g, rng);
    const ScalarField q2 = oracles::random_field(g, rng);

    ScalarField pc(g), qc(g);
    for (int i = 0; i < g.size(); ++i) {
        pc[i] = 2.0 * p1[i] - 0.7 * p2[i];
        qc[i] = 2.0 * q1[i] - 0.7 * q2[i];
    }
    auto [c_u, c_v] = A.apply(pc, qc);
    auto [a1u, a1v] = A.apply(p1, q1);
    auto [a2u, a2v] = A.apply(p2, q2);
    for (int i = 0; i < g.size(); ++i) {
        CHECK(c_u[i] == doctest::Approx(2.0 * a1u[i] - 0.7 * a2u[i]).epsilon(1e-10));
        CHECK(c_v[i] == doctest::Approx(2.0 * a1v[i] - 0.7 * a2v[i]).epsilon(1e-10));
    }

    // <A x, y> == <x, A^T y> for random pairs.
    auto [ax_u, ax_v] = A.apply(p1, q1);
    auto [aty_u, aty_v] = A.apply_adjoint(p2, q2);
    const double left = dot(ax_u, p2) + dot(ax_v, q2);
    const double right = dot(p1, aty_u) + dot(q1, aty_v);
    CHECK(left == doctest::Approx(right).epsilon(1e-11));
}

TEST_CASE("invertibility condition holds at the lv coexistence state") {
    const Grid g = Grid::interval(M_PI, 120);
    const Thresholds t = compute_thresholds(kLv);
    const Brackets br = super_sub_pair(kLv, t, g);
    const SteadyState s = monotone_solve(kLv, g, br, StartCorner::FromUpper);
    const InvertibilityResult inv = invertibility_check(kLv, t, s);
    CHECK(inv.condition_holds);
    REQUIRE(inv.sigma_min.has_value());
    CHECK(*inv.sigma_min > 1e-6);
}

TEST_CASE("invertibility condition fails at the origin state") {
    const Grid g = Grid::interval(M_PI, 60);
    const Thresholds t = compute_thresholds(kLv);
    SteadyState zero{ScalarField(g, 0.0), ScalarField(g, 0.0), 0.0, 0.0, 0,
                     StartCorner::FromUpper};
    const InvertibilityResult inv = invertibility_check(kLv, t, zero);
    CHECK_FALSE(inv.condition_holds);
}

TEST_CASE("newton polish reduces the residual of a perturbed state") {
    const Grid g = Grid::interval(M_PI, 120);
    const Thresholds t = compute_thresholds(kLv);
    const Brackets br = super_sub_pair(kLv, t, g);
    SteadyState s = monotone_solve(kLv, g, br, StartCorner::FromUpper);
    const EigenResult eig = principal_eigenpair(g, ScalarField(g, 0.0));
    for (int i = 0; i < g.size(); ++i) s.u[i] += 1e-4 * eig.phi1[i];
    auto [ru, rv] = system_residual(kLv, g, s.u, s.v);
    s.residual_u = inf_norm(ru);
    s.residual_v = inf_norm(rv);
    const double before = std::max(s.residual_u, s.residual_v);

    const SteadyState refined = newton_refine(kLv, g, s);
    const double after = std::max(refined.residual_u, refined.residual_v);
    CHECK(after < 1e-3 * before);
}

TEST_CASE("small 2d coexistence solve converges") {
    const Grid g = Grid::rectangle(1.0, 1.0, 12, 12);
    // lambda1 is near 2 pi^2 on the unit square, so rates must be large.
    const GrowthModel m = classical_lv(25.0, 1.0, 0.1, 25.0, 0.1, 1.0);
    const Thresholds t = compute_thresholds(m);
    const Brackets br = super_sub_pair(m, t, g);
    CHECK_FALSE(br.degraded);
    const SteadyState up = monotone_solve(m, g, br, StartCorner::FromUpper);
    const SteadyState low = monotone_solve(m, g, br, StartCorner::FromLower);
    CHECK(up.residual_u <= 1e-8);
    double gap = 0.0;
    for (int i = 0; i < g.size(); ++i)
        gap = std::max(gap, std::fabs(up.u[i] - low.u[i]));
    CHECK(gap < 1e-6);
}

} // TEST_SUITE
