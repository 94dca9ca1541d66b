#include "coexist/parabolic.hpp"

#include <cmath>
#include <limits>

#include "coexist/errors.hpp"
#include "coexist/linops.hpp"

namespace coexist {

double stable_dt(const GrowthModel& m, const Thresholds& t, int samples_per_axis) {
    double slope = 0.0;
    for (int i = 0; i < samples_per_axis; ++i) {
        const double u = t.k1 * i / (samples_per_axis - 1);
        for (int j = 0; j < samples_per_axis; ++j) {
            const double v = t.k2 * j / (samples_per_axis - 1);
            slope = std::max(slope, std::fabs(m.a - m.g(u, v) - u * m.gu(u, v)));
            slope = std::max(slope, std::fabs(m.d - m.h(u, v) - v * m.hv(u, v)));
        }
    }
    if (slope == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (2.0 * slope);
}

EvolutionResult evolve(const GrowthModel& m, const Grid& grid, const ScalarField& u0,
                       const ScalarField& v0, double dt, double t_end) {
    validate_basic(m);
    require_same_grid(grid, u0, "evolve");
    require_same_grid(grid, v0, "evolve");
    u0.require_finite("evolve u0");
    v0.require_finite("evolve v0");
    if (min_value(u0) < 0.0 || min_value(v0) < 0.0)
        throw ConfigError("evolve: initial data must be nonnegative");
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw ConfigError("evolve: dt and t_end must be positive");

    const Thresholds t = compute_thresholds(m);
    const double cap = stable_dt(m, t);
    if (dt > cap * (1.0 + 1e-12))
        throw ConfigError("evolve: dt exceeds the reaction stability cap " +
                          std::to_string(cap));

    if (inf_norm(u0) > 10.0 * t.k1 || inf_norm(v0) > 10.0 * t.k2)
        throw SolverError("evolve: initial data beyond the stability envelope", 0.0, 0);

    const double K = 1.0 / dt;
    const int steps = static_cast<int>(std::ceil(t_end / dt - 1e-9));

    EvolutionResult result{u0, v0, 0.0, 0, 0.0, 0};
    ScalarField rhs_u(grid), rhs_v(grid);
    SolveOptions su, sv;
    su.abs_tol = sv.abs_tol = 1e-10;

    for (int n = 0; n < steps; ++n) {
        ScalarField& u = result.u_final;
        ScalarField& v = result.v_final;
        for (int i = 0; i < grid.size(); ++i) {
            rhs_u[i] = u[i] * K + u[i] * (m.a - m.g(u[i], v[i]));
            rhs_v[i] = v[i] * K + v[i] * (m.d - m.h(u[i], v[i]));
        }
        su.x0 = &u;
        sv.x0 = &v;
        ScalarField u_next = solve_shifted_poisson(grid, K, rhs_u, 1e-12, su);
        ScalarField v_next = solve_shifted_poisson(grid, K, rhs_v, 1e-12, sv);

        double change = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
            if (u_next[i] < 0.0) {
                u_next[i] = 0.0;
                ++result.clip_count;
            }
            if (v_next[i] < 0.0) {
                v_next[i] = 0.0;
                ++result.clip_count;
            }
            change = std::max(change, std::fabs(u_next[i] - u[i]));
            change = std::max(change, std::fabs(v_next[i] - v[i]));
        }
        if (inf_norm(u_next) > 10.0 * t.k1 || inf_norm(v_next) > 10.0 * t.k2)
            throw SolverError("evolve: density blew past the stability envelope",
                              inf_norm(u_next), n + 1);

        u = u_next;
        v = v_next;
        result.final_change_rate = change / dt;
        result.step_count = n + 1;
        result.t_final = (n + 1) * dt;
    }
    result.u_final.require_finite("evolve");
    result.v_final.require_finite("evolve");
    return result;
}

} // namespace coexist
