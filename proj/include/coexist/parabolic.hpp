#pragma once

#include "coexist/grid.hpp"
#include "coexist/model.hpp"

namespace coexist {

struct EvolutionResult {
    ScalarField u_final, v_final;
    double t_final = 0.0;
    int step_count = 0;
    double final_change_rate = 0.0; ///< sup-norm step change over dt at the last step
    long clip_count = 0;            ///< negative undershoots clipped to zero
};

/// Step-size cap for the explicit reaction treatment:
/// 1 / (2 max over B of the reaction slopes |a - g - u gu| and |d - h - v hv|).
double stable_dt(const GrowthModel& m, const Thresholds& t, int samples_per_axis = 256);

/// Semi-implicit evolution of the dynamic system: implicit diffusion,
/// explicit reaction. Each step solves (-Lap + 1/dt) w = u/dt + u (a - g(u,v))
/// and the v analogue, clips negative undershoots to zero, and aborts with
/// a stability error when a density exceeds ten times its threshold.
/// Runs ceil(t_end/dt) uniform steps.
EvolutionResult evolve(const GrowthModel& m, const Grid& grid, const ScalarField& u0,
                       const ScalarField& v0, double dt, double t_end);

} // namespace coexist
