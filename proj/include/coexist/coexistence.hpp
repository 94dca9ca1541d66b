#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "coexist/grid.hpp"
#include "coexist/logistic.hpp"
#include "coexist/model.hpp"

namespace coexist {

/// The four logistic profiles bracketing every positive solution pair:
/// u_lower <= u <= u_upper and v_lower <= v <= v_upper pointwise.
struct Brackets {
    Theta u_upper, u_lower, v_upper, v_lower;
    double k1 = 0.0, k2 = 0.0;
    bool degraded = false; ///< a lower profile vanished; the bracket does not pinch
};

/// Builds the brackets by four logistic solves: u_upper from a - g(., 0),
/// u_lower from a - g(., k2), v_upper from d - h(0, .), v_lower from
/// d - h(k1, .). When the rates are too small the lower profiles are zero
/// and the degraded flag is set.
Brackets super_sub_pair(const GrowthModel& m, const Thresholds& t, const Grid& grid,
                        double log_tol = 1e-9);

enum class StartCorner { FromUpper, FromLower };

struct SteadyState {
    ScalarField u, v;
    double residual_u = 0.0, residual_v = 0.0;
    int iterations = 0;
    StartCorner start = StartCorner::FromUpper;
};

struct MonotoneOptions {
    double sys_tol = 1e-8;
    int max_outer = 10000;
    /// Seeds the inner linear-solver initial guesses only; the iterate
    /// sequence itself always starts at the bracket corner, so the
    /// monotone squeeze and the corner-agreement evidence are preserved.
    const SteadyState* warm = nullptr;
    std::function<void(int, const ScalarField&, const ScalarField&)> observer;
};

/// Coupled Picard iteration (u, v) <- (-Lap + K)^{-1}(K u + u (a - g(u, v)),
/// K v + v (d - h(u, v))) from one corner of the bracket box. FromUpper
/// starts at (u_upper, v_lower) and squeezes downward in u, upward in v;
/// FromLower mirrors it. K is 1.05 times the max row sum of the reaction
/// linearization over B, which makes each update monotone in its own
/// variable. Stops when both the sup-norm step and the equation residuals
/// drop below sys_tol.
SteadyState monotone_solve(const GrowthModel& m, const Grid& grid, const Brackets& br,
                           StartCorner start, const MonotoneOptions& opts);

SteadyState monotone_solve(const GrowthModel& m, const Grid& grid, const Brackets& br,
                           StartCorner start, double sys_tol = 1e-8);

/// (Lap u + u (a - g(u,v)), Lap v + v (d - h(u,v))) with the discrete Laplacian.
std::pair<ScalarField, ScalarField> system_residual(const GrowthModel& m, const Grid& grid,
                                                    const ScalarField& u,
                                                    const ScalarField& v);

/// The 2x2 block linearization at a state (u, v):
///   [ -Lap + g + u gu - a ,        u gv         ]
///   [        v hu         , -Lap + h + v hv - d ]
/// applied matrix-free to direction pairs. Its action is the negative of
/// the directional derivative of system_residual.
class FrechetOperator {
public:
    FrechetOperator(const GrowthModel& m, const Grid& grid, const ScalarField& u,
                    const ScalarField& v);

    std::pair<ScalarField, ScalarField> apply(const ScalarField& phi,
                                              const ScalarField& psi) const;
    std::pair<ScalarField, ScalarField> apply_adjoint(const ScalarField& phi,
                                                      const ScalarField& psi) const;

    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    ScalarField cuu_, cuv_, cvu_, cvv_;
};

FrechetOperator assemble_frechet_apply(const GrowthModel& m, const SteadyState& state);

/// True when 4 inf_B(gu) inf_B(hv) u v > (sup_B(gv) u + sup_B(hu) v)^2
/// strictly at every interior node.
bool frechet_condition_pointwise(const DerivativeBounds& b, const ScalarField& u,
                                 const ScalarField& v);

struct SigmaOptions {
    double tol = 1e-8;
    int max_outer = 200;
};

struct InvertibilityResult {
    bool condition_holds = false;
    std::optional<double> sigma_min; ///< empty when the estimate did not converge
    int iterations = 0;
};

/// Evaluates the pointwise sufficient condition above and estimates the
/// smallest singular value of the linearization by inverse power iteration
/// on A^T A (the adjoint applied through the block structure).
InvertibilityResult invertibility_check(const GrowthModel& m, const Thresholds& t,
                                        const SteadyState& state,
                                        const SigmaOptions& opts = {});

/// Optional damped-Newton polish: at most max_steps steps, each halved
/// until the residual decreases; returns the refined state.
SteadyState newton_refine(const GrowthModel& m, const Grid& grid, const SteadyState& state,
                          int max_steps = 10);

/// 1.05 times the max over B of the reaction-linearization row sums
/// (|a-g| + u|gu| + u|gv| versus v|hu| + |d-h| + v|hv|), lattice sampled.
double picard_coupling_constant(const GrowthModel& m, double k1, double k2,
                                int samples_per_axis = 256);

} // namespace coexist
