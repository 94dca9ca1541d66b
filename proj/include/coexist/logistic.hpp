#pragma once

#include <functional>

#include "coexist/grid.hpp"

namespace coexist {

/// Scalar growth rate for the logistic problem Lap z + z f(z) = 0 with
/// Dirichlet-zero boundary: f strictly decreasing on [0, c0] and
/// f(z) <= 0 for z >= c0.
struct ScalarGrowth {
    std::function<double(double)> f;
    std::function<double(double)> f_prime;
    double c0 = 0.0;
};

/// Spot-checks the ScalarGrowth invariants by sampling; throws ConfigError.
void validate(const ScalarGrowth& fg);

/// The logistic steady profile: either identically zero, or the positive
/// solution with 0 <= field <= c0 and equation residual below tolerance.
struct Theta {
    ScalarField field;
    bool is_zero = true;
    double residual = 0.0;
    int iterations = 0;
};

struct LogisticOptions {
    double log_tol = 1e-9;
    double eig_tol = 1e-10;
    int max_outer = 200000;
    double coupling_override = 0.0; ///< > 0 replaces the sampled coupling constant
    std::function<void(int, const ScalarField&)> observer;
};

/// Dichotomy plus monotone descent. If f(0) <= lambda1 of -Lap (ties within
/// eig_tol count as zero) the zero profile is returned. Otherwise iterates
/// z <- (-Lap + K)^{-1} (K z + z f(z)) downward from z = c0 with
/// K = 1.05 * sup |f(z) + z f'(z)| sampled on [0, c0], stopping when both
/// the sup-norm step and the equation residual drop below log_tol.
Theta solve_logistic(const Grid& grid, const ScalarGrowth& fg, const LogisticOptions& opts);

Theta solve_logistic(const Grid& grid, const ScalarGrowth& fg, double log_tol = 1e-9);

} // namespace coexist
