#pragma once

#include "coexist/grid.hpp"

namespace coexist {

struct SolveOptions {
    int max_iter = 0;               ///< 0 selects 20*size + 500
    double abs_tol = 0.0;           ///< extra absolute l2 target, 0 disables
    const ScalarField* x0 = nullptr; ///< initial guess, defaults to zero
    /// Return the best iterate instead of throwing when round-off stalls
    /// the residual above target. Used by callers that verify their own
    /// convergence measure on the returned iterate.
    bool best_effort = false;
};

/// Conjugate-gradient solve of (-Lap + K) w = rhs with K >= 0 pointwise,
/// so the operator is symmetric positive definite. Stops once
/// ||rhs - (-Lap+K)w||_2 <= max(tol*||rhs||_2, opts.abs_tol); the final
/// residual is re-evaluated from scratch and the solve restarted on the
/// defect if recurrence drift left it above target.
ScalarField solve_shifted_poisson(const Grid& grid, const ScalarField& K,
                                  const ScalarField& rhs, double tol,
                                  const SolveOptions& opts = {});

ScalarField solve_shifted_poisson(const Grid& grid, double K,
                                  const ScalarField& rhs, double tol,
                                  const SolveOptions& opts = {});

struct EigenResult {
    double lambda1 = 0.0;  ///< principal eigenvalue of -Lap + q
    ScalarField phi1;      ///< positive eigenfunction, sup-normalized to 1
    int iterations = 0;
    double residual = 0.0; ///< ||(-Lap+q)phi1 - lambda1*phi1||_inf
};

struct EigenOptions {
    double eig_tol = 1e-10;
    int max_outer = 500;
};

/// Principal (smallest) eigenpair of -Lap + q with Dirichlet boundary.
/// Shifts by sigma = max(0, -min q) + 1 to make the operator positive
/// definite, runs inverse power iteration from the all-ones vector, and
/// reports the Rayleigh quotient minus sigma. Converged when the Rayleigh
/// quotient stalls below eig_tol and the eigen-residual is below eig_tol.
EigenResult principal_eigenpair(const Grid& grid, const ScalarField& q,
                                const EigenOptions& opts = {});

/// lambda1 of -Lap on this grid (q = 0); memoized per grid descriptor.
double lambda1_zero(const Grid& grid, double eig_tol = 1e-10);

/// (<(-Lap)z, z> + <q z, z>) / <z, z> for a nonzero trial field z.
double rayleigh_quotient(const Grid& grid, const ScalarField& q, const ScalarField& z);

} // namespace coexist
