#include "coexist/logistic.hpp"

#include <cmath>

#include "coexist/errors.hpp"
#include "coexist/linops.hpp"

namespace coexist {

void validate(const ScalarGrowth& fg) {
    if (!fg.f || !fg.f_prime)
        throw ConfigError("scalar growth: f and f_prime must be set");
    if (!(fg.c0 > 0.0) || !std::isfinite(fg.c0))
        throw ConfigError("scalar growth: cap c0 must be positive and finite");
    if (fg.f(fg.c0) > 1e-12 * std::max(1.0, std::fabs(fg.f(0.0))))
        throw ConfigError("scalar growth: f(c0) must be nonpositive");
    const int samples = 64;
    double prev = fg.f(0.0);
    for (int i = 1; i <= samples; ++i) {
        const double z = fg.c0 * i / samples;
        const double cur = fg.f(z);
        if (!(cur < prev))
            throw ConfigError("scalar growth: f is not strictly decreasing on [0, c0]");
        prev = cur;
    }
}

namespace {

double sampled_coupling(const ScalarGrowth& fg) {
    const int samples = 1024;
    double sup = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double z = fg.c0 * i / samples;
        sup = std::max(sup, std::fabs(fg.f(z) + z * fg.f_prime(z)));
    }
    return 1.05 * sup;
}

} // namespace

Theta solve_logistic(const Grid& grid, const ScalarGrowth& fg, const LogisticOptions& opts) {
    validate(fg);

    const double lambda1 = lambda1_zero(grid, opts.eig_tol);
    const double f0 = fg.f(0.0);
    // Dichotomy with ties resolved as zero.
    if (f0 <= lambda1 + opts.eig_tol)
        return Theta{ScalarField(grid, 0.0), true, 0.0, 0};

    const double K = opts.coupling_override > 0.0 ? opts.coupling_override
                                                  : sampled_coupling(fg);
    const double slack = 1e-8 * (1.0 + fg.c0);
    const double cg_abs = 0.3 * opts.log_tol;

    ScalarField z(grid, fg.c0);
    ScalarField rhs(grid);
    SolveOptions sopts;
    sopts.abs_tol = cg_abs;

    for (int it = 1; it <= opts.max_outer; ++it) {
        for (int i = 0; i < z.size(); ++i) rhs[i] = z[i] * (K + fg.f(z[i]));
        sopts.x0 = &z;
        ScalarField z_next = solve_shifted_poisson(grid, K, rhs, 1e-12, sopts);

        double delta = 0.0;
        for (int i = 0; i < z.size(); ++i) {
            if (z_next[i] < -slack || z_next[i] > fg.c0 + slack)
                throw InternalError("solve_logistic: iterate escaped [0, c0], coupling constant too small");
            if (z_next[i] > z[i] + slack)
                throw InternalError("solve_logistic: iterate not monotone, coupling constant too small");
            delta = std::max(delta, std::fabs(z_next[i] - z[i]));
        }
        z = z_next;
        if (opts.observer) opts.observer(it, z);

        if (delta < opts.log_tol) {
            ScalarField lap = apply_laplacian(grid, z);
            double res = 0.0;
            for (int i = 0; i < z.size(); ++i)
                res = std::max(res, std::fabs(lap[i] + z[i] * fg.f(z[i])));
            if (res <= opts.log_tol) {
                if (min_value(z) <= 0.0)
                    throw InternalError("solve_logistic: positive branch produced a nonpositive value");
                z.require_finite("solve_logistic");
                return Theta{z, false, res, it};
            }
        }
    }
    throw SolverError("solve_logistic: monotone iteration did not converge",
                      0.0, opts.max_outer);
}

Theta solve_logistic(const Grid& grid, const ScalarGrowth& fg, double log_tol) {
    LogisticOptions opts;
    opts.log_tol = log_tol;
    return solve_logistic(grid, fg, opts);
}

} // namespace coexist
