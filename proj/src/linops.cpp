#include "coexist/linops.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "coexist/errors.hpp"

namespace coexist {

namespace {

// y = (-Lap + K) x, with K either a field or a constant.
void apply_operator(const Grid& grid, const ScalarField* Kfield, double Kconst,
                    const ScalarField& x, ScalarField& y) {
    y = apply_laplacian(grid, x);
    auto& yv = y.values();
    const auto& xv = x.values();
    if (Kfield) {
        const auto& kv = Kfield->values();
        for (size_t i = 0; i < yv.size(); ++i) yv[i] = -yv[i] + kv[i] * xv[i];
    } else {
        for (size_t i = 0; i < yv.size(); ++i) yv[i] = -yv[i] + Kconst * xv[i];
    }
}

// Plain CG from the current x; returns the recurrence residual norm reached.
// Breaks out once round-off stalls the residual, keeping the best iterate.
double cg_sweep(const Grid& grid, const ScalarField* Kfield, double Kconst,
                const ScalarField& rhs, ScalarField& x, double target, int& iter_budget) {
    ScalarField r(grid), p(grid), Ap(grid);
    apply_operator(grid, Kfield, Kconst, x, Ap);
    for (int i = 0; i < r.size(); ++i) r[i] = rhs[i] - Ap[i];
    double rr = dot(r, r);
    if (std::sqrt(rr) <= target) return std::sqrt(rr);
    p = r;

    ScalarField best_x = x;
    double best_rr = rr;
    double stall_ref = rr;
    int stall_countdown = 100;

    while (iter_budget > 0) {
        --iter_budget;
        apply_operator(grid, Kfield, Kconst, p, Ap);
        const double pAp = dot(p, Ap);
        if (!(pAp > 0.0)) break;
        const double alpha = rr / pAp;
        for (int i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
        for (int i = 0; i < r.size(); ++i) r[i] -= alpha * Ap[i];
        const double rr_new = dot(r, r);
        if (rr_new < best_rr) {
            best_rr = rr_new;
            best_x = x;
        }
        if (std::sqrt(rr_new) <= target) return std::sqrt(rr_new);
        if (--stall_countdown == 0) {
            if (best_rr > 0.98 * stall_ref) break; // no meaningful progress left
            stall_ref = best_rr;
            stall_countdown = 100;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (int i = 0; i < p.size(); ++i) p[i] = r[i] + beta * p[i];
    }
    x = best_x;
    return std::sqrt(best_rr);
}

ScalarField solve_impl(const Grid& grid, const ScalarField* Kfield, double Kconst,
                       const ScalarField& rhs, double tol, const SolveOptions& opts) {
    require_same_grid(grid, rhs, "solve_shifted_poisson");
    rhs.require_finite("solve_shifted_poisson rhs");
    if (Kfield) {
        require_same_grid(grid, *Kfield, "solve_shifted_poisson");
        if (min_value(*Kfield) < 0.0)
            throw ConfigError("solve_shifted_poisson: K must be nonnegative pointwise");
    } else if (Kconst < 0.0) {
        throw ConfigError("solve_shifted_poisson: K must be nonnegative");
    }

    const double bnorm = two_norm(rhs);
    if (bnorm == 0.0) return ScalarField(grid, 0.0);

    const double target = std::max(tol * bnorm, opts.abs_tol);
    int budget = opts.max_iter > 0 ? opts.max_iter : 20 * grid.size() + 500;

    ScalarField x = opts.x0 ? *opts.x0 : ScalarField(grid, 0.0);
    if (opts.x0) require_same_grid(grid, *opts.x0, "solve_shifted_poisson x0");

    double res = cg_sweep(grid, Kfield, Kconst, rhs, x, target, budget);

    // Recompute the true residual; restart on the defect if recurrence
    // drift or round-off left it above target.
    ScalarField Ax(grid);
    for (int attempt = 0; attempt < 2; ++attempt) {
        apply_operator(grid, Kfield, Kconst, x, Ax);
        ScalarField defect(grid);
        for (int i = 0; i < defect.size(); ++i) defect[i] = rhs[i] - Ax[i];
        res = two_norm(defect);
        if (res <= target) {
            x.require_finite("solve_shifted_poisson");
            return x;
        }
        if (budget <= 0) break;
        ScalarField corr(grid, 0.0);
        cg_sweep(grid, Kfield, Kconst, defect, corr, 0.25 * target, budget);
        for (int i = 0; i < x.size(); ++i) x[i] += corr[i];
    }
    apply_operator(grid, Kfield, Kconst, x, Ax);
    ScalarField defect(grid);
    for (int i = 0; i < defect.size(); ++i) defect[i] = rhs[i] - Ax[i];
    res = two_norm(defect);
    if (res <= target || opts.best_effort) {
        x.require_finite("solve_shifted_poisson");
        return x;
    }
    throw SolverError("solve_shifted_poisson: conjugate gradient did not reach tolerance",
                      res, opts.max_iter > 0 ? opts.max_iter : 20 * grid.size() + 500);
}

} // namespace

ScalarField solve_shifted_poisson(const Grid& grid, const ScalarField& K,
                                  const ScalarField& rhs, double tol,
                                  const SolveOptions& opts) {
    return solve_impl(grid, &K, 0.0, rhs, tol, opts);
}

ScalarField solve_shifted_poisson(const Grid& grid, double K,
                                  const ScalarField& rhs, double tol,
                                  const SolveOptions& opts) {
    return solve_impl(grid, nullptr, K, rhs, tol, opts);
}

double rayleigh_quotient(const Grid& grid, const ScalarField& q, const ScalarField& z) {
    require_same_grid(grid, q, "rayleigh_quotient");
    require_same_grid(grid, z, "rayleigh_quotient");
    const double zz = dot(z, z);
    if (zz == 0.0)
        throw ConfigError("rayleigh_quotient: trial field is zero");
    ScalarField Lz = apply_laplacian(grid, z);
    double num = 0.0;
    for (int i = 0; i < z.size(); ++i) num += (-Lz[i] + q[i] * z[i]) * z[i];
    return num / zz;
}

EigenResult principal_eigenpair(const Grid& grid, const ScalarField& q,
                                const EigenOptions& opts) {
    require_same_grid(grid, q, "principal_eigenpair");
    q.require_finite("principal_eigenpair q");

    const double sigma = std::max(0.0, -min_value(q)) + 1.0;
    ScalarField K(grid);
    for (int i = 0; i < K.size(); ++i) K[i] = q[i] + sigma;

    ScalarField z(grid, 1.0);
    ScalarField w = z;
    double lambda_prev = std::numeric_limits<double>::infinity();

    // Inner solves run best-effort against a target near the round-off
    // floor; convergence is judged on the measured eigen-residual of the
    // returned iterate, which is the quantity the result guarantees.
    SolveOptions sopts;
    sopts.abs_tol = 0.03 * opts.eig_tol;
    sopts.best_effort = true;

    for (int it = 1; it <= opts.max_outer; ++it) {
        sopts.x0 = &w;
        w = solve_shifted_poisson(grid, K, z, 5e-14, sopts);

        // Sup-normalize with the sign of the dominant entry so the max is +1.
        double peak = 0.0;
        for (int i = 0; i < w.size(); ++i)
            if (std::fabs(w[i]) > std::fabs(peak)) peak = w[i];
        if (peak == 0.0)
            throw SolverError("principal_eigenpair: iterate collapsed to zero", 0.0, it);
        for (int i = 0; i < w.size(); ++i) w[i] /= peak;

        ScalarField Aw(grid);
        apply_operator(grid, &K, 0.0, w, Aw);
        const double ww = dot(w, w);
        const double lambda = dot(Aw, w) / ww - sigma;

        double res = 0.0;
        for (int i = 0; i < w.size(); ++i)
            res = std::max(res, std::fabs(Aw[i] - sigma * w[i] - lambda * w[i]));

        if (std::fabs(lambda - lambda_prev) < opts.eig_tol && res <= opts.eig_tol &&
            min_value(w) > 0.0) {
            w.require_finite("principal_eigenpair");
            return EigenResult{lambda, w, it, res};
        }
        lambda_prev = lambda;
        z = w;
    }
    throw SolverError("principal_eigenpair: inverse power iteration did not converge",
                      std::fabs(lambda_prev), opts.max_outer);
}

double lambda1_zero(const Grid& grid, double eig_tol) {
    using Key = std::tuple<int, int, int, double, double, double>;
    static std::map<Key, double> cache;
    static std::mutex mutex;

    const Key key{static_cast<int>(grid.kind()), grid.nx(), grid.ny(),
                  grid.lx(), grid.ly(), eig_tol};
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    EigenOptions eo;
    eo.eig_tol = eig_tol;
    const double lambda = principal_eigenpair(grid, ScalarField(grid, 0.0), eo).lambda1;
    {
        std::lock_guard<std::mutex> lock(mutex);
        cache.emplace(key, lambda);
    }
    return lambda;
}

} // namespace coexist
