#include "coexist/coexistence.hpp"

#include <algorithm>
#include <cmath>

#include "coexist/errors.hpp"
#include "coexist/linops.hpp"

namespace coexist {

Brackets super_sub_pair(const GrowthModel& m, const Thresholds& t, const Grid& grid,
                        double log_tol) {
    validate_basic(m);

    const auto solve_species = [&](double rate, const Rate2& g, const Rate2& gz,
                                   bool u_species, double other, double cap) {
        ScalarGrowth fg;
        if (u_species) {
            fg.f = [rate, &g, other](double z) { return rate - g(z, other); };
            fg.f_prime = [&gz, other](double z) { return -gz(z, other); };
        } else {
            fg.f = [rate, &g, other](double z) { return rate - g(other, z); };
            fg.f_prime = [&gz, other](double z) { return -gz(other, z); };
        }
        fg.c0 = cap;
        return solve_logistic(grid, fg, log_tol);
    };

    Brackets br{solve_species(m.a, m.g, m.gu, true, 0.0, t.k1),
                solve_species(m.a, m.g, m.gu, true, t.k2, t.k1),
                solve_species(m.d, m.h, m.hv, false, 0.0, t.k2),
                solve_species(m.d, m.h, m.hv, false, t.k1, t.k2),
                t.k1, t.k2, false};
    br.degraded = br.u_lower.is_zero || br.v_lower.is_zero;

    for (int i = 0; i < grid.size(); ++i) {
        if (br.u_lower.field[i] > br.u_upper.field[i] + 10.0 * log_tol ||
            br.v_lower.field[i] > br.v_upper.field[i] + 10.0 * log_tol)
            throw InternalError("super_sub_pair: bracket ordering violated");
    }
    return br;
}

double picard_coupling_constant(const GrowthModel& m, double k1, double k2,
                                int samples_per_axis) {
    double sup = 0.0;
    for (int i = 0; i < samples_per_axis; ++i) {
        const double u = k1 * i / (samples_per_axis - 1);
        for (int j = 0; j < samples_per_axis; ++j) {
            const double v = k2 * j / (samples_per_axis - 1);
            const double row_u = std::fabs(m.a - m.g(u, v)) + u * std::fabs(m.gu(u, v)) +
                                 u * std::fabs(m.gv(u, v));
            const double row_v = v * std::fabs(m.hu(u, v)) + std::fabs(m.d - m.h(u, v)) +
                                 v * std::fabs(m.hv(u, v));
            sup = std::max(sup, std::max(row_u, row_v));
        }
    }
    return 1.05 * sup;
}

SteadyState monotone_solve(const GrowthModel& m, const Grid& grid, const Brackets& br,
                           StartCorner start, const MonotoneOptions& opts) {
    require_same_grid(grid, br.u_upper.field, "monotone_solve");
    const double K = picard_coupling_constant(m, br.k1, br.k2);
    const bool from_upper = (start == StartCorner::FromUpper);

    ScalarField u = from_upper ? br.u_upper.field : br.u_lower.field;
    ScalarField v = from_upper ? br.v_lower.field : br.v_upper.field;

    const double slack = 1e-8 * (1.0 + std::max(br.k1, br.k2));
    const double cg_abs = 0.3 * opts.sys_tol;

    ScalarField rhs_u(grid), rhs_v(grid);
    SolveOptions su, sv;
    su.abs_tol = sv.abs_tol = cg_abs;

    for (int it = 1; it <= opts.max_outer; ++it) {
        for (int i = 0; i < grid.size(); ++i) {
            rhs_u[i] = u[i] * (K + m.a - m.g(u[i], v[i]));
            rhs_v[i] = v[i] * (K + m.d - m.h(u[i], v[i]));
        }
        su.x0 = (it == 1 && opts.warm) ? &opts.warm->u : &u;
        sv.x0 = (it == 1 && opts.warm) ? &opts.warm->v : &v;
        ScalarField u_next = solve_shifted_poisson(grid, K, rhs_u, 1e-12, su);
        ScalarField v_next = solve_shifted_poisson(grid, K, rhs_v, 1e-12, sv);

        double delta = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
            if (u_next[i] < -slack || u_next[i] > br.k1 + slack ||
                v_next[i] < -slack || v_next[i] > br.k2 + slack)
                throw InternalError("monotone_solve: iterate escaped the state box, coupling constant too small");
            const double du = u_next[i] - u[i];
            const double dv = v_next[i] - v[i];
            const bool ok = from_upper ? (du <= slack && dv >= -slack)
                                       : (du >= -slack && dv <= slack);
            if (!ok)
                throw InternalError("monotone_solve: iterate not monotone, coupling constant too small");
            delta = std::max(delta, std::max(std::fabs(du), std::fabs(dv)));
        }
        u = u_next;
        v = v_next;
        if (opts.observer) opts.observer(it, u, v);

        if (delta < opts.sys_tol) {
            auto [ru, rv] = system_residual(m, grid, u, v);
            const double res_u = inf_norm(ru);
            const double res_v = inf_norm(rv);
            if (res_u <= opts.sys_tol && res_v <= opts.sys_tol) {
                if (min_value(u) < 0.0 || min_value(v) < 0.0)
                    throw InternalError("monotone_solve: converged state has a negative value");
                return SteadyState{u, v, res_u, res_v, it, start};
            }
        }
    }
    throw SolverError("monotone_solve: coupled iteration did not converge", 0.0,
                      opts.max_outer);
}

SteadyState monotone_solve(const GrowthModel& m, const Grid& grid, const Brackets& br,
                           StartCorner start, double sys_tol) {
    MonotoneOptions opts;
    opts.sys_tol = sys_tol;
    return monotone_solve(m, grid, br, start, opts);
}

std::pair<ScalarField, ScalarField> system_residual(const GrowthModel& m, const Grid& grid,
                                                    const ScalarField& u,
                                                    const ScalarField& v) {
    require_same_grid(grid, u, "system_residual");
    require_same_grid(grid, v, "system_residual");
    ScalarField ru = apply_laplacian(grid, u);
    ScalarField rv = apply_laplacian(grid, v);
    for (int i = 0; i < grid.size(); ++i) {
        ru[i] += u[i] * (m.a - m.g(u[i], v[i]));
        rv[i] += v[i] * (m.d - m.h(u[i], v[i]));
    }
    return {ru, rv};
}

FrechetOperator::FrechetOperator(const GrowthModel& m, const Grid& grid,
                                 const ScalarField& u, const ScalarField& v)
    : grid_(grid), cuu_(grid), cuv_(grid), cvu_(grid), cvv_(grid) {
    require_same_grid(grid, u, "FrechetOperator");
    require_same_grid(grid, v, "FrechetOperator");
    for (int i = 0; i < grid.size(); ++i) {
        cuu_[i] = m.g(u[i], v[i]) + u[i] * m.gu(u[i], v[i]) - m.a;
        cuv_[i] = u[i] * m.gv(u[i], v[i]);
        cvu_[i] = v[i] * m.hu(u[i], v[i]);
        cvv_[i] = m.h(u[i], v[i]) + v[i] * m.hv(u[i], v[i]) - m.d;
    }
}

std::pair<ScalarField, ScalarField> FrechetOperator::apply(const ScalarField& phi,
                                                           const ScalarField& psi) const {
    require_same_grid(grid_, phi, "FrechetOperator::apply");
    require_same_grid(grid_, psi, "FrechetOperator::apply");
    ScalarField out_u = apply_laplacian(grid_, phi);
    ScalarField out_v = apply_laplacian(grid_, psi);
    for (int i = 0; i < grid_.size(); ++i) {
        out_u[i] = -out_u[i] + cuu_[i] * phi[i] + cuv_[i] * psi[i];
        out_v[i] = -out_v[i] + cvu_[i] * phi[i] + cvv_[i] * psi[i];
    }
    return {out_u, out_v};
}

std::pair<ScalarField, ScalarField> FrechetOperator::apply_adjoint(
    const ScalarField& phi, const ScalarField& psi) const {
    require_same_grid(grid_, phi, "FrechetOperator::apply_adjoint");
    require_same_grid(grid_, psi, "FrechetOperator::apply_adjoint");
    ScalarField out_u = apply_laplacian(grid_, phi);
    ScalarField out_v = apply_laplacian(grid_, psi);
    for (int i = 0; i < grid_.size(); ++i) {
        out_u[i] = -out_u[i] + cuu_[i] * phi[i] + cvu_[i] * psi[i];
        out_v[i] = -out_v[i] + cuv_[i] * phi[i] + cvv_[i] * psi[i];
    }
    return {out_u, out_v};
}

FrechetOperator assemble_frechet_apply(const GrowthModel& m, const SteadyState& state) {
    return FrechetOperator(m, state.u.grid(), state.u, state.v);
}

bool frechet_condition_pointwise(const DerivativeBounds& b, const ScalarField& u,
                                 const ScalarField& v) {
    for (int i = 0; i < u.size(); ++i) {
        const double lhs = 4.0 * b.inf_gu * b.inf_hv * u[i] * v[i];
        const double mix = b.sup_gv * u[i] + b.sup_hu * v[i];
        if (!(lhs > mix * mix)) return false;
    }
    return true;
}

namespace {

// CG on the normal equations A^T A x = b for the block operator.
// Returns false when the iteration budget runs out.
bool cg_normal_equations(const FrechetOperator& A, const ScalarField& bu,
                         const ScalarField& bv, ScalarField& xu, ScalarField& xv,
                         double rel_tol, int max_iter) {
    const Grid& grid = A.grid();
    const auto apply_AtA = [&](const ScalarField& pu, const ScalarField& pv) {
        auto [au, av] = A.apply(pu, pv);
        return A.apply_adjoint(au, av);
    };

    auto [Axu, Axv] = apply_AtA(xu, xv);
    ScalarField ru(grid), rv(grid);
    for (int i = 0; i < grid.size(); ++i) {
        ru[i] = bu[i] - Axu[i];
        rv[i] = bv[i] - Axv[i];
    }
    const double bnorm = std::sqrt(dot(bu, bu) + dot(bv, bv));
    if (bnorm == 0.0) return true;
    const double target = rel_tol * bnorm;

    ScalarField pu = ru, pv = rv;
    double rr = dot(ru, ru) + dot(rv, rv);
    for (int it = 0; it < max_iter; ++it) {
        if (std::sqrt(rr) <= target) return true;
        auto [Apu, Apv] = apply_AtA(pu, pv);
        const double pAp = dot(pu, Apu) + dot(pv, Apv);
        if (!(pAp > 0.0)) return false;
        const double alpha = rr / pAp;
        for (int i = 0; i < grid.size(); ++i) {
            xu[i] += alpha * pu[i];
            xv[i] += alpha * pv[i];
            ru[i] -= alpha * Apu[i];
            rv[i] -= alpha * Apv[i];
        }
        const double rr_new = dot(ru, ru) + dot(rv, rv);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (int i = 0; i < grid.size(); ++i) {
            pu[i] = ru[i] + beta * pu[i];
            pv[i] = rv[i] + beta * pv[i];
        }
    }
    return std::sqrt(rr) <= target;
}

} // namespace

InvertibilityResult invertibility_check(const GrowthModel& m, const Thresholds& t,
                                        const SteadyState& state, const SigmaOptions& opts) {
    const Grid& grid = state.u.grid();
    InvertibilityResult result;
    const DerivativeBounds db = derivative_bounds(m, t);
    result.condition_holds = frechet_condition_pointwise(db, state.u, state.v);

    const FrechetOperator A = assemble_frechet_apply(m, state);
    ScalarField zu(grid, 1.0), zv(grid, 1.0);
    {
        const double norm = std::sqrt(dot(zu, zu) + dot(zv, zv));
        for (int i = 0; i < grid.size(); ++i) {
            zu[i] /= norm;
            zv[i] /= norm;
        }
    }

    double sigma_prev = -1.0;
    ScalarField wu = zu, wv = zv;
    // A loose inner tolerance suffices: once the iterate aligns with the
    // minimal singular direction, the solve error orthogonal to it is
    // damped by the next singular value squared.
    const int inner_budget = std::min(400 * grid.size() + 10000, 150000);
    for (int it = 1; it <= opts.max_outer; ++it) {
        if (!cg_normal_equations(A, zu, zv, wu, wv, 1e-6, inner_budget)) {
            result.iterations = it;
            return result; // sigma stays unknown
        }
        const double norm = std::sqrt(dot(wu, wu) + dot(wv, wv));
        if (!(norm > 0.0)) {
            result.iterations = it;
            return result;
        }
        for (int i = 0; i < grid.size(); ++i) {
            wu[i] /= norm;
            wv[i] /= norm;
        }
        auto [Au, Av] = A.apply(wu, wv);
        const double sigma = std::sqrt(dot(Au, Au) + dot(Av, Av));
        result.iterations = it;
        if (std::fabs(sigma - sigma_prev) < opts.tol) {
            result.sigma_min = sigma;
            return result;
        }
        sigma_prev = sigma;
        zu = wu;
        zv = wv;
    }
    return result; // sigma stays unknown
}

SteadyState newton_refine(const GrowthModel& m, const Grid& grid, const SteadyState& state,
                          int max_steps) {
    SteadyState cur = state;
    auto [ru, rv] = system_residual(m, grid, cur.u, cur.v);
    double rnorm = std::max(inf_norm(ru), inf_norm(rv));

    for (int step = 0; step < max_steps; ++step) {
        const FrechetOperator A = FrechetOperator(m, grid, cur.u, cur.v);
        // Solve A delta = residual through the normal equations; the update
        // direction satisfies R(x + delta) = R(x) - A delta + h.o.t.
        auto [bu, bv] = A.apply_adjoint(ru, rv);
        ScalarField du(grid, 0.0), dv(grid, 0.0);
        if (!cg_normal_equations(A, bu, bv, du, dv, 1e-8,
                                 std::min(400 * grid.size() + 10000, 150000)))
            break;

        bool accepted = false;
        double scale = 1.0;
        for (int half = 0; half < 7; ++half) {
            ScalarField cu(grid), cv(grid);
            for (int i = 0; i < grid.size(); ++i) {
                cu[i] = cur.u[i] + scale * du[i];
                cv[i] = cur.v[i] + scale * dv[i];
            }
            auto [nru, nrv] = system_residual(m, grid, cu, cv);
            const double cand = std::max(inf_norm(nru), inf_norm(nrv));
            if (cand < rnorm) {
                cur.u = cu;
                cur.v = cv;
                ru = nru;
                rv = nrv;
                rnorm = cand;
                cur.residual_u = inf_norm(ru);
                cur.residual_v = inf_norm(rv);
                cur.iterations += 1;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) break;
    }
    return cur;
}

} // namespace coexist
