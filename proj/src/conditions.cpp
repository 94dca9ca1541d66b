#include "coexist/conditions.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "coexist/errors.hpp"
#include "coexist/linops.hpp"

namespace coexist {

const ConditionRecord& ConditionReport::find(const std::string& name) const {
    for (const auto& r : records)
        if (r.name == name) return r;
    throw EvaluationError("condition report has no record named " + name);
}

std::string ConditionReport::to_json() const {
    nlohmann::json j;
    j["lambda1"] = lambda1;
    j["h"] = h;
    j["eps_ratio"] = eps_ratio;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json rec;
        rec["name"] = r.name;
        rec["lhs"] = r.lhs;
        rec["rhs"] = r.rhs;
        rec["holds"] = r.holds;
        rec["evaluable"] = r.evaluable;
        rec["inputs_summary"] = r.inputs_summary;
        arr.push_back(rec);
    }
    j["conditions"] = arr;
    return j.dump();
}

double theta_ratio_sup(const Theta& numer, const Theta& denom, double eps_ratio) {
    if (!(eps_ratio > 0.0))
        throw ConfigError("theta_ratio_sup: eps_ratio must be positive");
    if (denom.is_zero || max_value(denom.field) <= 0.0)
        throw EvaluationError("ratio undefined: lower theta vanishes");
    if (numer.field.size() != denom.field.size())
        throw ConfigError("theta_ratio_sup: fields live on different grids");

    const double cut = eps_ratio * max_value(denom.field);
    double sup = 0.0;
    for (int i = 0; i < denom.field.size(); ++i)
        if (denom.field[i] >= cut)
            sup = std::max(sup, numer.field[i] / denom.field[i]);
    return sup;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

// Keeps the binding part (smallest margin) of a two-part strict condition.
void pick_binding(ConditionRecord& rec, double lhs1, double rhs1, double lhs2, double rhs2) {
    const double m1 = lhs1 - rhs1;
    const double m2 = lhs2 - rhs2;
    if (m1 <= m2) {
        rec.lhs = lhs1;
        rec.rhs = rhs1;
    } else {
        rec.lhs = lhs2;
        rec.rhs = rhs2;
    }
    rec.holds = (m1 > 0.0) && (m2 > 0.0);
}

} // namespace

ConditionReport condition_report(const GrowthModel& m, const Thresholds& t,
                                 const Grid& grid, const ConditionOptions& opts) {
    validate_basic(m);
    ConditionReport report;
    report.lambda1 = lambda1_zero(grid, opts.eig_tol);
    report.h = std::max(grid.hx(), grid.hy());
    report.eps_ratio = opts.eps_ratio;
    const double lam = report.lambda1;

    const std::string base = "a=" + fmt(m.a) + " d=" + fmt(m.d) + " k1=" + fmt(t.k1) +
                             " k2=" + fmt(t.k2) + " lambda1=" + fmt(lam);

    // Nonexistence: a <= lambda1 or d <= lambda1 (non-strict).
    {
        ConditionRecord rec;
        rec.name = "nonexistence_C";
        rec.lhs = lam;
        rec.rhs = std::min(m.a, m.d);
        rec.holds = rec.lhs >= rec.rhs;
        rec.inputs_summary = base;
        report.records.push_back(rec);
    }

    // Existence: a > lambda1 + g(0,k2) and d > lambda1 + h(k1,0).
    {
        ConditionRecord rec;
        rec.name = "existence_A";
        const double rhs_a = lam + m.g(0.0, t.k2);
        const double rhs_d = lam + m.h(t.k1, 0.0);
        pick_binding(rec, m.a, rhs_a, m.d, rhs_d);
        rec.inputs_summary = base + " g(0,k2)=" + fmt(m.g(0.0, t.k2)) +
                             " h(k1,0)=" + fmt(m.h(t.k1, 0.0));
        report.records.push_back(rec);
    }

    // The four bracket profiles and derivative bounds feed the remaining
    // conditions; failures are recorded per condition.
    std::optional<Brackets> maybe_br;
    std::string bracket_error;
    try {
        maybe_br.emplace(super_sub_pair(m, t, grid, opts.log_tol));
    } catch (const std::exception& e) {
        bracket_error = e.what();
    }
    const bool have_brackets = maybe_br.has_value();
    const DerivativeBounds db = derivative_bounds(m, t, opts.samples_per_axis);

    // Uniqueness quadratic-form inequality with theta-ratio sups.
    {
        ConditionRecord rec;
        rec.name = "uniqueness_B";
        if (!have_brackets) {
            rec.evaluable = false;
            rec.inputs_summary = "bracket solve failed: " + bracket_error;
        } else {
            try {
                const double ratio_u = theta_ratio_sup(maybe_br->u_upper, maybe_br->v_lower, opts.eps_ratio);
                const double ratio_v = theta_ratio_sup(maybe_br->v_upper, maybe_br->u_lower, opts.eps_ratio);
                rec.lhs = 4.0 * db.inf_gu * db.inf_hv;
                rec.rhs = ratio_u * db.sup_gv * db.sup_gv +
                          ratio_v * db.sup_hu * db.sup_hu +
                          2.0 * db.sup_gv * db.sup_hu;
                rec.holds = rec.lhs > rec.rhs;
                rec.inputs_summary = base + " inf_gu=" + fmt(db.inf_gu) +
                                     " inf_hv=" + fmt(db.inf_hv) +
                                     " sup_gv=" + fmt(db.sup_gv) +
                                     " sup_hu=" + fmt(db.sup_hu) +
                                     " ratio_u=" + fmt(ratio_u) +
                                     " ratio_v=" + fmt(ratio_v);
            } catch (const std::exception& e) {
                rec.evaluable = false;
                rec.inputs_summary = e.what();
            }
        }
        report.records.push_back(rec);
    }

    // Perturbation hypotheses with spatially varying potentials
    // g(0, theta_v_upper) and h(theta_u_upper, 0).
    {
        ConditionRecord rec;
        rec.name = "perturbation_31A";
        if (!have_brackets) {
            rec.evaluable = false;
            rec.inputs_summary = "bracket solve failed: " + bracket_error;
        } else {
            try {
                EigenOptions eo;
                eo.eig_tol = opts.eig_tol;
                ScalarField q_a(grid), q_d(grid);
                for (int i = 0; i < grid.size(); ++i) {
                    q_a[i] = m.g(0.0, maybe_br->v_upper.field[i]);
                    q_d[i] = m.h(maybe_br->u_upper.field[i], 0.0);
                }
                const double lam_a = principal_eigenpair(grid, q_a, eo).lambda1;
                const double lam_d = principal_eigenpair(grid, q_d, eo).lambda1;
                pick_binding(rec, m.a, lam_a, m.d, lam_d);
                rec.inputs_summary = base + " lambda1(g(0,theta_v))=" + fmt(lam_a) +
                                     " lambda1(h(theta_u,0))=" + fmt(lam_d);
            } catch (const std::exception& e) {
                rec.evaluable = false;
                rec.inputs_summary = e.what();
            }
        }
        report.records.push_back(rec);
    }

    // Region-continuation product inequality.
    {
        ConditionRecord rec;
        rec.name = "cor33_B";
        if (!have_brackets) {
            rec.evaluable = false;
            rec.inputs_summary = "bracket solve failed: " + bracket_error;
        } else {
            try {
                const double ratio_u = theta_ratio_sup(maybe_br->u_upper, maybe_br->v_lower, opts.eps_ratio);
                const double ratio_v = theta_ratio_sup(maybe_br->v_upper, maybe_br->u_lower, opts.eps_ratio);
                rec.lhs = 4.0 * db.inf_gu * db.inf_hv;
                rec.rhs = (db.sup_gv + db.sup_hu * ratio_v) *
                          (db.sup_gv * ratio_u + db.sup_hu);
                rec.holds = rec.lhs > rec.rhs;
                rec.inputs_summary = base + " ratio_u=" + fmt(ratio_u) +
                                     " ratio_v=" + fmt(ratio_v);
            } catch (const std::exception& e) {
                rec.evaluable = false;
                rec.inputs_summary = e.what();
            }
        }
        report.records.push_back(rec);
    }

    // Threshold sign checks: g(k1,0) > a and h(0,k2) > d. At minimal
    // thresholds the margins sit at the bisection tolerance; pass
    // thresholds computed for the largest rates of a region to get
    // meaningful margins.
    {
        ConditionRecord rec;
        rec.name = "cor42_C";
        pick_binding(rec, m.g(t.k1, 0.0), m.a, m.h(0.0, t.k2), m.d);
        rec.inputs_summary = base + " g(k1,0)=" + fmt(m.g(t.k1, 0.0)) +
                             " h(0,k2)=" + fmt(m.h(0.0, t.k2));
        report.records.push_back(rec);
    }

    return report;
}

} // namespace coexist
