#pragma once

#include <string>
#include <vector>

#include "coexist/coexistence.hpp"
#include "coexist/grid.hpp"
#include "coexist/logistic.hpp"
#include "coexist/model.hpp"

namespace coexist {

/// One evaluated hypothesis. For strict-inequality conditions holds is
/// lhs > rhs; the nonexistence record is the non-strict complement
/// (holds when lhs >= rhs) since it covers the boundary case. A condition
/// whose inputs could not be computed is marked unevaluable with the
/// reason in inputs_summary.
struct ConditionRecord {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    bool evaluable = true;
    std::string inputs_summary;
};

struct ConditionReport {
    std::vector<ConditionRecord> records; ///< fixed evaluation order
    double lambda1 = 0.0;                 ///< discrete lambda1(0) used throughout
    double h = 0.0;                       ///< grid spacing (max over axes in 2D)
    double eps_ratio = 0.0;

    const ConditionRecord& find(const std::string& name) const;
    std::string to_json() const;
};

/// Sup of numer/denom over the interior nodes where denom is at least
/// eps_ratio times its maximum. Both profiles vanish on the boundary, so
/// the cut keeps the quotient away from 0/0 noise.
double theta_ratio_sup(const Theta& numer, const Theta& denom, double eps_ratio = 1e-3);

struct ConditionOptions {
    double log_tol = 1e-9;
    double eig_tol = 1e-10;
    double eps_ratio = 1e-3;
    int samples_per_axis = 256;
};

/// Evaluates, in order: nonexistence (a or d below lambda1), existence
/// (rates above lambda1 plus the cross-competition offsets), the
/// uniqueness quadratic-form inequality with theta-ratio sups, the
/// perturbation hypotheses with spatially varying potentials, the
/// region-continuation product inequality, and the threshold sign checks.
/// Per-condition failures mark that record unevaluable without aborting.
ConditionReport condition_report(const GrowthModel& m, const Thresholds& t,
                                 const Grid& grid, const ConditionOptions& opts = {});

} // namespace coexist
