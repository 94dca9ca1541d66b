#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coexist/coexistence.hpp"
#include "coexist/grid.hpp"
#include "coexist/model.hpp"

namespace coexist {

/// Axis-aligned reproduction-rate rectangle [a_min,a_max] x [d_min,d_max]
/// sampled on an inclusive na x nd lattice.
struct RegionSpec {
    double a_min = 0.0, a_max = 0.0, d_min = 0.0, d_max = 0.0;
    int na = 2, nd = 2;
};

void validate(const RegionSpec& spec);

enum class PointClass { Coexist, ExtinctU, ExtinctV, ExtinctBoth, Failed };

std::string to_string(PointClass c);

struct PointRecord {
    double a = 0.0, d = 0.0;
    PointClass cls = PointClass::Failed;
    double max_u = 0.0, max_v = 0.0;
    double corner_gap = 0.0;
    bool condition_holds = false;
    int iterations = 0;
};

struct RegionMap {
    RegionSpec spec;
    std::vector<PointRecord> points; ///< sorted by (d, a)

    /// Header "a,d,class,max_u,max_v,corner_gap,condition_holds,iterations",
    /// rows sorted by (d, a), full double precision.
    std::string to_csv() const;
};

using ModelFamily = std::function<GrowthModel(double a, double d)>;

struct SweepOptions {
    double sys_tol = 1e-8;
    double log_tol = 1e-9;
    double pos_tol = 1e-6;
    int max_outer = 60000; ///< generous budget; critical slowing near thresholds
    int threads = 1;
    bool warm_start = true;
};

/// Runs the monotone solver from both bracket corners and classifies by
/// the sup norms of the extremal runs: max_u from the corner favoring u,
/// max_v from the corner favoring v. corner_gap is the sup-norm distance
/// between the two limits, the uniqueness evidence. A warm state seeds the
/// inner linear solves only. Solver failures yield a Failed record.
PointRecord classify_point(const GrowthModel& m, const Grid& grid,
                           const SweepOptions& opts = {},
                           const SteadyState* warm_upper = nullptr,
                           const SteadyState* warm_lower = nullptr);

/// Left-to-right continuation per fixed-d row: points classified in
/// increasing a, passing the previous coexistence state as warm start.
/// Rows are independent and may run on opts.threads threads; assembly is
/// deterministic regardless of scheduling.
RegionMap sweep_region(const RegionSpec& spec, const ModelFamily& family, const Grid& grid,
                       const SweepOptions& opts = {});

struct ThresholdOptions {
    SweepOptions sweep;
    double width_tol = 1e-3;
    int min_steps = 10;
    int max_steps = 60;
};

/// Bisection in a for the ExtinctU -> Coexist transition at fixed d.
/// Requires classify(a_lo) = ExtinctU and classify(a_hi) = Coexist;
/// returns the midpoint of the final bracket.
double extinction_threshold(double d, const ModelFamily& family, const Grid& grid,
                            double a_lo, double a_hi, const ThresholdOptions& opts = {});

} // namespace coexist
