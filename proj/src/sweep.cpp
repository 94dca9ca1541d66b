#include "coexist/sweep.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "coexist/errors.hpp"
#include "coexist/field_io.hpp"

namespace coexist {

void validate(const RegionSpec& spec) {
    if (!(spec.a_min < spec.a_max) || !(spec.d_min < spec.d_max))
        throw ConfigError("region spec: need a_min < a_max and d_min < d_max");
    if (spec.na < 2 || spec.nd < 2)
        throw ConfigError("region spec: need at least 2 samples per axis");
}

std::string to_string(PointClass c) {
    switch (c) {
        case PointClass::Coexist: return "Coexist";
        case PointClass::ExtinctU: return "ExtinctU";
        case PointClass::ExtinctV: return "ExtinctV";
        case PointClass::ExtinctBoth: return "ExtinctBoth";
        case PointClass::Failed: return "Failed";
    }
    return "Failed";
}

std::string RegionMap::to_csv() const {
    std::string out = "a,d,class,max_u,max_v,corner_gap,condition_holds,iterations\n";
    for (const auto& p : points) {
        out += format_full(p.a);
        out += ',';
        out += format_full(p.d);
        out += ',';
        out += to_string(p.cls);
        out += ',';
        out += format_full(p.max_u);
        out += ',';
        out += format_full(p.max_v);
        out += ',';
        out += format_full(p.corner_gap);
        out += ',';
        out += p.condition_holds ? "true" : "false";
        out += ',';
        out += std::to_string(p.iterations);
        out += '\n';
    }
    return out;
}

namespace {

struct ClassifiedPoint {
    PointRecord record;
    std::optional<SteadyState> upper; ///< present only for Coexist points
    std::optional<SteadyState> lower;
};

ClassifiedPoint classify_point_full(const GrowthModel& m, const Grid& grid,
                                    const SweepOptions& opts,
                                    const SteadyState* warm_upper,
                                    const SteadyState* warm_lower) {
    ClassifiedPoint out;
    out.record.a = m.a;
    out.record.d = m.d;
    try {
        const Thresholds t = compute_thresholds(m);
        const Brackets br = super_sub_pair(m, t, grid, opts.log_tol);

        MonotoneOptions mo;
        mo.sys_tol = opts.sys_tol;
        mo.max_outer = opts.max_outer;

        mo.warm = warm_upper;
        const SteadyState up = monotone_solve(m, grid, br, StartCorner::FromUpper, mo);
        mo.warm = warm_lower;
        const SteadyState low = monotone_solve(m, grid, br, StartCorner::FromLower, mo);

        double gap_u = 0.0, gap_v = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
            gap_u = std::max(gap_u, std::fabs(up.u[i] - low.u[i]));
            gap_v = std::max(gap_v, std::fabs(up.v[i] - low.v[i]));
        }
        out.record.corner_gap = gap_u + gap_v;
        out.record.max_u = inf_norm(up.u);  // the corner favoring u
        out.record.max_v = inf_norm(low.v); // the corner favoring v
        out.record.iterations = up.iterations + low.iterations;

        const bool u_alive = out.record.max_u > opts.pos_tol;
        const bool v_alive = out.record.max_v > opts.pos_tol;
        out.record.cls = u_alive ? (v_alive ? PointClass::Coexist : PointClass::ExtinctV)
                                 : (v_alive ? PointClass::ExtinctU : PointClass::ExtinctBoth);

        const DerivativeBounds db = derivative_bounds(m, t);
        out.record.condition_holds = frechet_condition_pointwise(db, up.u, up.v);

        if (out.record.cls == PointClass::Coexist) {
            out.upper = up;
            out.lower = low;
        }
    } catch (const std::exception&) {
        out.record.cls = PointClass::Failed;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.record.max_u = out.record.max_v = out.record.corner_gap = nan;
        out.record.condition_holds = false;
        out.record.iterations = 0;
        out.upper.reset();
        out.lower.reset();
    }
    return out;
}

} // namespace

PointRecord classify_point(const GrowthModel& m, const Grid& grid, const SweepOptions& opts,
                           const SteadyState* warm_upper, const SteadyState* warm_lower) {
    return classify_point_full(m, grid, opts, warm_upper, warm_lower).record;
}

RegionMap sweep_region(const RegionSpec& spec, const ModelFamily& family, const Grid& grid,
                       const SweepOptions& opts) {
    validate(spec);
    RegionMap map;
    map.spec = spec;
    map.points.resize(static_cast<size_t>(spec.na) * spec.nd);

    const auto a_at = [&spec](int i) {
        return spec.a_min + (spec.a_max - spec.a_min) * i / (spec.na - 1);
    };
    const auto d_at = [&spec](int j) {
        return spec.d_min + (spec.d_max - spec.d_min) * j / (spec.nd - 1);
    };

    const auto run_row = [&](int j) {
        const double d = d_at(j);
        std::optional<SteadyState> warm_up, warm_low;
        for (int i = 0; i < spec.na; ++i) {
            const GrowthModel m = family(a_at(i), d);
            ClassifiedPoint cp = classify_point_full(
                m, grid, opts,
                (opts.warm_start && warm_up) ? &*warm_up : nullptr,
                (opts.warm_start && warm_low) ? &*warm_low : nullptr);
            if (cp.upper) {
                warm_up = std::move(cp.upper);
                warm_low = std::move(cp.lower);
            }
            map.points[static_cast<size_t>(j) * spec.na + i] = cp.record;
        }
    };

    const int threads = std::max(1, std::min(opts.threads, spec.nd));
    if (threads == 1) {
        for (int j = 0; j < spec.nd; ++j) run_row(j);
    } else {
        std::atomic<int> next_row{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&]() {
                for (int j = next_row.fetch_add(1); j < spec.nd; j = next_row.fetch_add(1))
                    run_row(j);
            });
        }
        for (auto& th : pool) th.join();
    }
    return map;
}

double extinction_threshold(double d, const ModelFamily& family, const Grid& grid,
                            double a_lo, double a_hi, const ThresholdOptions& opts) {
    if (!(a_lo < a_hi))
        throw ConfigError("extinction_threshold: need a_lo < a_hi");

    const auto classify = [&](double a) {
        return classify_point(family(a, d), grid, opts.sweep).cls;
    };

    if (classify(a_lo) != PointClass::ExtinctU)
        throw ConfigError("extinction_threshold: lower endpoint is not ExtinctU");
    if (classify(a_hi) != PointClass::Coexist)
        throw ConfigError("extinction_threshold: upper endpoint is not Coexist");

    double lo = a_lo, hi = a_hi;
    int steps = 0;
    while ((steps < opts.min_steps || hi - lo > opts.width_tol) && steps < opts.max_steps) {
        const double mid = 0.5 * (lo + hi);
        if (classify(mid) == PointClass::Coexist)
            hi = mid;
        else
            lo = mid; // any non-coexist outcome counts as the extinct side
        ++steps;
    }
    return 0.5 * (lo + hi);
}

} // namespace coexist
