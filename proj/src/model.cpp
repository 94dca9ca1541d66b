#include "coexist/model.hpp"

#include <cmath>
#include <random>

#include "coexist/errors.hpp"

namespace coexist {

void validate_basic(const GrowthModel& m) {
    if (!(m.a > 0.0) || !(m.d > 0.0))
        throw ConfigError("growth model: reproduction rates a, d must be positive");
    if (!m.g || !m.h || !m.gu || !m.gv || !m.hu || !m.hv)
        throw ConfigError("growth model: g, h and all four partials must be set");
    if (std::fabs(m.g(0.0, 0.0)) > 1e-12 || std::fabs(m.h(0.0, 0.0)) > 1e-12)
        throw ConfigError("growth model: g and h must vanish at the origin");
}

GrowthModel classical_lv(double a, double b, double c, double d, double e, double f) {
    if (!(a > 0) || !(b > 0) || !(c > 0) || !(d > 0) || !(e > 0) || !(f > 0))
        throw ConfigError("classical_lv: all six parameters must be positive");
    GrowthModel m;
    m.a = a;
    m.d = d;
    m.g = [b, c](double u, double v) { return b * u + c * v; };
    m.h = [e, f](double u, double v) { return e * u + f * v; };
    m.gu = [b](double, double) { return b; };
    m.gv = [c](double, double) { return c; };
    m.hu = [e](double, double) { return e; };
    m.hv = [f](double, double) { return f; };
    m.name = "classical_lv";
    validate_basic(m);
    return m;
}

GrowthModel nonlinear_demo(double a, double d, double b, double c, double e, double f,
                           double eps) {
    if (!(a > 0) || !(b > 0) || !(c > 0) || !(d > 0) || !(e > 0) || !(f > 0))
        throw ConfigError("nonlinear_demo: rate parameters must be positive");
    if (!(eps >= 0))
        throw ConfigError("nonlinear_demo: eps must be nonnegative");
    GrowthModel m;
    m.a = a;
    m.d = d;
    m.g = [b, c, eps](double u, double v) { return b * u + c * v + eps * (u * u + u * v); };
    m.h = [e, f, eps](double u, double v) { return e * u + f * v + eps * (v * v + u * v); };
    m.gu = [b, eps](double u, double v) { return b + eps * (2.0 * u + v); };
    m.gv = [c, eps](double u, double) { return c + eps * u; };
    m.hu = [e, eps](double, double v) { return e + eps * v; };
    m.hv = [f, eps](double u, double v) { return f + eps * (2.0 * v + u); };
    m.name = "nonlinear_demo";
    validate_basic(m);
    return m;
}

namespace {

// Smallest root of rate(k) = target on (0, cap]; rate increasing from 0.
double threshold_bisect(const std::function<double(double)>& rate, double target,
                        double cap, const char* species) {
    double hi = 1.0;
    while (rate(hi) < target) {
        hi *= 2.0;
        if (hi > cap)
            throw ModelError(std::string("compute_thresholds: species ") + species +
                             " has no self-limitation cap below the search limit");
    }
    double lo = 0.0;
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (rate(mid) >= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace

Thresholds compute_thresholds(const GrowthModel& m, double search_cap) {
    validate_basic(m);
    Thresholds t;
    t.k1 = threshold_bisect([&m](double u) { return m.g(u, 0.0); }, m.a, search_cap, "u");
    t.k2 = threshold_bisect([&m](double v) { return m.h(0.0, v); }, m.d, search_cap, "v");
    return t;
}

DerivativeBounds derivative_bounds(const GrowthModel& m, const Thresholds& t,
                                   int samples_per_axis) {
    if (samples_per_axis < 2)
        throw ConfigError("derivative_bounds: need at least 2 samples per axis");
    DerivativeBounds b;
    bool first = true;
    for (int i = 0; i < samples_per_axis; ++i) {
        const double u = t.k1 * i / (samples_per_axis - 1);
        for (int j = 0; j < samples_per_axis; ++j) {
            const double v = t.k2 * j / (samples_per_axis - 1);
            const double gu = m.gu(u, v), gv = m.gv(u, v);
            const double hu = m.hu(u, v), hv = m.hv(u, v);
            if (first) {
                b = DerivativeBounds{gu, hv, gv, hu};
                first = false;
            } else {
                b.inf_gu = std::min(b.inf_gu, gu);
                b.inf_hv = std::min(b.inf_hv, hv);
                b.sup_gv = std::max(b.sup_gv, gv);
                b.sup_hu = std::max(b.sup_hu, hu);
            }
        }
    }
    return b;
}

void check_partials(const GrowthModel& m, const Thresholds& t, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> pick_u(0.0, t.k1), pick_v(0.0, t.k2);

    const auto fd = [](const Rate2& f, double u, double v, double du, double dv) {
        const double step = 1e-6 * (1.0 + std::fabs(du) * u + std::fabs(dv) * v);
        return (f(u + du * step, v + dv * step) - f(u - du * step, v - dv * step)) /
               (2.0 * step);
    };

    for (int k = 0; k < 32; ++k) {
        const double u = pick_u(rng), v = pick_v(rng);
        const struct {
            double analytic, numeric;
            const char* name;
        } pairs[] = {
            {m.gu(u, v), fd(m.g, u, v, 1.0, 0.0), "gu"},
            {m.gv(u, v), fd(m.g, u, v, 0.0, 1.0), "gv"},
            {m.hu(u, v), fd(m.h, u, v, 1.0, 0.0), "hu"},
            {m.hv(u, v), fd(m.h, u, v, 0.0, 1.0), "hv"},
        };
        for (const auto& p : pairs) {
            if (!(p.analytic > 0.0))
                throw ModelError(std::string("growth model: partial ") + p.name +
                                 " is not strictly positive on the state box");
            if (std::fabs(p.analytic - p.numeric) > 1e-5 * std::max(1.0, std::fabs(p.analytic)))
                throw ModelError(std::string("growth model: partial ") + p.name +
                                 " disagrees with its finite difference");
        }
    }
}

} // namespace coexist
