#pragma once

#include <functional>
#include <string>

namespace coexist {

using Rate2 = std::function<double(double, double)>;

/// Competition growth structure: reproduction rates (a, d), growth rates
/// g, h and their four partial derivatives. g and h vanish at the origin
/// and are strictly increasing in both arguments on the state box.
struct GrowthModel {
    double a = 0.0;
    double d = 0.0;
    Rate2 g, h;
    Rate2 gu, gv, hu, hv;
    std::string name;
};

/// Checks the origin condition g(0,0) = h(0,0) = 0 and positive rates.
void validate_basic(const GrowthModel& m);

/// Classical Lotka-Volterra rates: g(u,v) = b*u + c*v, h(u,v) = e*u + f*v.
GrowthModel classical_lv(double a, double b, double c, double d, double e, double f);

/// Nonlinear demonstration family: g(u,v) = b*u + c*v + eps*(u^2 + u*v)
/// and the species-mirrored h(u,v) = e*u + f*v + eps*(v^2 + u*v).
GrowthModel nonlinear_demo(double a, double d, double b, double c, double e, double f,
                           double eps);

/// Carrying thresholds: smallest k1, k2 with g(k1,0) >= a and h(0,k2) >= d.
/// The state box is B = [0,k1] x [0,k2].
struct Thresholds {
    double k1 = 0.0;
    double k2 = 0.0;
};

/// Bisection for the minimal thresholds to relative tolerance 1e-12.
/// Throws ModelError when g(.,0) or h(0,.) never exceeds its rate below
/// the search cap.
Thresholds compute_thresholds(const GrowthModel& m, double search_cap = 1e6);

/// Extrema of the four partial derivatives over a uniform lattice on B.
struct DerivativeBounds {
    double inf_gu = 0.0;
    double inf_hv = 0.0;
    double sup_gv = 0.0;
    double sup_hu = 0.0;
};

DerivativeBounds derivative_bounds(const GrowthModel& m, const Thresholds& t,
                                   int samples_per_axis = 256);

/// Spot-checks strict monotonicity of g, h on B and the consistency of each
/// partial with a centered finite difference at 32 random points (relative
/// tolerance 1e-5). Throws ModelError on failure.
void check_partials(const GrowthModel& m, const Thresholds& t, unsigned seed = 20240901u);

} // namespace coexist
