#include "coexist/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coexist/errors.hpp"

namespace coexist {

Grid::Grid(GridKind kind, int nx, int ny, double lx, double ly)
    : kind_(kind), nx_(nx), ny_(ny), lx_(lx), ly_(ly),
      hx_(lx / (nx + 1)), hy_(kind == GridKind::Interval ? 0.0 : ly / (ny + 1)) {}

Grid Grid::interval(double length, int n) {
    if (n < 2)
        throw ConfigError("grid: need at least 2 interior nodes, got " + std::to_string(n));
    if (!(length > 0.0))
        throw ConfigError("grid: interval length must be positive");
    return Grid(GridKind::Interval, n, 1, length, 0.0);
}

Grid Grid::rectangle(double lx, double ly, int nx, int ny) {
    if (nx < 2 || ny < 2)
        throw ConfigError("grid: need at least 2 interior nodes per axis");
    if (!(lx > 0.0) || !(ly > 0.0))
        throw ConfigError("grid: rectangle side lengths must be positive");
    return Grid(GridKind::Rectangle, nx, ny, lx, ly);
}

bool Grid::operator==(const Grid& other) const {
    return kind_ == other.kind_ && nx_ == other.nx_ && ny_ == other.ny_ &&
           lx_ == other.lx_ && ly_ == other.ly_;
}

ScalarField::ScalarField(const Grid& grid, double fill)
    : grid_(grid), values_(static_cast<size_t>(grid.size()), fill) {}

void ScalarField::require_finite(const std::string& context) const {
    for (double v : values_)
        if (!std::isfinite(v))
            throw InternalError(context + ": field contains a non-finite value");
}

void require_same_grid(const Grid& grid, const ScalarField& f, const std::string& context) {
    if (f.grid() != grid)
        throw ConfigError(context + ": field does not live on this grid");
}

ScalarField apply_laplacian(const Grid& grid, const ScalarField& f) {
    require_same_grid(grid, f, "apply_laplacian");
    ScalarField out(grid);
    const int nx = grid.nx();
    const double ihx2 = 1.0 / (grid.hx() * grid.hx());
    const auto& v = f.values();
    auto& o = out.values();

    if (grid.dim() == 1) {
        for (int i = 0; i < nx; ++i) {
            const double left = (i > 0) ? v[i - 1] : 0.0;
            const double right = (i + 1 < nx) ? v[i + 1] : 0.0;
            o[i] = (left - 2.0 * v[i] + right) * ihx2;
        }
    } else {
        const int ny = grid.ny();
        const double ihy2 = 1.0 / (grid.hy() * grid.hy());
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const int k = iy * nx + ix;
                const double left = (ix > 0) ? v[k - 1] : 0.0;
                const double right = (ix + 1 < nx) ? v[k + 1] : 0.0;
                const double down = (iy > 0) ? v[k - nx] : 0.0;
                const double up = (iy + 1 < ny) ? v[k + nx] : 0.0;
                o[k] = (left - 2.0 * v[k] + right) * ihx2 + (down - 2.0 * v[k] + up) * ihy2;
            }
        }
    }
    out.require_finite("apply_laplacian");
    return out;
}

double inf_norm(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::fabs(v));
    return m;
}

double two_norm(const ScalarField& f) {
    return std::sqrt(dot(f, f));
}

double dot(const ScalarField& a, const ScalarField& b) {
    if (a.size() != b.size())
        throw ConfigError("dot: field sizes differ");
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_value(const ScalarField& f) {
    return *std::max_element(f.values().begin(), f.values().end());
}

double min_value(const ScalarField& f) {
    return *std::min_element(f.values().begin(), f.values().end());
}

} // namespace coexist
