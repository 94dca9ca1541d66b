#pragma once

#include <string>
#include <vector>

namespace coexist {

enum class GridKind { Interval, Rectangle };

/// Uniform Cartesian discretization of an interval (0,L) or a rectangle
/// (0,Lx)x(0,Ly) with homogeneous Dirichlet boundary conditions. Only
/// interior nodes are stored; boundary values are structurally zero.
/// Immutable after construction.
class Grid {
public:
    static Grid interval(double length, int n);
    static Grid rectangle(double lx, double ly, int nx, int ny);

    GridKind kind() const { return kind_; }
    int dim() const { return kind_ == GridKind::Interval ? 1 : 2; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int size() const { return nx_ * ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }

    /// Coordinates of interior node (ix, iy), ix in [0,nx), iy in [0,ny).
    double x(int ix) const { return (ix + 1) * hx_; }
    double y(int iy) const { return (iy + 1) * hy_; }

    /// Row-major interior index, x fastest.
    int index(int ix, int iy) const { return iy * nx_ + ix; }

    bool operator==(const Grid& other) const;
    bool operator!=(const Grid& other) const { return !(*this == other); }

private:
    Grid(GridKind kind, int nx, int ny, double lx, double ly);

    GridKind kind_;
    int nx_, ny_;
    double lx_, ly_, hx_, hy_;
};

/// Real values on the interior nodes of a Grid, row-major. Carries its own
/// copy of the (small) grid descriptor so fields are self-contained values.
class ScalarField {
public:
    explicit ScalarField(const Grid& grid, double fill = 0.0);

    const Grid& grid() const { return grid_; }
    int size() const { return static_cast<int>(values_.size()); }

    double operator[](int i) const { return values_[i]; }
    double& operator[](int i) { return values_[i]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Throws InternalError if any value is NaN or infinite.
    void require_finite(const std::string& context) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Discrete Laplacian: 3-point (1D) or 5-point (2D) second-order stencil
/// with Dirichlet-zero ghost values. Linear, symmetric, negative
/// semi-definite in the interior inner product.
ScalarField apply_laplacian(const Grid& grid, const ScalarField& f);

double inf_norm(const ScalarField& f);
double two_norm(const ScalarField& f);
double dot(const ScalarField& a, const ScalarField& b);
double max_value(const ScalarField& f);
double min_value(const ScalarField& f);

/// Throws ConfigError unless f lives on exactly this grid.
void require_same_grid(const Grid& grid, const ScalarField& f, const std::string& context);

} // namespace coexist
