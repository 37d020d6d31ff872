#pragma once

#include <vector>

#include "microct/common.hpp"

namespace microct {

/// Uniform node-centered grid on the square [-extent, extent]^2.
/// Boundary nodes included; spacing h = 2*extent/(n-1).
struct Grid2 {
    int n = 2;
    double extent = 1.0;

    Grid2() = default;
    Grid2(int n_, double extent_);

    double spacing() const { return 2.0 * extent / (n - 1); }
    double coord(int i) const { return -extent + i * spacing(); }
    Vec2 node(int ix, int iy) const { return {coord(ix), coord(iy)}; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * n + ix; }

    bool operator==(const Grid2&) const = default;
};

/// Scalar field sampled on a Grid2; values stored row-major, x fastest.
template <typename T>
struct BasicImage {
    Grid2 grid;
    std::vector<T> values;

    BasicImage() = default;
    explicit BasicImage(const Grid2& g, T fill = T{}) : grid(g), values(g.size(), fill) {}

    T& at(int ix, int iy) { return values[grid.index(ix, iy)]; }
    const T& at(int ix, int iy) const { return values[grid.index(ix, iy)]; }

    /// Bilinear interpolation at a physical point; zero outside the grid square.
    T interp(Vec2 p) const {
        const double h = grid.spacing();
        const double fx = (p.x + grid.extent) / h;
        const double fy = (p.y + grid.extent) / h;
        if (fx < 0.0 || fy < 0.0 || fx > grid.n - 1 || fy > grid.n - 1) return T{};
        int ix = static_cast<int>(fx);
        int iy = static_cast<int>(fy);
        if (ix == grid.n - 1) --ix;
        if (iy == grid.n - 1) --iy;
        const double u = fx - ix, v = fy - iy;
        return static_cast<T>(at(ix, iy) * ((1 - u) * (1 - v)) + at(ix + 1, iy) * (u * (1 - v)) +
                              at(ix, iy + 1) * ((1 - u) * v) + at(ix + 1, iy + 1) * (u * v));
    }
};

using Image = BasicImage<double>;
using ComplexImage = BasicImage<complexd>;

/// Space-time grid over [-extent, extent]^2 x [0, T].
struct SpaceTimeGrid {
    Grid2 spatial;
    int nt = 2;
    double T = 1.0;

    SpaceTimeGrid() = default;
    SpaceTimeGrid(const Grid2& g, int nt_, double T_);

    double dt() const { return T / (nt - 1); }
    double time(int k) const { return k * dt(); }
};

/// Trapezoidal quadrature weight of node i along one axis (times spacing).
inline double trapezoid_weight(int i, int n, double h) {
    return (i == 0 || i == n - 1) ? 0.5 * h : h;
}

/// Samples a scalar field at the grid nodes. Throws if a value is non-finite.
Image sample(const Grid2& grid, const std::function<double(Vec2)>& field);

/// Tensor-product trapezoidal quadrature over the grid square.
double integrate(const Image& img);
complexd integrate(const ComplexImage& img);

/// Weighted L2 norm (trapezoidal weights).
double l2_norm(const Image& img);
double l2_norm(const ComplexImage& img);

/// ||a - b|| / ||b|| with quadrature weights. Returns +inf when ||b|| = 0 and
/// ||a|| > 0, and 0 when both vanish. Throws on grid mismatch.
double rel_l2_error(const Image& a, const Image& b);

}  // namespace microct
