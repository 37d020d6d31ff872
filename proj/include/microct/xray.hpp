#pragma once

#include <vector>

#include "microct/grid.hpp"

namespace microct {

/// Sampling geometry for sinograms: ns offsets on [-s_max, s_max], nw angles
/// equispaced on [0, 2pi). Lines are parametrized as t -> s*omega_perp + t*omega.
struct SinogramGeometry {
    int ns = 2;
    double s_max = 1.0;
    int nw = 2;

    SinogramGeometry() = default;
    SinogramGeometry(int ns_, double s_max_, int nw_);

    double ds() const { return 2.0 * s_max / (ns - 1); }
    double offset(int i) const { return -s_max + i * ds(); }
    double theta(int k) const { return 2.0 * pi * k / nw; }
    Vec2 omega(int k) const { return {std::cos(theta(k)), std::sin(theta(k))}; }
    std::size_t size() const { return static_cast<std::size_t>(ns) * nw; }
    std::size_t index(int i, int k) const { return static_cast<std::size_t>(k) * ns + i; }

    bool operator==(const SinogramGeometry&) const = default;
};

/// Samples of Rf on the (s, omega) grid; angle-major storage.
struct Sinogram {
    SinogramGeometry geometry;
    std::vector<double> values;

    Sinogram() = default;
    explicit Sinogram(const SinogramGeometry& g) : geometry(g), values(g.size(), 0.0) {}

    double& at(int i, int k) { return values[geometry.index(i, k)]; }
    double at(int i, int k) const { return values[geometry.index(i, k)]; }

    /// Linear interpolation of the s-profile at angle bin k; zero outside [-s_max, s_max].
    double interp_offset(double s, int k) const;
};

/// A measurable set of lines. Membership is evaluated on canonical line
/// coordinates (s >= 0; ties at s = 0 broken by angle in [0, pi)).
struct LineSet {
    enum class Kind { Full, LimitedAngle, Exterior, Custom };

    Kind kind = Kind::Full;
    double half_aperture = 0.0;  // limited-angle parameter a, 0 < a < pi/2
    double rho = 0.0;            // exterior radius, > 0
    SinogramGeometry mask_geometry;
    std::vector<bool> mask;      // custom mask over (s_i, omega_k)

    static LineSet full();
    static LineSet limited_angle(double a);
    static LineSet exterior(double rho);
    static LineSet custom(const SinogramGeometry& geom, std::vector<bool> mask);

    /// Membership of the line with offset s and direction omega.
    bool contains_line(double s, Vec2 omega) const;
};

/// Discrete Radon transform by composite quadrature of bilinear interpolation
/// along each line, ray step = half the grid spacing. The image support must
/// lie in |x| < s_max (checked against 1e-12 of the max value).
Sinogram radon(const Image& image, const SinogramGeometry& geom);

/// Backprojection R*: trapezoidal sum over angles of the sinogram interpolated
/// at y . omega_perp.
Image backproject(const Sinogram& sino, const Grid2& grid);

/// Whether the singularity (x0, xi0) is visible from the line set: the line
/// through x0 in direction xi0_perp belongs to it.
bool is_visible(const LineSet& ls, Vec2 x0, Vec2 xi0);

/// Zeroes all sinogram entries whose lines lie outside the line set.
Sinogram mask(const Sinogram& sino, const LineSet& ls);

/// Canonical (s, omega) coordinates of the line through x0 with direction dir:
/// the representative with s >= 0, ties broken by omega angle in [0, pi).
std::pair<double, Vec2> line_coordinates(Vec2 x0, Vec2 dir);

}  // namespace microct
