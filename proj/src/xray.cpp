#include "microct/xray.hpp"

#include <sstream>

namespace microct {

SinogramGeometry::SinogramGeometry(int ns_, double s_max_, int nw_)
    : ns(ns_), s_max(s_max_), nw(nw_) {
    if (ns < 2 || nw < 2) throw std::invalid_argument("SinogramGeometry: ns, nw must be >= 2");
    if (!(s_max > 0.0)) throw std::invalid_argument("SinogramGeometry: s_max must be positive");
}

double Sinogram::interp_offset(double s, int k) const {
    const auto& g = geometry;
    if (s < -g.s_max || s > g.s_max) return 0.0;
    const double f = (s + g.s_max) / g.ds();
    int i = static_cast<int>(f);
    if (i >= g.ns - 1) i = g.ns - 2;
    const double u = f - i;
    return at(i, k) * (1.0 - u) + at(i + 1, k) * u;
}

LineSet LineSet::full() { return LineSet{}; }

LineSet LineSet::limited_angle(double a) {
    if (!(a > 0.0 && a < pi / 2.0))
        throw std::invalid_argument("LineSet: half-aperture must lie in (0, pi/2)");
    LineSet ls;
    ls.kind = Kind::LimitedAngle;
    ls.half_aperture = a;
    return ls;
}

LineSet LineSet::exterior(double rho) {
    if (!(rho > 0.0)) throw std::invalid_argument("LineSet: exterior radius must be positive");
    LineSet ls;
    ls.kind = Kind::Exterior;
    ls.rho = rho;
    return ls;
}

LineSet LineSet::custom(const SinogramGeometry& geom, std::vector<bool> mask) {
    if (mask.size() != geom.size()) throw std::invalid_argument("LineSet: mask size mismatch");
    LineSet ls;
    ls.kind = Kind::Custom;
    ls.mask_geometry = geom;
    ls.mask = std::move(mask);
    return ls;
}

bool LineSet::contains_line(double s, Vec2 omega) const {
    switch (kind) {
        case Kind::Full:
            return true;
        case Kind::LimitedAngle: {
            // angle between the line direction omega and the x-axis, folded to [0, pi/2]
            double th = std::atan2(omega.y, omega.x);
            if (th < 0.0) th += pi;
            if (th >= pi) th -= pi;
            const double angle = std::min(th, pi - th);
            return angle < half_aperture;
        }
        case Kind::Exterior:
            return std::abs(s) > rho;
        case Kind::Custom: {
            const auto& g = mask_geometry;
            if (s < -g.s_max - 0.5 * g.ds() || s > g.s_max + 0.5 * g.ds()) return false;
            int i = static_cast<int>(std::lround((s + g.s_max) / g.ds()));
            i = std::clamp(i, 0, g.ns - 1);
            double th = std::atan2(omega.y, omega.x);
            if (th < 0.0) th += 2.0 * pi;
            int k = static_cast<int>(std::lround(th / (2.0 * pi / g.nw))) % g.nw;
            return mask[g.index(i, k)];
        }
    }
    return false;
}

std::pair<double, Vec2> line_coordinates(Vec2 x0, Vec2 dir) {
    Vec2 omega = dir.normalized();
    double s = x0.dot(omega.perp());
    if (s < -1e-14) {
        omega = {-omega.x, -omega.y};
        s = -s;
    } else if (s < 1e-14) {
        s = 0.0;
        double th = std::atan2(omega.y, omega.x);
        if (th < 0.0) th += 2.0 * pi;
        if (th >= pi) omega = {-omega.x, -omega.y};
    }
    return {s, omega};
}

bool is_visible(const LineSet& ls, Vec2 x0, Vec2 xi0) {
    if (std::abs(xi0.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("is_visible: xi0 must be a unit vector");
    const auto [s, omega] = line_coordinates(x0, xi0.perp());
    return ls.contains_line(s, omega);
}

Sinogram radon(const Image& image, const SinogramGeometry& geom) {
    const Grid2& grid = image.grid;
    double vmax = 0.0;
    for (double v : image.values) vmax = std::max(vmax, std::abs(v));
    double outside = 0.0;
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix)
            if (grid.node(ix, iy).norm() >= geom.s_max)
                outside = std::max(outside, std::abs(image.at(ix, iy)));
    if (vmax > 0.0 && outside > 1e-12 * vmax) {
        std::ostringstream oss;
        oss << "radon: image support extends to |x| >= s_max = " << geom.s_max
            << " (boundary value " << outside << "); increase s_max";
        throw std::invalid_argument(oss.str());
    }

    Sinogram sino(geom);
    const double step_target = 0.5 * grid.spacing();
    const int nsteps = std::max(2, static_cast<int>(std::ceil(2.0 * geom.s_max / step_target)));
    const double dt = 2.0 * geom.s_max / nsteps;

    parallel_for(geom.size(), [&](std::size_t idx) {
        const int k = static_cast<int>(idx) / geom.ns;
        const int i = static_cast<int>(idx) % geom.ns;
        const Vec2 omega = geom.omega(k);
        const Vec2 base = geom.offset(i) * omega.perp();
        double sum = 0.0;
        for (int m = 0; m <= nsteps; ++m) {
            const double t = -geom.s_max + m * dt;
            const double w = (m == 0 || m == nsteps) ? 0.5 : 1.0;
            sum += w * image.interp(base + t * omega);
        }
        sino.values[idx] = sum * dt;
    });
    return sino;
}

Image backproject(const Sinogram& sino, const Grid2& grid) {
    for (double v : sino.values)
        if (!std::isfinite(v)) throw std::invalid_argument("backproject: non-finite sinogram");
    const auto& g = sino.geometry;
    Image img(grid);
    const double dw = 2.0 * pi / g.nw;
    parallel_for(grid.size(), [&](std::size_t idx) {
        const int iy = static_cast<int>(idx) / grid.n;
        const int ix = static_cast<int>(idx) % grid.n;
        const Vec2 y = grid.node(ix, iy);
        double sum = 0.0;
        for (int k = 0; k < g.nw; ++k) {
            const Vec2 omega = g.omega(k);
            sum += sino.interp_offset(y.dot(omega.perp()), k);
        }
        img.values[idx] = sum * dw;
    });
    return img;
}

Sinogram mask(const Sinogram& sino, const LineSet& ls) {
    Sinogram out = sino;
    const auto& g = sino.geometry;
    for (int k = 0; k < g.nw; ++k) {
        const Vec2 omega = g.omega(k);
        for (int i = 0; i < g.ns; ++i)
            if (!ls.contains_line(g.offset(i), omega)) out.at(i, k) = 0.0;
    }
    return out;
}

}  // namespace microct
