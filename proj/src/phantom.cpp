#include "microct/phantom.hpp"

#include <limits>

namespace microct {

namespace {
constexpr double kBoundaryTol = 1e-12;
}

PhantomComponent PhantomComponent::disc(Vec2 center, double radius, double value) {
    return ellipse(center, radius, radius, 0.0, value);
}

PhantomComponent PhantomComponent::ellipse(Vec2 center, double a, double b, double rotation,
                                           double value) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("PhantomComponent: semi-axes must be positive");
    if (value == 0.0) throw std::invalid_argument("PhantomComponent: value must be nonzero");
    PhantomComponent c;
    c.center = center;
    c.semi_a = a;
    c.semi_b = b;
    c.rotation = rotation;
    c.value = value;
    return c;
}

double PhantomComponent::quadratic_form(Vec2 p) const {
    const double cr = std::cos(rotation), sr = std::sin(rotation);
    const Vec2 d = p - center;
    const double bx = (cr * d.x + sr * d.y) / semi_a;
    const double by = (-sr * d.x + cr * d.y) / semi_b;
    return bx * bx + by * by;
}

Vec2 PhantomComponent::boundary_point(double phi) const {
    const double cr = std::cos(rotation), sr = std::sin(rotation);
    const double bx = semi_a * std::cos(phi), by = semi_b * std::sin(phi);
    return {center.x + cr * bx - sr * by, center.y + sr * bx + cr * by};
}

Vec2 PhantomComponent::outward_normal(double phi) const {
    // gradient of the body-frame quadratic form, rotated to world frame
    const double cr = std::cos(rotation), sr = std::sin(rotation);
    const double gx = std::cos(phi) / semi_a, gy = std::sin(phi) / semi_b;
    return Vec2{cr * gx - sr * gy, sr * gx + cr * gy}.normalized();
}

double PhantomComponent::chord_length(Vec2 p0, Vec2 dir) const {
    // Map the line into the body frame scaled to the unit disc; the parameter t
    // is arc length in world space, so |t2 - t1| is the chord length.
    const double cr = std::cos(rotation), sr = std::sin(rotation);
    const Vec2 d0 = p0 - center;
    const Vec2 y0{(cr * d0.x + sr * d0.y) / semi_a, (-sr * d0.x + cr * d0.y) / semi_b};
    const Vec2 yd{(cr * dir.x + sr * dir.y) / semi_a, (-sr * dir.x + cr * dir.y) / semi_b};
    const double A = yd.dot(yd);
    const double B = 2.0 * y0.dot(yd);
    const double C = y0.dot(y0) - 1.0;
    const double disc = B * B - 4.0 * A * C;
    if (disc <= 0.0) return 0.0;
    return std::sqrt(disc) / A;
}

double PhantomComponent::boundary_distance_estimate(Vec2 p) const {
    const double cr = std::cos(rotation), sr = std::sin(rotation);
    const Vec2 d = p - center;
    const double bx = (cr * d.x + sr * d.y) / semi_a;
    const double by = (-sr * d.x + cr * d.y) / semi_b;
    const Vec2 grad{2.0 * (bx * cr / semi_a - by * sr / semi_b),
                    2.0 * (bx * sr / semi_a + by * cr / semi_b)};
    const double g = grad.norm();
    if (g < 1e-14) return std::numeric_limits<double>::infinity();
    return std::abs(bx * bx + by * by - 1.0) / g;
}

Phantom::Phantom(std::vector<PhantomComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("Phantom: no components");
    // Pairwise disjoint closures: boundary samples of one region must stay
    // strictly outside the other, and neither center may lie inside the other
    // (rules out containment).
    constexpr int kSamples = 720;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        for (std::size_t j = 0; j < components_.size(); ++j) {
            if (i == j) continue;
            const auto& a = components_[i];
            const auto& b = components_[j];
            if (b.quadratic_form(a.center) <= 1.0 + kBoundaryTol)
                throw std::invalid_argument("Phantom: component closures intersect");
            for (int k = 0; k < kSamples; ++k) {
                const Vec2 p = a.boundary_point(2.0 * pi * k / kSamples);
                if (b.quadratic_form(p) <= 1.0 + kBoundaryTol)
                    throw std::invalid_argument("Phantom: component closures intersect");
            }
        }
    }
}

Phantom Phantom::unit_disc(double value) {
    return Phantom({PhantomComponent::disc({0.0, 0.0}, 1.0, value)});
}

double Phantom::analytic_radon(double s, Vec2 omega) const {
    const double onorm = omega.norm();
    if (std::abs(onorm - 1.0) > 1e-9)
        throw std::invalid_argument("analytic_radon: omega must be a unit vector");
    const Vec2 p0 = s * omega.perp();
    double sum = 0.0;
    for (const auto& c : components_) sum += c.value * c.chord_length(p0, omega);
    return sum;
}

std::vector<WavefrontSample> Phantom::conormal_samples(int per_component) const {
    if (per_component < 1) throw std::invalid_argument("conormal_samples: count must be >= 1");
    std::vector<WavefrontSample> out;
    out.reserve(components_.size() * per_component);
    for (const auto& c : components_) {
        for (int k = 0; k < per_component; ++k) {
            const double phi = 2.0 * pi * k / per_component;
            out.push_back({c.boundary_point(phi), c.outward_normal(phi), 0.5});
        }
    }
    return out;
}

double Phantom::max_abs_value() const {
    double m = 0.0;
    for (const auto& c : components_) m = std::max(m, std::abs(c.value));
    return m;
}

Image rasterize(const Phantom& phantom, const Grid2& grid) {
    Image img(grid);
    const auto& comps = phantom.components();
    parallel_for(grid.size(), [&](std::size_t idx) {
        const int iy = static_cast<int>(idx) / grid.n;
        const int ix = static_cast<int>(idx) % grid.n;
        const Vec2 p = grid.node(ix, iy);
        double v = 0.0;
        for (const auto& c : comps) {
            const double q = c.quadratic_form(p);
            if (q < 1.0 - kBoundaryTol)
                v += c.value;
            else if (q <= 1.0 + kBoundaryTol)
                v += 0.5 * c.value;
        }
        img.values[idx] = v;
    });
    return img;
}

}  // namespace microct
