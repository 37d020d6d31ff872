#pragma once

#include <optional>
#include <string>
#include <vector>

#include "microct/grid.hpp"

namespace microct {

/// Disc or ellipse region with constant value. A disc is the ellipse with
/// equal semi-axes and zero rotation.
struct PhantomComponent {
    Vec2 center;
    double semi_a = 1.0;   // semi-axis along the body x-axis
    double semi_b = 1.0;   // semi-axis along the body y-axis
    double rotation = 0.0; // radians, counterclockwise
    double value = 1.0;

    static PhantomComponent disc(Vec2 center, double radius, double value);
    static PhantomComponent ellipse(Vec2 center, double a, double b, double rotation, double value);

    /// Quadratic form Q(p): < 1 inside, = 1 on the boundary, > 1 outside.
    double quadratic_form(Vec2 p) const;
    bool contains(Vec2 p) const { return quadratic_form(p) <= 1.0; }
    /// Boundary point at parameter phi in [0, 2pi).
    Vec2 boundary_point(double phi) const;
    /// Outward unit normal at the boundary point of parameter phi.
    Vec2 outward_normal(double phi) const;
    /// Length of the intersection of this region with the line t -> p0 + t*dir.
    double chord_length(Vec2 p0, Vec2 dir) const;
    /// First-order estimate |Q(p)-1| / |grad Q(p)| of the distance to the
    /// boundary; accurate near the boundary, which is where it is used.
    double boundary_distance_estimate(Vec2 p) const;
};

/// Point-codirection pair with an estimated Sobolev strength. For analytic
/// conormal samples strength carries the jump-singularity order 1/2.
struct WavefrontSample {
    Vec2 x0;
    Vec2 xi0;        // unit codirection
    double strength = 0.5;
};

/// Piecewise-constant sum of characteristic functions with closed-form chords.
/// Component closures must be pairwise disjoint (checked at construction).
class Phantom {
  public:
    explicit Phantom(std::vector<PhantomComponent> components);

    const std::vector<PhantomComponent>& components() const { return components_; }

    /// Exact line integral over the line t -> s*omega_perp + t*omega, |omega| = 1.
    double analytic_radon(double s, Vec2 omega) const;

    /// Equally spaced boundary samples with outward normals, per component.
    std::vector<WavefrontSample> conormal_samples(int per_component) const;

    double max_abs_value() const;

    static Phantom unit_disc(double value = 1.0);

  private:
    std::vector<PhantomComponent> components_;
};

/// Nodal evaluation of the component sum. Nodes exactly on a boundary take
/// half the component value.
Image rasterize(const Phantom& phantom, const Grid2& grid);

}  // namespace microct
