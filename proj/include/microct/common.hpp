#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace microct {

using complexd = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double c) const { return {x * c, y * c}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    // counterclockwise rotation by 90 degrees
    Vec2 perp() const { return {-y, x}; }
    Vec2 normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
        return {x / n, y / n};
    }
};

inline Vec2 operator*(double c, Vec2 v) { return v * c; }

/// Number of worker threads, capped by the MICROCT_THREADS env var.
unsigned worker_threads();

/// Runs fn(i) for i in [0, count). Each index writes only its own outputs,
/// so results are identical regardless of thread count or schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

/// Smooth cutoff: 1 on [0, 1/2], 0 on [1, inf), quintic spline in between.
inline double smooth_bump(double u) {
    u = std::abs(u);
    if (u <= 0.5) return 1.0;
    if (u >= 1.0) return 0.0;
    const double t = (u - 0.5) * 2.0;
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

/// Least-squares slope of log(y) vs log(x). Requires xs, ys > 0 and >= 2 points.
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// Plain least-squares slope of y vs x.
double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys);

/// FNV-1a 64-bit hash; used for run-manifest content hashes.
std::uint64_t fnv1a64(const void* data, std::size_t len);

/// One-sided / centered finite-difference weights for d^m/dx^m at x0 = 0
/// on nodes {offsets[i] * h}. Standard Fornberg recurrence.
std::vector<double> fd_weights(int m, const std::vector<double>& offsets);

}  // namespace microct
