#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "microct/phantom.hpp"
#include "microct/xray.hpp"

using namespace microct;

namespace {

// independent brute-force membership: geometric predicates evaluated by
// sampling the line rather than through (s, omega) bookkeeping
bool brute_force_visible(const LineSet& ls, Vec2 x0, Vec2 xi0) {
    const Vec2 d = xi0.perp().normalized();
    switch (ls.kind) {
        case LineSet::Kind::Full:
            return true;
        case LineSet::Kind::LimitedAngle:
            return std::atan2(std::abs(d.y), std::abs(d.x)) < ls.half_aperture;
        case LineSet::Kind::Exterior: {
            double dmin = std::numeric_limits<double>::infinity();
            for (int i = 0; i <= 400000; ++i) {
                const double t = -20.0 + i * 1e-4;
                dmin = std::min(dmin, (x0 + t * d).norm());
            }
            return dmin > ls.rho;
        }
        case LineSet::Kind::Custom:
            break;
    }
    return false;
}

}  // namespace

TEST_CASE("radon of the rasterized unit disc matches the chord at s = 0") {
    const Grid2 g(256, 1.5);
    const Image img = rasterize(Phantom::unit_disc(), g);
    const SinogramGeometry geom(64, 1.4, 16);
    const Sinogram sino = radon(img, geom);
    // offset grid contains s = 0 only for odd ns; interpolate bin values
    const int mid = geom.ns / 2;
    const double s_mid = geom.offset(mid);
    const double expected = 2.0 * std::sqrt(1.0 - s_mid * s_mid);
    CHECK(std::abs(sino.at(mid, 0) - expected) < 2.0 * g.spacing());
}

TEST_CASE("radon of zero image is the zero sinogram") {
    const Grid2 g(64, 1.0);
    const Sinogram sino = radon(Image(g), SinogramGeometry(32, 0.9, 8));
    for (double v : sino.values) CHECK(v == 0.0);
}

TEST_CASE("radon of a gaussian matches sqrt(pi) e^{-s^2}") {
    // 1D Gaussian quadrature oracle: integrating e^{-|x|^2} over a line at
    // offset s leaves sqrt(pi) e^{-s^2}
    const Grid2 g(512, 6.0);
    const Image img = sample(g, [](Vec2 p) { return std::exp(-p.dot(p)); });
    const SinogramGeometry geom(65, 5.5, 8);
    const Sinogram sino = radon(img, geom);
    double max_err = 0.0;
    for (int k = 0; k < geom.nw; ++k)
        for (int i = 0; i < geom.ns; ++i) {
            const double s = geom.offset(i);
            max_err = std::max(max_err,
                               std::abs(sino.at(i, k) - std::sqrt(pi) * std::exp(-s * s)));
        }
    CHECK(max_err < 1e-3);
}

TEST_CASE("radon rejects images supported beyond s_max") {
    const Grid2 g(64, 2.0);
    const Image img = sample(g, [](Vec2 p) { return std::exp(-p.dot(p)); });
    CHECK_THROWS_WITH_AS((void)radon(img, SinogramGeometry(32, 1.0, 8)),
                         doctest::Contains("s_max"), std::invalid_argument);
}

TEST_CASE("radon is linear") {
    const Grid2 g(96, 2.0);
    const Image f = sample(g, [](Vec2 p) { return std::exp(-12.0 * p.dot(p)); });
    const Image h = sample(g, [](Vec2 p) {
        const Vec2 c{0.3, 0.1};
        return std::exp(-14.0 * (p - c).dot(p - c));
    });
    Image combo(g);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        combo.values[i] = 2.0 * f.values[i] - 0.5 * h.values[i];
    const SinogramGeometry geom(48, 1.9, 12);
    const Sinogram sf = radon(f, geom), sh = radon(h, geom), sc = radon(combo, geom);
    for (std::size_t i = 0; i < sc.values.size(); ++i)
        CHECK(sc.values[i] ==
              doctest::Approx(2.0 * sf.values[i] - 0.5 * sh.values[i]).epsilon(1e-12));
}

TEST_CASE("sinogram evenness: bins at (-s, omega+pi) agree") {
    const Grid2 g(128, 1.5);
    const Image img = sample(g, [](Vec2 p) {
        const Vec2 c{0.3, -0.2};
        return std::exp(-30.0 * (p - c).dot(p - c));
    });
    const SinogramGeometry geom(41, 1.4, 16);  // nw even so omega + pi is a bin
    const Sinogram sino = radon(img, geom);
    double vmax = 0.0, dmax = 0.0;
    for (double v : sino.values) vmax = std::max(vmax, std::abs(v));
    for (int k = 0; k < geom.nw; ++k) {
        const int kk = (k + geom.nw / 2) % geom.nw;
        for (int i = 0; i < geom.ns; ++i)
            dmax = std::max(dmax, std::abs(sino.at(i, k) - sino.at(geom.ns - 1 - i, kk)));
    }
    CHECK(dmax < 1e-10 * vmax);
}

TEST_CASE("backprojection of the constant sinogram is 2 pi inside") {
    const SinogramGeometry geom(41, 1.5, 24);
    Sinogram sino(geom);
    std::fill(sino.values.begin(), sino.values.end(), 1.0);
    const Grid2 g(64, 1.0);
    const Image img = backproject(sino, g);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
            if (g.node(ix, iy).norm() < geom.s_max)
                CHECK(img.at(ix, iy) == doctest::Approx(2.0 * pi).epsilon(1e-10));
}

TEST_CASE("backprojection of the zero sinogram is zero") {
    const SinogramGeometry geom(16, 1.0, 8);
    const Image img = backproject(Sinogram(geom), Grid2(32, 1.0));
    for (double v : img.values) CHECK(v == 0.0);
}

TEST_CASE("adjointness: <Rf, h> = <f, R*h> within 1%") {
    // both sides by independent quadrature
    const Grid2 g(128, 1.5);
    const Image f = sample(g, [](Vec2 p) {
        const Vec2 c{0.15, -0.2};
        return std::exp(-16.0 * p.dot(p)) + 0.5 * std::exp(-22.0 * (p - c).dot(p - c));
    });
    const SinogramGeometry geom(101, 1.45, 64);
    const auto hfun = [](double s, double theta) {
        return std::exp(-2.0 * s * s) * (1.0 + 0.3 * std::cos(2.0 * theta));
    };
    Sinogram h(geom);
    for (int k = 0; k < geom.nw; ++k)
        for (int i = 0; i < geom.ns; ++i) h.at(i, k) = hfun(geom.offset(i), geom.theta(k));

    const Sinogram Rf = radon(f, geom);
    double lhs = 0.0;
    const double dw = 2.0 * pi / geom.nw;
    for (int k = 0; k < geom.nw; ++k)
        for (int i = 0; i < geom.ns; ++i)
            lhs += trapezoid_weight(i, geom.ns, geom.ds()) * dw * Rf.at(i, k) * h.at(i, k);

    const Image Bh = backproject(h, g);
    Image prod(g);
    for (std::size_t i = 0; i < prod.values.size(); ++i)
        prod.values[i] = f.values[i] * Bh.values[i];
    const double rhs = integrate(prod);
    CHECK(lhs == doctest::Approx(rhs).epsilon(0.01));
}

TEST_CASE("is_visible reference cases") {
    SUBCASE("limited angle") {
        const LineSet ls = LineSet::limited_angle(pi / 4.0);
        // x0 = 0, xi0 = (0,1): line direction (0,1)^perp = (-1,0), angle 0
        CHECK(is_visible(ls, {0, 0}, {0, 1}));
        // xi0 = (1,0): line direction (0,1), angle pi/2
        CHECK_FALSE(is_visible(ls, {0, 0}, {1, 0}));
    }
    SUBCASE("exterior") {
        const LineSet ls = LineSet::exterior(1.0);
        CHECK_FALSE(is_visible(ls, {0, 0}, {0, 1}));
        CHECK_FALSE(is_visible(ls, {0, 0}, {std::sqrt(0.5), std::sqrt(0.5)}));
        CHECK(is_visible(ls, {1.5, 0}, {1, 0}));  // vertical line at x = 1.5
    }
    SUBCASE("full") {
        CHECK(is_visible(LineSet::full(), {0.3, -0.7}, {0, 1}));
    }
}

TEST_CASE("is_visible is invariant under xi0 -> -xi0") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ux(-1.2, 1.2), uth(0.0, 2.0 * pi);
    const LineSet sets[] = {LineSet::full(), LineSet::limited_angle(0.6), LineSet::exterior(0.8)};
    for (const auto& ls : sets) {
        for (int trial = 0; trial < 60; ++trial) {
            const Vec2 x0{ux(rng), ux(rng)};
            const double th = uth(rng);
            const Vec2 xi{std::cos(th), std::sin(th)};
            const Vec2 mxi{-xi.x, -xi.y};
            CHECK(is_visible(ls, x0, xi) == is_visible(ls, x0, mxi));
        }
    }
}

TEST_CASE("200 random samples agree with the brute-force oracle") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> ux(-1.2, 1.2), uth(0.0, 2.0 * pi);
    const LineSet limited = LineSet::limited_angle(pi / 4.0);
    const LineSet exterior = LineSet::exterior(0.9);
    int checked = 0;
    while (checked < 200) {
        const Vec2 x0{ux(rng), ux(rng)};
        const double th = uth(rng);
        const Vec2 xi{std::cos(th), std::sin(th)};
        // skip samples within tolerance of a decision boundary; openness of the
        // line set is below resolution there
        const Vec2 d = xi.perp();
        const double angle = std::atan2(std::abs(d.y), std::abs(d.x));
        const double dist = std::abs(x0.dot(xi));  // line-to-origin distance
        if (std::abs(angle - pi / 4.0) < 1e-3 || std::abs(dist - 0.9) < 1e-3) continue;
        CHECK(is_visible(limited, x0, xi) == brute_force_visible(limited, x0, xi));
        CHECK(is_visible(exterior, x0, xi) == brute_force_visible(exterior, x0, xi));
        ++checked;
    }
}

TEST_CASE("custom masks agree with the predicate that built them") {
    const SinogramGeometry geom(81, 1.5, 96);
    const LineSet limited = LineSet::limited_angle(0.5);
    std::vector<bool> bits(geom.size());
    for (int k = 0; k < geom.nw; ++k)
        for (int i = 0; i < geom.ns; ++i)
            bits[geom.index(i, k)] = limited.contains_line(geom.offset(i), geom.omega(k));
    const LineSet custom = LineSet::custom(geom, bits);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ux(-1.0, 1.0), uth(0.0, 2.0 * pi);
    int checked = 0;
    while (checked < 100) {
        const Vec2 x0{ux(rng), ux(rng)};
        const double th = uth(rng);
        const Vec2 xi{std::cos(th), std::sin(th)};
        const Vec2 d = xi.perp();
        const double angle = std::atan2(std::abs(d.y), std::abs(d.x));
        // stay away from the aperture edge by more than one angle bin
        if (std::abs(angle - 0.5) < 2.0 * (2.0 * pi / geom.nw)) continue;
        if (std::abs(x0.dot(xi)) > geom.s_max - 0.1) continue;
        CHECK(is_visible(custom, x0, xi) == is_visible(limited, x0, xi));
        ++checked;
    }
}

TEST_CASE("mask with the full line set is the identity") {
    const SinogramGeometry geom(21, 1.0, 12);
    Sinogram sino(geom);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : sino.values) v = u(rng);
    const Sinogram out = mask(sino, LineSet::full());
    CHECK(out.values == sino.values);
}

TEST_CASE("exterior mask at rho = s_max zeroes everything") {
    const SinogramGeometry geom(21, 1.0, 12);
    Sinogram sino(geom);
    std::fill(sino.values.begin(), sino.values.end(), 1.0);
    const Sinogram out = mask(sino, LineSet::exterior(geom.s_max));
    for (double v : out.values) CHECK(v == 0.0);
}

TEST_CASE("limited-angle mask keeps a 2a/pi fraction of angle bins") {
    const SinogramGeometry geom(5, 1.0, 360);
    Sinogram sino(geom);
    std::fill(sino.values.begin(), sino.values.end(), 1.0);
    for (double a : {0.3, pi / 4.0, 1.2}) {
        const Sinogram out = mask(sino, LineSet::limited_angle(a));
        int kept = 0, oracle = 0;
        for (int k = 0; k < geom.nw; ++k) {
            // counting oracle: fold the bin angle to [0, pi/2] directly; bins
            // exactly on the aperture boundary are below resolution
            const double th = geom.theta(k);
            double folded = std::fmod(th, pi);
            folded = std::min(folded, pi - folded);
            if (std::abs(folded - a) < 1e-12) continue;
            if (out.at(2, k) != 0.0) ++kept;
            if (folded < a) ++oracle;
        }
        CHECK(kept == oracle);
        // the aperture has four endpoints on the angle circle, each off by at
        // most half a bin
        const double frac = static_cast<double>(kept) / geom.nw;
        CHECK(std::abs(frac - 2.0 * a / pi) <= 2.0 / geom.nw + 1e-12);
    }
}
