#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "microct/microlocal.hpp"
#include "microct/recon.hpp"

using namespace microct;

namespace {

const Grid2& big_grid() {
    static Grid2 g(1024, 1.5);
    return g;
}

const Image& disc_image() {
    static Image img = rasterize(Phantom::unit_disc(), big_grid());
    return img;
}

}  // namespace

TEST_CASE("smooth gaussian decays faster than any tested polynomial") {
    // analytic oracle: the windowed transform of e^{-2|x|^2} at frequency
    // sigma decays like e^{-c sigma}, far below any polynomial rate
    const Grid2 g(512, 1.5);
    const Image img = sample(g, [](Vec2 p) { return std::exp(-2.0 * p.dot(p)); });
    for (auto dir : {Vec2{1, 0}, Vec2{0.6, 0.8}}) {
        const auto est = directional_decay(img, {0.2, 0.1}, dir, {16.0, 32.0, 64.0, 128.0});
        CHECK(est.decay_exponent <= -4.0);
    }
}

TEST_CASE("disc boundary in the normal direction reads as a jump") {
    // 1D jump-model oracle: the normalized windowed transform of a Heaviside
    // edge decays like 1/sigma
    const auto est = directional_decay(disc_image(), {1.0, 0.0}, {1.0, 0.0},
                                       default_scales(big_grid()));
    CHECK(est.decay_exponent == doctest::Approx(-1.0).epsilon(0.15));
    CHECK(est.magnitude > 1e-4);
}

TEST_CASE("disc boundary in the tangent direction reads as smooth") {
    const auto est = directional_decay(disc_image(), {1.0, 0.0}, {0.0, 1.0},
                                       default_scales(big_grid()));
    CHECK(est.decay_exponent == -std::numeric_limits<double>::infinity());
    // and the raw magnitude sits far below the normal direction's
    const auto normal = directional_decay(disc_image(), {1.0, 0.0}, {1.0, 0.0},
                                          default_scales(big_grid()));
    CHECK(est.magnitude < normal.magnitude / 20.0);
}

TEST_CASE("sobolev strength of the disc edge targets one half") {
    const auto samples = Phantom::unit_disc().conormal_samples(16);
    int in_window = 0;
    for (const auto& s : samples) {
        const double a = sobolev_strength(disc_image(), s);
        if (a >= 0.3 && a <= 0.7) ++in_window;
    }
    CHECK(in_window >= 15);
}

TEST_CASE("smooth images report the +infinity strength marker") {
    const Grid2 g(512, 1.5);
    const Image img = sample(g, [](Vec2 p) { return std::exp(-3.0 * p.dot(p)); });
    const double a = sobolev_strength(img, {{0.3, -0.2}, {1.0, 0.0}, 0.0});
    CHECK(std::isinf(a));
}

TEST_CASE("strength is invariant under amplitude scaling") {
    Image doubled = disc_image();
    for (auto& v : doubled.values) v *= 2.0;
    const WavefrontSample s{{1.0, 0.0}, {1.0, 0.0}, 0.5};
    const double a1 = sobolev_strength(disc_image(), s);
    const double a2 = sobolev_strength(doubled, s);
    CHECK(a1 == doctest::Approx(a2).epsilon(1e-12));
}

TEST_CASE("decay estimate is symmetric under xi0 -> -xi0") {
    const auto plus = directional_decay(disc_image(), {0.0, 1.0}, {0.0, 1.0},
                                        default_scales(big_grid()));
    const auto minus = directional_decay(disc_image(), {0.0, 1.0}, {0.0, -1.0},
                                         default_scales(big_grid()));
    CHECK(plus.magnitude == doctest::Approx(minus.magnitude).epsilon(1e-10));
    CHECK(plus.decay_exponent == doctest::Approx(minus.decay_exponent).epsilon(1e-10));
}

TEST_CASE("translation equivariance on grid shifts") {
    const Grid2 g(256, 1.5);
    const double h = g.spacing();
    const auto field = [](Vec2 p) {
        return (p.norm() <= 0.5 ? 1.0 : 0.0) + std::exp(-4.0 * p.dot(p));
    };
    const Image base = sample(g, field);
    const Vec2 shift{7.0 * h, -5.0 * h};
    const Image moved = sample(g, [&](Vec2 p) { return field(p - shift); });
    // window must stay interior to the grid or clipping breaks the symmetry
    DecayEstimatorParams prm;
    prm.window_scale = 0.75;
    const std::vector<double> scales{64.0, 128.0, 224.0};
    const Vec2 x0{0.5, 0.0};
    const auto a = directional_decay(base, x0, {1.0, 0.0}, scales, prm);
    const auto b = directional_decay(moved, x0 + shift, {1.0, 0.0}, scales, prm);
    CHECK(a.magnitude == doctest::Approx(b.magnitude).epsilon(1e-8));
    CHECK(a.decay_exponent == doctest::Approx(b.decay_exponent).epsilon(1e-8));
}

TEST_CASE("visibility report with the full line set predicts everything visible") {
    const Grid2 g(256, 1.5);
    const Phantom disc = Phantom::unit_disc();
    const Image img = rasterize(disc, g);
    for (const auto& row : visibility_report(disc, LineSet::full(), img, 8))
        CHECK(row.predicted_visible);
}

TEST_CASE("limited-angle predictions follow the aperture geometry") {
    const Grid2 g(256, 1.5);
    const Phantom disc = Phantom::unit_disc();
    const Image img = rasterize(disc, g);
    const double a = pi / 4.0;
    const LineSet la = LineSet::limited_angle(a);
    for (const auto& row : visibility_report(disc, la, img, 32)) {
        // brute-force geometry: for the disc, the conormal line at boundary
        // angle phi has direction (-sin phi, cos phi)
        const double phi = std::atan2(row.sample.x0.y, row.sample.x0.x);
        const Vec2 d{-std::sin(phi), std::cos(phi)};
        const bool oracle = std::atan2(std::abs(d.y), std::abs(d.x)) < a;
        CHECK(row.predicted_visible == oracle);
    }
}

TEST_CASE("dichotomy: visible magnitudes dominate invisible ones") {
    const Grid2 g(512, 1.5);
    const Phantom disc = Phantom::unit_disc();
    const Image truth = rasterize(disc, g);
    const SinogramGeometry geom(512, 1.45, 512);
    const Sinogram sino = radon(truth, geom);
    const LineSet la = LineSet::limited_angle(pi / 4.0);
    const auto report = masked_recon(sino, la, g, ReconMethod::Fbp);
    std::vector<double> vis, invis;
    for (const auto& row : visibility_report(disc, la, report.image, 32))
        (row.predicted_visible ? vis : invis).push_back(row.magnitude);
    REQUIRE(!vis.empty());
    REQUIRE(!invis.empty());
    std::sort(vis.begin(), vis.end());
    std::sort(invis.begin(), invis.end());
    CHECK(vis[vis.size() / 2] >= 5.0 * invis[invis.size() / 2]);
}

TEST_CASE("growing the line set cannot decrease visible magnitudes") {
    const Grid2 g(256, 1.5);
    const Phantom disc = Phantom::unit_disc();
    const Image truth = rasterize(disc, g);
    const SinogramGeometry geom(256, 1.45, 256);
    const Sinogram sino = radon(truth, geom);
    const LineSet small_set = LineSet::limited_angle(pi / 6.0);
    const LineSet big_set = LineSet::limited_angle(pi / 3.0);
    const auto rec_small = masked_recon(sino, small_set, g, ReconMethod::Fbp);
    const auto rec_big = masked_recon(sino, big_set, g, ReconMethod::Fbp);
    const auto rows_small = visibility_report(disc, small_set, rec_small.image, 16);
    const auto rows_big = visibility_report(disc, big_set, rec_big.image, 16);
    for (std::size_t i = 0; i < rows_small.size(); ++i) {
        if (!rows_small[i].predicted_visible) continue;
        CHECK(rows_small[i].magnitude <= rows_big[i].magnitude * 1.10 + 1e-9);
    }
}

TEST_CASE("estimator input validation") {
    const Grid2 g(64, 1.0);
    const Image img(g);
    CHECK_THROWS_AS((void)directional_decay(img, {2.0, 0.0}, {1, 0}, {8, 16, 32}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)directional_decay(img, {0.0, 0.0}, {1, 0}, {8, 16}),
                    std::invalid_argument);
    const double nyquist = pi / g.spacing();
    CHECK_THROWS_AS((void)directional_decay(img, {0.0, 0.0}, {1, 0}, {8, 16, nyquist * 1.5}),
                    std::invalid_argument);
}
