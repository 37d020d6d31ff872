#include "microct/recon.hpp"

namespace microct {

const char* to_string(ReconMethod m) {
    switch (m) {
        case ReconMethod::Fbp: return "fbp";
        case ReconMethod::Normal: return "normal";
        case ReconMethod::Backprojection: return "backprojection";
    }
    return "?";
}

ReconMethod recon_method_from_string(const std::string& name) {
    if (name == "fbp") return ReconMethod::Fbp;
    if (name == "normal") return ReconMethod::Normal;
    if (name == "backprojection") return ReconMethod::Backprojection;
    throw std::invalid_argument("unknown reconstruction method: " + name);
}

Image fbp(const Sinogram& sino, const Grid2& grid) {
    // padding 8 keeps the truncated ramp kernel's wraparound offset below the
    // discretization floor
    Image img = backproject(riesz_1d(sino, FilterSpec(1.0, 0.0, 8)), grid);
    for (auto& v : img.values) v /= 4.0 * pi;
    return img;
}

Image normal_inversion(const Sinogram& sino, const Grid2& grid) {
    // The backprojection field decays only like 1/|x|; applying |D| to it on
    // the target grid would see a large jump at the padding boundary. Work on
    // a canvas three times wider and crop.
    const int factor = 3;
    const Grid2 canvas(factor * (grid.n - 1) + 1, factor * grid.extent);
    const Image filtered = frac_laplacian_2d(backproject(sino, canvas), FilterSpec(1.0));
    Image img(grid);
    const int off = (canvas.n - grid.n) / 2;
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix)
            img.at(ix, iy) = filtered.at(ix + off, iy + off) / (4.0 * pi);
    return img;
}

Image normal_operator(const Image& img, const SinogramGeometry& geom) {
    return backproject(radon(img, geom), img.grid);
}

ReconReport masked_recon(const Sinogram& sino, const LineSet& ls, const Grid2& grid,
                         ReconMethod method, const Image* truth) {
    const Sinogram masked = mask(sino, ls);
    ReconReport report;
    report.method = method;
    report.mask = ls;
    switch (method) {
        case ReconMethod::Fbp: report.image = fbp(masked, grid); break;
        case ReconMethod::Normal: report.image = normal_inversion(masked, grid); break;
        case ReconMethod::Backprojection: report.image = backproject(masked, grid); break;
    }
    if (truth) report.rel_error_vs_truth = rel_l2_error(report.image, *truth);
    return report;
}

double interior_rel_error(const Image& recon, const Image& truth, const Phantom& phantom,
                          int band_px, double margin_frac, double fov_radius) {
    if (!(recon.grid == truth.grid)) throw std::invalid_argument("interior_rel_error: grid mismatch");
    const Grid2& grid = recon.grid;
    const double h = grid.spacing();
    const double band = band_px * h;
    const double margin = grid.extent * (1.0 - margin_frac);

    double num = 0.0, den = 0.0;
    for (int iy = 0; iy < grid.n; ++iy) {
        const double wy = trapezoid_weight(iy, grid.n, h);
        for (int ix = 0; ix < grid.n; ++ix) {
            const Vec2 p = grid.node(ix, iy);
            if (std::abs(p.x) > margin || std::abs(p.y) > margin) continue;
            if (fov_radius > 0.0 && p.norm() >= fov_radius) continue;
            bool near_edge = false;
            for (const auto& c : phantom.components()) {
                if (c.boundary_distance_estimate(p) < band) {
                    near_edge = true;
                    break;
                }
            }
            if (near_edge) continue;
            const double w = wy * trapezoid_weight(ix, grid.n, h);
            const double d = recon.at(ix, iy) - truth.at(ix, iy);
            num += w * d * d;
            den += w * truth.at(ix, iy) * truth.at(ix, iy);
        }
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

}  // namespace microct
