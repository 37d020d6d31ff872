#pragma once

#include <optional>

#include "microct/phantom.hpp"
#include "microct/spectral.hpp"
#include "microct/xray.hpp"

namespace microct {

enum class ReconMethod { Fbp, Normal, Backprojection };

const char* to_string(ReconMethod m);
ReconMethod recon_method_from_string(const std::string& name);

struct ReconReport {
    Image image;
    ReconMethod method = ReconMethod::Fbp;
    LineSet mask;
    std::optional<double> rel_error_vs_truth;
};

/// Filtered backprojection: f = (1/4pi) R* |D_s| R f.
Image fbp(const Sinogram& sino, const Grid2& grid);

/// Normal-operator inversion: f = (1/4pi) |D| R* R f.
Image normal_inversion(const Sinogram& sino, const Grid2& grid);

/// The normal operator R* R applied through the discrete transforms.
Image normal_operator(const Image& img, const SinogramGeometry& geom);

/// Reconstruction from masked (zero-filled) data.
ReconReport masked_recon(const Sinogram& sino, const LineSet& ls, const Grid2& grid,
                         ReconMethod method, const Image* truth = nullptr);

/// Relative L2 error excluding a band of band_px pixels around every phantom
/// component boundary, the outer margin_frac of the grid square, and (when
/// fov_radius > 0) everything outside the disc |x| < fov_radius. Gibbs
/// overshoot at jumps is a discretization artifact, and outside the measured
/// disc the backprojection sum is partial by construction.
double interior_rel_error(const Image& recon, const Image& truth, const Phantom& phantom,
                          int band_px = 3, double margin_frac = 0.0, double fov_radius = 0.0);

}  // namespace microct
