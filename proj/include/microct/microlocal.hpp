#pragma once

#include <vector>

#include "microct/phantom.hpp"
#include "microct/xray.hpp"

namespace microct {

/// Fixed estimator constants. The defining cutoffs of the wave front set are
/// exact; a discrete estimator must pin concrete choices so that thresholds
/// are reproducible:
///   - Gaussian window of width window_scale / sqrt(freq) (parabolic scaling,
///     so a straight edge stays coherent inside the window),
///   - cone of half-angle 15 degrees around the codirection,
///   - magnitudes normalized by the window's 1D mass sqrt(2*pi)*width.
struct DecayEstimatorParams {
    double window_scale = 1.5;
    double cone_half_angle = 15.0 * pi / 180.0;
    int cone_directions = 7;
    // Direct quadrature of a windowed jump carries an O(h) aliasing floor;
    // magnitudes below this fraction of the image scale are below the
    // estimator's resolution and are flagged smooth.
    double smooth_floor_rel = 1e-4;
};

struct WavefrontEstimate {
    WavefrontSample sample;
    double decay_exponent = 0.0;  // fitted log-magnitude vs log-frequency slope
    double magnitude = 0.0;       // normalized magnitude at the finest scale
    std::vector<double> scale_magnitudes;
};

/// Windowed directional Fourier decay at (x0, xi0) over the given dyadic
/// frequencies (>= 3 entries, all below the grid Nyquist pi/h).
WavefrontEstimate directional_decay(const Image& img, Vec2 x0, Vec2 xi0,
                                    const std::vector<double>& scales,
                                    const DecayEstimatorParams& params = {});

/// Default dyadic scales for a grid: 4 octaves ending near half Nyquist.
std::vector<double> default_scales(const Grid2& grid);

/// Estimated critical Sobolev order. The parabolic window scaling together
/// with the mass normalization shifts the 2D cone-integrability exponent by
/// +1/2, giving alpha* = -decay_exponent - d/2 + 1/2 with d = 2. Estimates
/// decaying faster than exponent -4 are reported as +infinity (smooth).
double sobolev_strength(const Image& img, const WavefrontSample& sample,
                        const std::vector<double>& scales = {},
                        const DecayEstimatorParams& params = {});

double sobolev_strength_from_exponent(double decay_exponent);

/// Normalized finest-scale magnitude at (x0, xi0); the edge-strength measure
/// used by the visibility experiments.
double edge_strength(const Image& img, Vec2 x0, Vec2 xi0,
                     const std::vector<double>& scales = {},
                     const DecayEstimatorParams& params = {});

struct VisibilityRow {
    WavefrontSample sample;
    bool predicted_visible = false;
    double decay_exponent = 0.0;
    double magnitude = 0.0;
};

/// Per-conormal-sample comparison of the geometric visibility prediction with
/// the measured edge strength in a reconstruction from masked data.
std::vector<VisibilityRow> visibility_report(const Phantom& phantom, const LineSet& ls,
                                             const Image& recon_img, int per_component = 32,
                                             const std::vector<double>& scales = {},
                                             const DecayEstimatorParams& params = {});

}  // namespace microct
