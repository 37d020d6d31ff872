#pragma once

#include <utility>
#include <vector>

#include "microct/xray.hpp"

namespace microct {

/// Fourier multiplier |.|^alpha with an optional smooth low-frequency cutoff
/// of radius rho0 (the multiplier is m(s) = |s|^alpha * (1 - psi(s/rho0)) with
/// psi = 1 near 0), applied on a grid zero-padded by the given factor.
struct FilterSpec {
    double alpha = 0.0;
    double cutoff = 0.0;  // rho0 >= 0; 0 disables the cutoff
    int padding = 2;

    FilterSpec() = default;
    FilterSpec(double alpha_, double cutoff_ = 0.0, int padding_ = 2);

    double multiplier(double freq_abs) const;
};

/// Frequency spacing of the padded 1D transform on the sinogram offset axis.
double one_bin_cutoff(const SinogramGeometry& geom, int padding = 2);
/// Frequency spacing of the padded 2D transform on an image grid.
double one_bin_cutoff(const Grid2& grid, int padding = 2);

/// In-place unnormalized DFT; sign = -1 forward, +1 backward (backward is
/// scaled by 1/N so forward/backward round-trip is the identity).
void fft_1d(std::vector<complexd>& data, int sign);
void fft_2d(std::vector<complexd>& data, int rows, int cols, int sign);

/// 1D Riesz filter |D_s|^alpha applied per angle to the offset profiles.
Sinogram riesz_1d(const Sinogram& sino, const FilterSpec& spec);

/// 2D fractional Laplacian |D|^alpha. Warns on stderr when the image does not
/// decay at the grid boundary (wraparound contaminates the result).
Image frac_laplacian_2d(const Image& img, const FilterSpec& spec);
ComplexImage frac_laplacian_2d(const ComplexImage& img, const FilterSpec& spec);

/// Evaluates both sides of the Fourier slice identity at frequency sigma and
/// angle bin omega_index: lhs is the 1D transform of the offset profile by
/// direct summation, rhs the 2D transform of the image at sigma * omega_perp.
std::pair<complexd, complexd> fourier_slice_check(const Image& img, const Sinogram& sino,
                                                  double sigma, int omega_index);

}  // namespace microct
