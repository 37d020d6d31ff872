#include "microct/spectral.hpp"

#include <fftw3.h>

#include <cstdio>
#include <mutex>

namespace microct {

namespace {
// FFTW plan creation is not thread-safe; execution on the planned buffer is
// serialized per call here anyway.
std::mutex g_fftw_mutex;
}  // namespace

FilterSpec::FilterSpec(double alpha_, double cutoff_, int padding_)
    : alpha(alpha_), cutoff(cutoff_), padding(padding_) {
    if (cutoff < 0.0) throw std::invalid_argument("FilterSpec: cutoff must be >= 0");
    if (padding < 2) throw std::invalid_argument("FilterSpec: padding factor must be >= 2");
}

double FilterSpec::multiplier(double freq_abs) const {
    double hi = 1.0;
    if (cutoff > 0.0) {
        hi = 1.0 - smooth_bump(freq_abs / cutoff);
        if (hi == 0.0) return 0.0;
    }
    if (freq_abs == 0.0) {
        if (alpha == 0.0) return hi;
        return 0.0;  // |0|^alpha: 0 for alpha > 0; singular DC dropped for alpha < 0
    }
    return hi * std::pow(freq_abs, alpha);
}

double one_bin_cutoff(const SinogramGeometry& geom, int padding) {
    return 2.0 * pi / (static_cast<double>(padding) * geom.ns * geom.ds());
}

double one_bin_cutoff(const Grid2& grid, int padding) {
    return 2.0 * pi / (static_cast<double>(padding) * grid.n * grid.spacing());
}

void fft_1d(std::vector<complexd>& data, int sign) {
    const int n = static_cast<int>(data.size());
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(data.data()),
                                      reinterpret_cast<fftw_complex*>(data.data()),
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    if (sign > 0)
        for (auto& v : data) v /= static_cast<double>(n);
}

void fft_2d(std::vector<complexd>& data, int rows, int cols, int sign) {
    if (static_cast<std::size_t>(rows) * cols != data.size())
        throw std::invalid_argument("fft_2d: size mismatch");
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_plan plan = fftw_plan_dft_2d(rows, cols, reinterpret_cast<fftw_complex*>(data.data()),
                                      reinterpret_cast<fftw_complex*>(data.data()),
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    if (sign > 0)
        for (auto& v : data) v /= static_cast<double>(rows) * cols;
}

namespace {

// signed frequency of DFT bin j on a length-n transform with sample spacing d
inline double bin_frequency(int j, int n, double d) {
    const int js = (j <= n / 2) ? j : j - n;
    return 2.0 * pi * js / (n * d);
}

}  // namespace

Sinogram riesz_1d(const Sinogram& sino, const FilterSpec& spec) {
    const auto& g = sino.geometry;
    const int P = spec.padding * g.ns;
    const double ds = g.ds();
    std::vector<double> mult(P);
    for (int j = 0; j < P; ++j) mult[j] = spec.multiplier(std::abs(bin_frequency(j, P, ds)));

    Sinogram out(g);
    std::vector<complexd> buf(P);
    for (int k = 0; k < g.nw; ++k) {
        std::fill(buf.begin(), buf.end(), complexd{});
        for (int i = 0; i < g.ns; ++i) buf[i] = sino.at(i, k);
        fft_1d(buf, -1);
        for (int j = 0; j < P; ++j) buf[j] *= mult[j];
        fft_1d(buf, +1);
        for (int i = 0; i < g.ns; ++i) out.at(i, k) = buf[i].real();
    }
    return out;
}

namespace {

template <typename T>
BasicImage<T> frac_laplacian_impl(const BasicImage<T>& img, const FilterSpec& spec) {
    const int n = img.grid.n;
    const double h = img.grid.spacing();
    const int P = spec.padding * n;

    double vmax = 0.0, edge = 0.0;
    for (const auto& v : img.values) vmax = std::max(vmax, std::abs(v));
    for (int i = 0; i < n; ++i) {
        edge = std::max({edge, std::abs(img.at(i, 0)), std::abs(img.at(i, n - 1)),
                         std::abs(img.at(0, i)), std::abs(img.at(n - 1, i))});
    }
    if (vmax > 0.0 && edge > 1e-8 * vmax)
        std::fprintf(stderr,
                     "frac_laplacian_2d: warning: image boundary value %.3e exceeds 1e-8 of max "
                     "%.3e; wraparound may contaminate the filter\n",
                     edge, vmax);

    std::vector<complexd> buf(static_cast<std::size_t>(P) * P, complexd{});
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) buf[static_cast<std::size_t>(iy) * P + ix] = img.at(ix, iy);
    fft_2d(buf, P, P, -1);
    for (int jy = 0; jy < P; ++jy) {
        const double ky = bin_frequency(jy, P, h);
        for (int jx = 0; jx < P; ++jx) {
            const double kx = bin_frequency(jx, P, h);
            buf[static_cast<std::size_t>(jy) * P + jx] *= spec.multiplier(std::hypot(kx, ky));
        }
    }
    fft_2d(buf, P, P, +1);

    BasicImage<T> out(img.grid);
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            const complexd v = buf[static_cast<std::size_t>(iy) * P + ix];
            if constexpr (std::is_same_v<T, double>)
                out.at(ix, iy) = v.real();
            else
                out.at(ix, iy) = v;
        }
    return out;
}

}  // namespace

Image frac_laplacian_2d(const Image& img, const FilterSpec& spec) {
    return frac_laplacian_impl(img, spec);
}

ComplexImage frac_laplacian_2d(const ComplexImage& img, const FilterSpec& spec) {
    return frac_laplacian_impl(img, spec);
}

std::pair<complexd, complexd> fourier_slice_check(const Image& img, const Sinogram& sino,
                                                  double sigma, int omega_index) {
    const auto& g = sino.geometry;
    if (omega_index < 0 || omega_index >= g.nw)
        throw std::invalid_argument("fourier_slice_check: bad angle bin");
    const complexd I{0.0, 1.0};

    complexd lhs{};
    for (int i = 0; i < g.ns; ++i) {
        const double s = g.offset(i);
        lhs += trapezoid_weight(i, g.ns, g.ds()) * std::exp(-I * sigma * s) * sino.at(i, omega_index);
    }

    const Vec2 xi = sigma * g.omega(omega_index).perp();
    const Grid2& grid = img.grid;
    const double h = grid.spacing();
    complexd rhs{};
    for (int iy = 0; iy < grid.n; ++iy) {
        const double wy = trapezoid_weight(iy, grid.n, h);
        complexd row{};
        for (int ix = 0; ix < grid.n; ++ix) {
            const Vec2 p = grid.node(ix, iy);
            row += trapezoid_weight(ix, grid.n, h) * std::exp(-I * p.dot(xi)) * img.at(ix, iy);
        }
        rhs += wy * row;
    }
    return {lhs, rhs};
}

}  // namespace microct
