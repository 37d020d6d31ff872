#include "microct/grid.hpp"

#include <atomic>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace microct {

unsigned worker_threads() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("MICROCT_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
    }
    return n;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const unsigned nthreads = worker_threads();
    if (nthreads <= 1 || count < 2 * nthreads) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const std::size_t chunk = std::max<std::size_t>(1, count / (8 * nthreads));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= count) return;
                const std::size_t end = std::min(begin + chunk, count);
                for (std::size_t i = begin; i < end; ++i) fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("loglog_slope: need >= 2 matching points");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] <= 0.0 || ys[i] <= 0.0)
            throw std::invalid_argument("loglog_slope: data must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    return ls_slope(lx, ly);
}

double ls_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> fd_weights(int m, const std::vector<double>& offsets) {
    // Fornberg (1988), weights for the m-th derivative at 0 on arbitrary nodes.
    const int nd = static_cast<int>(offsets.size());
    if (nd < m + 1) throw std::invalid_argument("fd_weights: too few nodes");
    std::vector<std::vector<double>> c(nd, std::vector<double>(m + 1, 0.0));
    c[0][0] = 1.0;
    double c1 = 1.0;
    double c4 = offsets[0];
    for (int i = 1; i < nd; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = offsets[i];
        for (int j = 0; j < i; ++j) {
            const double c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nd);
    for (int i = 0; i < nd; ++i) w[i] = c[i][m];
    return w;
}

Grid2::Grid2(int n_, double extent_) : n(n_), extent(extent_) {
    if (n < 2) throw std::invalid_argument("Grid2: n must be >= 2");
    if (!(extent > 0.0)) throw std::invalid_argument("Grid2: extent must be positive");
}

SpaceTimeGrid::SpaceTimeGrid(const Grid2& g, int nt_, double T_) : spatial(g), nt(nt_), T(T_) {
    if (nt < 2) throw std::invalid_argument("SpaceTimeGrid: nt must be >= 2");
    if (!(T > 0.0)) throw std::invalid_argument("SpaceTimeGrid: T must be positive");
}

Image sample(const Grid2& grid, const std::function<double(Vec2)>& field) {
    Image img(grid);
    for (int iy = 0; iy < grid.n; ++iy) {
        for (int ix = 0; ix < grid.n; ++ix) {
            const Vec2 p = grid.node(ix, iy);
            const double v = field(p);
            if (!std::isfinite(v)) {
                std::ostringstream oss;
                oss << "sample: non-finite field value at node (" << ix << ", " << iy << ") = ("
                    << p.x << ", " << p.y << ")";
                throw std::runtime_error(oss.str());
            }
            img.at(ix, iy) = v;
        }
    }
    return img;
}

namespace {

template <typename T>
T integrate_impl(const BasicImage<T>& img) {
    const int n = img.grid.n;
    const double h = img.grid.spacing();
    T sum{};
    for (int iy = 0; iy < n; ++iy) {
        const double wy = trapezoid_weight(iy, n, h);
        T row{};
        for (int ix = 0; ix < n; ++ix) row += img.at(ix, iy) * trapezoid_weight(ix, n, h);
        sum += row * wy;
    }
    return sum;
}

template <typename T>
double l2_norm_impl(const BasicImage<T>& img) {
    const int n = img.grid.n;
    const double h = img.grid.spacing();
    double sum = 0.0;
    for (int iy = 0; iy < n; ++iy) {
        const double wy = trapezoid_weight(iy, n, h);
        double row = 0.0;
        for (int ix = 0; ix < n; ++ix) {
            const double a = std::abs(img.at(ix, iy));
            row += a * a * trapezoid_weight(ix, n, h);
        }
        sum += row * wy;
    }
    return std::sqrt(sum);
}

}  // namespace

double integrate(const Image& img) { return integrate_impl(img); }
complexd integrate(const ComplexImage& img) { return integrate_impl(img); }
double l2_norm(const Image& img) { return l2_norm_impl(img); }
double l2_norm(const ComplexImage& img) { return l2_norm_impl(img); }

double rel_l2_error(const Image& a, const Image& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("rel_l2_error: grid mismatch");
    Image diff(a.grid);
    for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] = a.values[i] - b.values[i];
    const double nb = l2_norm(b);
    const double nd = l2_norm(diff);
    if (nb == 0.0) return nd == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return nd / nb;
}

}  // namespace microct
