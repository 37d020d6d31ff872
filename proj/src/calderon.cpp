#include "microct/calderon.hpp"

#include "microct/grid.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace microct {

namespace {

std::atomic<long> g_solves{0};
std::atomic<long> g_max_principle_violations{0};

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

template <typename T>
std::vector<T> d_dx(const std::vector<T>& a, double h) {
    const int n = static_cast<int>(a.size());
    std::vector<T> out(n);
    for (int i = 1; i < n - 1; ++i) out[i] = (a[i + 1] - a[i - 1]) / (2.0 * h);
    out[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h);
    out[n - 1] = (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * h);
    return out;
}

template <typename T>
std::vector<T> d_dxx(const std::vector<T>& a, double h) {
    const int n = static_cast<int>(a.size());
    std::vector<T> out(n);
    for (int i = 1; i < n - 1; ++i) out[i] = (a[i + 1] - 2.0 * a[i] + a[i - 1]) / (h * h);
    out[0] = (2.0 * a[0] - 5.0 * a[1] + 4.0 * a[2] - a[3]) / (h * h);
    out[n - 1] = (2.0 * a[n - 1] - 5.0 * a[n - 2] + 4.0 * a[n - 3] - a[n - 4]) / (h * h);
    return out;
}

}  // namespace

HalfGrid::HalfGrid(double width_, double height_, int nodes_per_unit) {
    if (nodes_per_unit < 2) throw std::invalid_argument("HalfGrid: need >= 2 nodes per unit");
    if (!(width_ > 0.0) || !(height_ > 0.0))
        throw std::invalid_argument("HalfGrid: dimensions must be positive");
    width = width_;
    height = height_;
    nx = static_cast<int>(std::lround(2.0 * width * nodes_per_unit)) + 1;
    ny = static_cast<int>(std::lround(height * nodes_per_unit)) + 1;
    const double hh = 1.0 / nodes_per_unit;
    if (std::abs((nx - 1) * hh - 2.0 * width) > 1e-9 || std::abs((ny - 1) * hh - height) > 1e-9)
        throw std::invalid_argument("HalfGrid: width and height must be multiples of the spacing");
}

HalfField make_half_field(const HalfGrid& g, const std::function<complexd(double, double)>& fn) {
    HalfField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.at(i, j) = fn(g.xp(i), g.xn(j));
    return f;
}

RealHalfField make_real_half_field(const HalfGrid& g,
                                   const std::function<double(double, double)>& fn) {
    RealHalfField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.at(i, j) = fn(g.xp(i), g.xn(j));
    return f;
}

Conductivity::Conductivity(RealHalfField g) : gamma(std::move(g)) {
    double mn = std::numeric_limits<double>::infinity();
    for (double v : gamma.values) mn = std::min(mn, v);
    if (!(mn > 0.0)) throw std::invalid_argument("Conductivity: values must be positive");
}

Conductivity Conductivity::constant(const HalfGrid& g, double value) {
    RealHalfField f(g);
    std::fill(f.values.begin(), f.values.end(), value);
    return Conductivity(std::move(f));
}

Conductivity Conductivity::from_function(const HalfGrid& g,
                                         const std::function<double(double, double)>& fn) {
    return Conductivity(make_real_half_field(g, fn));
}

std::vector<double> gamma_normal_trace(const Conductivity& gamma, int r) {
    const HalfGrid& g = gamma.gamma.grid;
    const double h = g.h();
    const int pts = r + 3;  // second-order one-sided stencil
    if (g.ny < pts) throw std::invalid_argument("gamma_normal_trace: grid too shallow");
    std::vector<double> offsets(pts);
    for (int j = 0; j < pts; ++j) offsets[j] = j * h;
    const auto w = fd_weights(r, offsets);
    std::vector<double> out(g.nx, 0.0);
    for (int i = 0; i < g.nx; ++i) {
        double acc = 0.0;
        for (int j = 0; j < pts; ++j) acc += w[j] * gamma.gamma.at(i, j);
        out[i] = acc;
    }
    return out;
}

CalderonQuasimode::CalderonQuasimode(const Conductivity& gamma, double x0, double xi0p,
                                     const std::function<double(double)>& chi, int N, int M,
                                     double lambda)
    : grid_(gamma.gamma.grid),
      gamma_(gamma.gamma),
      x0_(x0),
      xi0p_(xi0p),
      N_(N),
      M_(M),
      lambda_(lambda) {
    if (M < 2)
        throw std::invalid_argument(
            "CalderonQuasimode: M < 2 cannot match even the first transport equation");
    if (N < 1) throw std::invalid_argument("CalderonQuasimode: N must be >= 1");
    if (M < N) throw std::invalid_argument("CalderonQuasimode: need M >= N");
    if (lambda < 1.0) throw std::invalid_argument("CalderonQuasimode: lambda must be >= 1");
    if (std::abs(xi0p) != 1.0)
        throw std::invalid_argument("CalderonQuasimode: xi0' must be a unit tangent (+-1)");
    if (std::abs(x0) >= grid_.width)
        throw std::invalid_argument("CalderonQuasimode: x0 must lie on the flat edge");

    const int nx = grid_.nx;
    const double h = grid_.h();

    chi_edge_.resize(nx);
    for (int i = 0; i < nx; ++i) {
        chi_edge_[i] = chi(grid_.xp(i));
        if (std::abs(grid_.xp(i) - x0) >= eps() && chi_edge_[i] != 0.0)
            throw std::invalid_argument("CalderonQuasimode: chi must be supported in |x'-x0| < eps");
    }

    // normal-derivative traces of gamma and of eta = xi0' d_x' gamma + i d_n gamma
    std::vector<std::vector<double>> gam(M + 1);
    for (int r = 0; r <= M; ++r) gam[r] = gamma_normal_trace(gamma, r);
    std::vector<std::vector<complexd>> eta(M);
    for (int r = 0; r < M; ++r) {
        const auto dgam = d_dx(gam[r], h);
        eta[r].resize(nx);
        for (int i = 0; i < nx; ++i) eta[r][i] = xi0p_ * dgam[i] + complexd(0.0, 1.0) * gam[r + 1][i];
    }

    // Taylor traces by the edge recursion: level j solves L b_{-j} = G_j with
    // G_0 = 0 and G_j = i P b_{-(j-1)}, matched to K_j = M - j derivatives.
    traces_.resize(N + 1);
    const complexd I{0.0, 1.0};
    for (int j = 0; j <= N; ++j) {
        const int K = M - j;
        auto& T = traces_[j];
        T.assign(K + 1, std::vector<complexd>(nx, complexd{}));
        if (j == 0)
            for (int i = 0; i < nx; ++i) T[0][i] = chi_edge_[i];
        // else b_{-j}(x', 0) = 0

        // edge derivatives of G_j = i * div(gamma grad b_{-(j-1)})
        std::vector<std::vector<complexd>> G(K, std::vector<complexd>(nx, complexd{}));
        if (j > 0) {
            const auto& Tp = traces_[j - 1];
            for (int m = 0; m < K; ++m) {
                for (int r = 0; r <= m; ++r) {
                    const double c = binom(m, r);
                    const auto dTp = d_dx(Tp[m - r], h);
                    const auto ddTp = d_dxx(Tp[m - r], h);
                    const auto dgam = d_dx(gam[r], h);
                    for (int i = 0; i < nx; ++i) {
                        G[m][i] += c * (gam[r][i] * (ddTp[i] + Tp[m - r + 2][i]) +
                                        dgam[i] * dTp[i] + gam[r + 1][i] * Tp[m - r + 1][i]);
                    }
                }
                for (int i = 0; i < nx; ++i) G[m][i] *= I;
            }
        }

        for (int m = 0; m < K; ++m) {
            std::vector<complexd> acc(nx, complexd{});
            for (int r = 0; r <= m; ++r) {
                const double c = binom(m, r);
                const auto dT = d_dx(T[m - r], h);
                for (int i = 0; i < nx; ++i)
                    acc[i] += c * (2.0 * xi0p_ * gam[r][i] * dT[i] + eta[r][i] * T[m - r][i]);
                if (r >= 1)
                    for (int i = 0; i < nx; ++i)
                        acc[i] += c * 2.0 * I * gam[r][i] * T[m - r + 1][i];
            }
            for (int i = 0; i < nx; ++i)
                T[m + 1][i] = (G[m][i] - acc[i]) / (2.0 * I * gam[0][i]);
        }
    }

    // extend into the interior: truncated Taylor polynomial in x_n under a
    // fixed cutoff at eps
    levels_.assign(N + 1, HalfField(grid_));
    total_ = HalfField(grid_);
    for (int j = 0; j <= N; ++j) {
        const int K = M - j;
        for (int jn = 0; jn < grid_.ny; ++jn) {
            const double xn = grid_.xn(jn);
            const double theta = smooth_bump(xn / eps());
            if (theta == 0.0) continue;
            for (int i = 0; i < nx; ++i) {
                complexd sum{};
                double pw = 1.0, fact = 1.0;
                for (int k = 0; k <= K; ++k) {
                    if (k > 0) {
                        pw *= xn;
                        fact *= k;
                    }
                    sum += traces_[j][k][i] * pw / fact;
                }
                levels_[j].at(i, jn) = theta * sum;
            }
        }
        const double scale = std::pow(lambda_, -static_cast<double>(j));
        for (std::size_t idx = 0; idx < total_.values.size(); ++idx)
            total_.values[idx] += scale * levels_[j].values[idx];
    }
}

CalderonQuasimode build_calderon_quasimode(const Conductivity& gamma, double x0, double xi0p,
                                           const std::function<double(double)>& chi, int N, int M,
                                           double lambda) {
    return CalderonQuasimode(gamma, x0, xi0p, chi, N, M, lambda);
}

HalfField CalderonQuasimode::field_v() const {
    HalfField v(grid_);
    const double amp = 1.0 / std::sqrt(lambda_);
    for (int j = 0; j < grid_.ny; ++j)
        for (int i = 0; i < grid_.nx; ++i)
            v.at(i, j) = amp * phase_factor(i, j) * total_.at(i, j);
    return v;
}

namespace {

/// Tangential and normal difference fields of a half-grid amplitude; one-sided
/// at the flat edge, centered elsewhere. The amplitude vanishes near the
/// lateral and top edges, where the one-sided fallback is harmless.
struct AmplitudeDerivs {
    HalfField dxp, dxn, dxx, dnn;
};

AmplitudeDerivs amplitude_derivs(const HalfField& b) {
    const HalfGrid& g = b.grid;
    const double h = g.h();
    AmplitudeDerivs d{HalfField(g), HalfField(g), HalfField(g), HalfField(g)};
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const auto at = [&](int ii, int jj) { return b.at(ii, jj); };
            if (i >= 1 && i <= g.nx - 2) {
                d.dxp.at(i, j) = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
                d.dxx.at(i, j) = (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (h * h);
            } else {
                const int s = (i == 0) ? 1 : -1;
                d.dxp.at(i, j) = static_cast<double>(s) *
                    (-3.0 * at(i, j) + 4.0 * at(i + s, j) - at(i + 2 * s, j)) / (2.0 * h);
                d.dxx.at(i, j) = (2.0 * at(i, j) - 5.0 * at(i + s, j) + 4.0 * at(i + 2 * s, j) -
                                  at(i + 3 * s, j)) /
                                 (h * h);
            }
            if (j >= 1 && j <= g.ny - 2) {
                d.dxn.at(i, j) = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
                d.dnn.at(i, j) = (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (h * h);
            } else {
                const int s = (j == 0) ? 1 : -1;
                d.dxn.at(i, j) = static_cast<double>(s) *
                    (-3.0 * at(i, j) + 4.0 * at(i, j + s) - at(i, j + 2 * s)) / (2.0 * h);
                d.dnn.at(i, j) = (2.0 * at(i, j) - 5.0 * at(i, j + s) + 4.0 * at(i, j + 2 * s) -
                                  at(i, j + 3 * s)) /
                                 (h * h);
            }
        }
    }
    return d;
}

}  // namespace

double quasimode_defect(const CalderonQuasimode& qm, const Conductivity& gamma) {
    const HalfGrid& g = qm.grid();
    if (!(gamma.gamma.grid == g)) throw std::invalid_argument("quasimode_defect: grid mismatch");
    const double h = g.h();
    const double lambda = qm.lambda();
    const complexd I{0.0, 1.0};

    const HalfField& b = qm.amplitude();
    const auto db = amplitude_derivs(b);

    // gamma difference fields (real)
    RealHalfField dgx(g), dgn(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto at = [&](int ii, int jj) { return gamma.gamma.at(ii, jj); };
            if (i >= 1 && i <= g.nx - 2)
                dgx.at(i, j) = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
            else {
                const int s = (i == 0) ? 1 : -1;
                dgx.at(i, j) =
                    s * (-3.0 * at(i, j) + 4.0 * at(i + s, j) - at(i + 2 * s, j)) / (2.0 * h);
            }
            if (j >= 1 && j <= g.ny - 2)
                dgn.at(i, j) = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
            else {
                const int s = (j == 0) ? 1 : -1;
                dgn.at(i, j) =
                    s * (-3.0 * at(i, j) + 4.0 * at(i, j + s) - at(i, j + 2 * s)) / (2.0 * h);
            }
        }

    double sum = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        const double wn = trapezoid_weight(j, g.ny, h);
        const double decay = std::exp(-2.0 * lambda * g.xn(j));
        for (int i = 0; i < g.nx; ++i) {
            const double gm = gamma.gamma.at(i, j);
            const complexd Lb = 2.0 * gm * (qm.xi0p() * db.dxp.at(i, j) + I * db.dxn.at(i, j)) +
                                (qm.xi0p() * dgx.at(i, j) + I * dgn.at(i, j)) * b.at(i, j);
            const complexd Pb = gm * (db.dxx.at(i, j) + db.dnn.at(i, j)) +
                                dgx.at(i, j) * db.dxp.at(i, j) + dgn.at(i, j) * db.dxn.at(i, j);
            const complexd bracket = I * lambda * Lb + Pb;
            sum += wn * trapezoid_weight(i, g.nx, h) * decay * std::norm(bracket) / lambda;
        }
    }
    return std::sqrt(sum);
}

double ck_constant(int k) {
    if (k < 0) throw std::invalid_argument("ck_constant: k must be >= 0");
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return fact / std::pow(2.0, k);
}

complexd boundary_limit_integral(const CalderonQuasimode& qm, const CalderonQuasimode& qm2,
                                 const RealHalfField& f, int k) {
    if (qm.lambda() != qm2.lambda())
        throw std::invalid_argument("boundary_limit_integral: lambda mismatch");
    if (qm.x0() != qm2.x0() || qm.xi0p() != qm2.xi0p())
        throw std::invalid_argument("boundary_limit_integral: quasimodes must share (x0, xi0')");
    const HalfGrid& g = qm.grid();
    if (!(f.grid == g) || !(qm2.grid() == g))
        throw std::invalid_argument("boundary_limit_integral: grid mismatch");
    const double h = g.h();
    const double lambda = qm.lambda();
    const complexd I{0.0, 1.0};

    const auto d1 = amplitude_derivs(qm.amplitude());
    const auto d2 = amplitude_derivs(qm2.amplitude());
    const auto& b1 = qm.amplitude();
    const auto& b2 = qm2.amplitude();

    complexd acc{};
    for (int j = 0; j < g.ny; ++j) {
        const double wn = trapezoid_weight(j, g.ny, h);
        const double xn = g.xn(j);
        const double decay = std::exp(-2.0 * lambda * xn);
        const double xnk = std::pow(xn, k);
        for (int i = 0; i < g.nx; ++i) {
            const complexd gx1 = I * lambda * qm.xi0p() * b1.at(i, j) + d1.dxp.at(i, j);
            const complexd gn1 = -lambda * b1.at(i, j) + d1.dxn.at(i, j);
            const complexd gx2 = I * lambda * qm2.xi0p() * b2.at(i, j) + d2.dxp.at(i, j);
            const complexd gn2 = -lambda * b2.at(i, j) + d2.dxn.at(i, j);
            const complexd dot = gx1 * std::conj(gx2) + gn1 * std::conj(gn2);
            acc += wn * trapezoid_weight(i, g.nx, h) * f.at(i, j) * xnk * decay * dot / lambda;
        }
    }
    return std::pow(lambda, k) * acc;
}

namespace {

struct EllipticOperator {
    const HalfGrid& g;
    const RealHalfField& gamma;
    int mx, my;  // interior extents

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j - 1) * mx + (i - 1); }

    double face(int i0, int j0, int i1, int j1) const {
        return 0.5 * (gamma.at(i0, j0) + gamma.at(i1, j1));
    }

    // y = A x on interior unknowns (Dirichlet rows eliminated)
    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const double h2 = g.h() * g.h();
        parallel_for(static_cast<std::size_t>(my), [&](std::size_t row) {
            const int j = static_cast<int>(row) + 1;
            for (int i = 1; i <= mx; ++i) {
                const double ce = face(i, j, i + 1, j);
                const double cw = face(i, j, i - 1, j);
                const double cn = face(i, j, i, j + 1);
                const double cs = face(i, j, i, j - 1);
                double v = (ce + cw + cn + cs) * x[idx(i, j)];
                if (i + 1 <= mx) v -= ce * x[idx(i + 1, j)];
                if (i - 1 >= 1) v -= cw * x[idx(i - 1, j)];
                if (j + 1 <= my) v -= cn * x[idx(i, j + 1)];
                if (j - 1 >= 1) v -= cs * x[idx(i, j - 1)];
                y[idx(i, j)] = v / h2;
            }
        });
    }
};

std::vector<double> cg_solve(const EllipticOperator& op, const std::vector<double>& rhs,
                             long budget) {
    const std::size_t n = rhs.size();
    std::vector<double> x(n, 0.0), r = rhs, p = rhs, ap(n);
    double rr = 0.0, bb = 0.0;
    for (double v : rhs) bb += v * v;
    if (bb == 0.0) return x;
    rr = bb;
    const double tol2 = 1e-20 * bb;  // relative residual 1e-10
    for (long it = 0; it < budget; ++it) {
        op.apply(p, ap);
        double pap = 0.0;
        for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rr_new = 0.0;
        for (std::size_t i = 0; i < n; ++i) rr_new += r[i] * r[i];
        if (rr_new <= tol2) return x;
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    throw std::runtime_error("solve_conductivity: conjugate gradients exceeded iteration budget");
}

}  // namespace

EllipticSolveStats elliptic_solve_stats() {
    return {g_solves.load(), g_max_principle_violations.load()};
}

void reset_elliptic_solve_stats() {
    g_solves = 0;
    g_max_principle_violations = 0;
}

HalfField solve_conductivity(const Conductivity& gamma, const HalfField& data) {
    const HalfGrid& g = gamma.gamma.grid;
    if (!(data.grid == g)) throw std::invalid_argument("solve_conductivity: grid mismatch");
    const int mx = g.nx - 2, my = g.ny - 2;
    if (mx < 1 || my < 1) throw std::invalid_argument("solve_conductivity: grid too small");
    const EllipticOperator op{g, gamma.gamma, mx, my};
    const double h2 = g.h() * g.h();
    const long budget = static_cast<long>(g.size());

    HalfField u(g);
    // boundary ring copies the data
    for (int i = 0; i < g.nx; ++i) {
        u.at(i, 0) = data.at(i, 0);
        u.at(i, g.ny - 1) = data.at(i, g.ny - 1);
    }
    for (int j = 0; j < g.ny; ++j) {
        u.at(0, j) = data.at(0, j);
        u.at(g.nx - 1, j) = data.at(g.nx - 1, j);
    }

    for (int part = 0; part < 2; ++part) {
        std::vector<double> rhs(static_cast<std::size_t>(mx) * my, 0.0);
        const auto bval = [&](int i, int j) {
            return part == 0 ? data.at(i, j).real() : data.at(i, j).imag();
        };
        for (int j = 1; j <= my; ++j) {
            for (int i = 1; i <= mx; ++i) {
                double v = 0.0;
                if (i == 1) v += op.face(i, j, i - 1, j) * bval(i - 1, j);
                if (i == mx) v += op.face(i, j, i + 1, j) * bval(i + 1, j);
                if (j == 1) v += op.face(i, j, i, j - 1) * bval(i, j - 1);
                if (j == my) v += op.face(i, j, i, j + 1) * bval(i, j + 1);
                rhs[op.idx(i, j)] = v / h2;
            }
        }
        const auto x = cg_solve(op, rhs, budget);
        for (int j = 1; j <= my; ++j)
            for (int i = 1; i <= mx; ++i) {
                if (part == 0)
                    u.at(i, j) += x[op.idx(i, j)];
                else
                    u.at(i, j) += complexd(0.0, 1.0) * x[op.idx(i, j)];
            }
    }

    // discrete maximum principle, separately for real and imaginary parts
    g_solves.fetch_add(1);
    for (int part = 0; part < 2; ++part) {
        double bmin = std::numeric_limits<double>::infinity(), bmax = -bmin;
        const auto pv = [&](complexd v) { return part == 0 ? v.real() : v.imag(); };
        for (int i = 0; i < g.nx; ++i) {
            bmin = std::min({bmin, pv(data.at(i, 0)), pv(data.at(i, g.ny - 1))});
            bmax = std::max({bmax, pv(data.at(i, 0)), pv(data.at(i, g.ny - 1))});
        }
        for (int j = 0; j < g.ny; ++j) {
            bmin = std::min({bmin, pv(data.at(0, j)), pv(data.at(g.nx - 1, j))});
            bmax = std::max({bmax, pv(data.at(0, j)), pv(data.at(g.nx - 1, j))});
        }
        const double tol = 1e-6 * std::max({std::abs(bmin), std::abs(bmax), 1e-30});
        for (int j = 1; j <= my; ++j)
            for (int i = 1; i <= mx; ++i) {
                const double v = pv(u.at(i, j));
                if (v < bmin - tol || v > bmax + tol) {
                    g_max_principle_violations.fetch_add(1);
                    std::ostringstream oss;
                    oss << "solve_conductivity: discrete maximum principle violated at (" << i
                        << ", " << j << "): " << v << " outside [" << bmin << ", " << bmax << "]";
                    throw std::runtime_error(oss.str());
                }
            }
    }
    return u;
}

std::pair<HalfField, HalfField> gradient(const HalfField& u) {
    const HalfGrid& g = u.grid;
    const double h = g.h();
    HalfField gx(g), gn(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (i >= 1 && i <= g.nx - 2)
                gx.at(i, j) = (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * h);
            else {
                const int s = (i == 0) ? 1 : -1;
                gx.at(i, j) = static_cast<double>(s) *
                              (-3.0 * u.at(i, j) + 4.0 * u.at(i + s, j) - u.at(i + 2 * s, j)) /
                              (2.0 * h);
            }
            if (j >= 1 && j <= g.ny - 2)
                gn.at(i, j) = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * h);
            else {
                const int s = (j == 0) ? 1 : -1;
                gn.at(i, j) = static_cast<double>(s) *
                              (-3.0 * u.at(i, j) + 4.0 * u.at(i, j + s) - u.at(i, j + 2 * s)) /
                              (2.0 * h);
            }
        }
    return {std::move(gx), std::move(gn)};
}

complexd dn_pairing_elliptic(const Conductivity& gamma, const HalfField& f, const HalfField& g) {
    const HalfGrid& grid = gamma.gamma.grid;
    const HalfField uf = solve_conductivity(gamma, f);
    const HalfField ug = solve_conductivity(gamma, g);
    const auto [fx, fn] = gradient(uf);
    const auto [gx, gn] = gradient(ug);
    const double h = grid.h();
    complexd acc{};
    for (int j = 0; j < grid.ny; ++j) {
        const double wn = trapezoid_weight(j, grid.ny, h);
        for (int i = 0; i < grid.nx; ++i) {
            acc += wn * trapezoid_weight(i, grid.nx, h) * gamma.gamma.at(i, j) *
                   (fx.at(i, j) * std::conj(gx.at(i, j)) + fn.at(i, j) * std::conj(gn.at(i, j)));
        }
    }
    return acc;
}

std::vector<BoundaryDeterminationRow> boundary_determination_experiment(
    const Conductivity& gamma1, const Conductivity& gamma2, double x0,
    const std::vector<double>& lambdas, int k, int N, int M,
    const std::function<double(double)>& chi) {
    const HalfGrid& g = gamma1.gamma.grid;
    if (!(gamma2.gamma.grid == g))
        throw std::invalid_argument("boundary_determination_experiment: grid mismatch");
    if (k != 0 && k != 1)
        throw std::invalid_argument("boundary_determination_experiment: order k must be 0 or 1");
    if (k == 1) {
        double scale = 0.0, diff = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            scale = std::max(scale, std::abs(gamma1.gamma.at(i, 0)));
            diff = std::max(diff, std::abs(gamma1.gamma.at(i, 0) - gamma2.gamma.at(i, 0)));
        }
        if (diff > 1e-9 * scale)
            throw std::invalid_argument(
                "boundary_determination_experiment: order 1 requires gamma1 = gamma2 on the edge");
    }

    // boundary quadrature oracle on the flat edge
    std::vector<double> diff_k(g.nx);
    if (k == 0) {
        for (int i = 0; i < g.nx; ++i) diff_k[i] = gamma1.gamma.at(i, 0) - gamma2.gamma.at(i, 0);
    } else {
        const auto d1 = gamma_normal_trace(gamma1, 1);
        const auto d2 = gamma_normal_trace(gamma2, 1);
        for (int i = 0; i < g.nx; ++i) diff_k[i] = d1[i] - d2[i];
    }
    double oracle = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double c = chi(g.xp(i));
        oracle += trapezoid_weight(i, g.nx, g.h()) * diff_k[i] * c * c;
    }
    oracle *= ck_constant(k);

    const double h = g.h();
    std::vector<BoundaryDeterminationRow> rows;
    for (double lambda : lambdas) {
        const CalderonQuasimode qm1(gamma1, x0, 1.0, chi, N, M, lambda);
        const CalderonQuasimode qm2(gamma2, x0, 1.0, chi, N, M, lambda);
        const HalfField u1 = solve_conductivity(gamma1, qm1.field_v());
        const HalfField u2 = solve_conductivity(gamma2, qm2.field_v());
        const auto [g1x, g1n] = gradient(u1);
        const auto [g2x, g2n] = gradient(u2);
        complexd vol{};
        for (int j = 0; j < g.ny; ++j) {
            const double wn = trapezoid_weight(j, g.ny, h);
            for (int i = 0; i < g.nx; ++i) {
                const double dg = gamma1.gamma.at(i, j) - gamma2.gamma.at(i, j);
                if (dg == 0.0) continue;
                vol += wn * trapezoid_weight(i, g.nx, h) * dg *
                       (g1x.at(i, j) * std::conj(g2x.at(i, j)) +
                        g1n.at(i, j) * std::conj(g2n.at(i, j)));
            }
        }
        const double scaled = std::pow(lambda, k) * vol.real();
        const double rel =
            oracle != 0.0 ? std::abs(scaled - oracle) / std::abs(oracle) : std::abs(scaled);
        rows.push_back({lambda, k, scaled, oracle, rel});
    }
    return rows;
}

std::vector<HalfspaceSymbolRow> halfspace_dn_symbol_check(const std::vector<double>& frequencies,
                                                          int nodes_per_unit, double height) {
    const HalfGrid g(1.0, height, nodes_per_unit);
    const Conductivity one = Conductivity::constant(g, 1.0);
    std::vector<HalfspaceSymbolRow> rows;
    for (double xi : frequencies) {
        if (!(xi > 0.0))
            throw std::invalid_argument("halfspace_dn_symbol_check: frequencies must be positive");
        const double sh = std::sinh(xi * height);
        const auto exact = [&](double xp, double xn) {
            return complexd(std::cos(xi * xp) * std::sinh(xi * (height - xn)) / sh, 0.0);
        };
        const HalfField data = make_half_field(g, exact);
        const HalfField u = solve_conductivity(one, data);
        // -d_n u on the flat edge by the one-sided second-order stencil
        const double h = g.h();
        double num = 0.0, den = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double flux =
                -((-3.0 * u.at(i, 0) + 4.0 * u.at(i, 1) - u.at(i, 2)) / (2.0 * h)).real();
            const double f = std::cos(xi * g.xp(i));
            const double w = trapezoid_weight(i, g.nx, h);
            num += w * flux * f;
            den += w * xi * f * f;
        }
        const double ratio = num / den;
        const double oracle = 1.0 / std::tanh(xi * height);
        rows.push_back({xi, ratio, oracle, std::abs(ratio - oracle) / oracle});
    }
    return rows;
}

std::function<double(double)> edge_bump(double x0, double half_width) {
    return [x0, half_width](double x) {
        const double u = (x - x0) / half_width;
        const double u2 = u * u;
        if (u2 >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - u2));
    };
}

}  // namespace microct
