#include "microct/wavelab.hpp"

#include <sstream>

namespace microct {

namespace {

constexpr double kZetaNorm = 1.6925687506432687;  // 3/sqrt(pi), unit L2 norm
// The (x_n, t) -> (z, w) half-sum coordinates carry Jacobian 2; this factor
// makes the quasimode's space-time mass per unit segment length equal one.
constexpr double kConcentrationNorm = 0.7071067811865476;  // 1/sqrt(2)

}  // namespace

Segment Segment::through(Vec2 origin, Vec2 direction, double half_width) {
    const Vec2 d = direction.normalized();
    if (std::max(std::abs(origin.x), std::abs(origin.y)) <= half_width)
        throw std::invalid_argument("Segment: origin must lie outside the closed square");
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    const double o[2] = {origin.x, origin.y};
    const double dd[2] = {d.x, d.y};
    for (int axis = 0; axis < 2; ++axis) {
        if (std::abs(dd[axis]) < 1e-15) {
            if (std::abs(o[axis]) > half_width)
                throw std::invalid_argument("Segment: ray misses the square");
            continue;
        }
        const double t1 = (-half_width - o[axis]) / dd[axis];
        const double t2 = (half_width - o[axis]) / dd[axis];
        tmin = std::max(tmin, std::min(t1, t2));
        tmax = std::min(tmax, std::max(t1, t2));
    }
    if (!(tmax > tmin) || tmax <= 0.0)
        throw std::invalid_argument("Segment: ray misses the square");
    if (tmin <= 0.0)
        throw std::invalid_argument("Segment: origin must precede the entry point");
    Segment seg;
    seg.origin = origin;
    seg.direction = d;
    seg.delta = tmin;
    seg.L = tmax;
    return seg;
}

Potential::Potential(Image q_) : q(std::move(q_)) {
    const int n = q.grid.n;
    double vmax = 0.0;
    for (double v : q.values) vmax = std::max(vmax, std::abs(v));
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            if (ix >= 2 && ix <= n - 3 && iy >= 2 && iy <= n - 3) continue;
            if (std::abs(q.at(ix, iy)) > 1e-12 * std::max(vmax, 1.0))
                throw std::invalid_argument(
                    "Potential: support must keep a two-cell margin from the boundary");
        }
    }
}

Potential Potential::zero(const Grid2& grid) { return Potential(Image(grid)); }

WaveQuasimode::WaveQuasimode(const Segment& seg, const Potential& q, const SpaceTimeGrid& st,
                             double lambda, double amplitude)
    : seg_(seg), st_(st), lambda_(lambda), amplitude_(amplitude), q_(q.q) {
    if (lambda < 1.0) throw std::invalid_argument("WaveQuasimode: lambda must be >= 1");
    if (!(st.T > seg.L)) throw std::invalid_argument("WaveQuasimode: need T > L");
    if (!(q.q.grid == st.spatial))
        throw std::invalid_argument("WaveQuasimode: potential grid must match the space-time grid");
    const double hw = st.spatial.extent;
    const auto on_boundary = [&](Vec2 p) {
        return std::abs(std::max(std::abs(p.x), std::abs(p.y)) - hw) < 1e-7;
    };
    const Vec2 mid = seg.point(0.5 * (seg.delta + seg.L));
    if (!on_boundary(seg.point(seg.delta)) || !on_boundary(seg.point(seg.L)) ||
        std::max(std::abs(mid.x), std::abs(mid.y)) >= hw)
        throw std::invalid_argument("WaveQuasimode: segment is not a maximal chord of the square");

    eps_ = std::pow(lambda, -0.1);  // lambda^{-1/(n+8)} at n = 2

    const Grid2& grid = st.spatial;
    const double h = grid.spacing();
    const double dt = st.dt();
    const double halo = eps_ + 2.0 * h + 2.0 * dt;
    const double dstep = 0.5 * h;

    node_xp_.resize(grid.size());
    node_xn_.resize(grid.size());
    tab_index_.assign(grid.size(), -1);
    tab_lo_ = -(halo + 2.0 * dstep);
    tab_step_ = dstep;
    const int tab_len = static_cast<int>(std::ceil((2.0 * (halo + 2.0 * dstep)) / dstep)) + 2;

    std::vector<std::size_t> tube_nodes;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const int iy = static_cast<int>(i) / grid.n;
        const int ix = static_cast<int>(i) % grid.n;
        const Vec2 fr = seg_.to_frame(grid.node(ix, iy));
        node_xp_[i] = static_cast<float>(fr.x);
        node_xn_[i] = static_cast<float>(fr.y);
        if (std::abs(fr.x) < halo) {
            tab_index_[i] = static_cast<int>(tube_nodes.size());
            tube_nodes.push_back(i);
        }
    }
    q_full_.assign(tube_nodes.size(), 0.0);
    q_tab_.assign(tube_nodes.size(), {});
    parallel_for(tube_nodes.size(), [&](std::size_t t) {
        const std::size_t i = tube_nodes[t];
        const double xp = node_xp_[i];
        q_full_[t] = q_line_integral(xp, 0.0, node_xn_[i]);
        auto& tab = q_tab_[t];
        tab.resize(tab_len);
        // cumulative trapezoid of q along the line, sigma near the frame origin
        tab[0] = q_line_integral(xp, 0.0, tab_lo_);
        double prev = q_.interp(seg_.from_frame(xp, tab_lo_));
        for (int j = 1; j < tab_len; ++j) {
            const double sig = tab_lo_ + j * tab_step_;
            const double cur = q_.interp(seg_.from_frame(xp, sig));
            tab[j] = tab[j - 1] + 0.5 * (prev + cur) * tab_step_;
            prev = cur;
        }
    });
}

double WaveQuasimode::zeta(Vec2 y) {
    const double r2 = y.dot(y);
    if (r2 >= 1.0) return 0.0;
    const double u = 1.0 - r2;
    const double u2 = u * u;
    return kZetaNorm * u2 * u2;
}

double WaveQuasimode::chi(Vec2 y) const { return zeta({y.x / eps_, y.y / eps_}) / eps_; }

double WaveQuasimode::a0(Vec2 x, double t) const {
    const Vec2 fr = seg_.to_frame(x);
    return amplitude_ * kConcentrationNorm * chi({fr.x, 0.5 * (t - fr.y)});
}

double WaveQuasimode::fd_box_a0(double xp, double w) const {
    const double h = st_.spatial.spacing();
    const double dt = st_.dt();
    const auto a = [&](double p, double ww) { return amplitude_ * kConcentrationNorm * chi({p, ww}); };
    const double center = a(xp, w);
    // d_tt: t +- dt shifts w by +- dt/2
    const double dtt = (a(xp, w + 0.5 * dt) - 2.0 * center + a(xp, w - 0.5 * dt)) / (dt * dt);
    // d_xx and d_yy: world shifts move (x', x_n) linearly, and w by -dxn/2
    double lap = 0.0;
    const Vec2 dir = seg_.direction, per = dir.perp();
    const double px[2] = {per.x, per.y};
    const double dx[2] = {dir.x, dir.y};
    for (int axis = 0; axis < 2; ++axis) {
        const double plus = a(xp + h * px[axis], w - 0.5 * h * dx[axis]);
        const double minus = a(xp - h * px[axis], w + 0.5 * h * dx[axis]);
        lap += (plus - 2.0 * center + minus) / (h * h);
    }
    return dtt - lap;
}

double WaveQuasimode::q_line_integral(double xp, double from, double to) const {
    const double sign = (to >= from) ? 1.0 : -1.0;
    const double len = std::abs(to - from);
    if (len == 0.0) return 0.0;
    const int m = std::max(2, static_cast<int>(std::ceil(len / (0.5 * st_.spatial.spacing()))));
    const double ds = len / m;
    double sum = 0.0;
    for (int j = 0; j <= m; ++j) {
        const double w = (j == 0 || j == m) ? 0.5 : 1.0;
        sum += w * q_.interp(seg_.from_frame(xp, from + sign * j * ds));
    }
    return sign * sum * ds;
}

complexd WaveQuasimode::am1(Vec2 x, double t) const {
    const Vec2 fr = seg_.to_frame(x);
    const double xp = fr.x, xn = fr.y;
    const double w = 0.5 * (t - xn);
    const double z = 0.5 * (t + xn);
    const double h = st_.spatial.spacing();
    const double halo = eps_ + 2.0 * h + 2.0 * st_.dt();
    if (std::abs(xp) >= halo || std::abs(w) >= halo) return {};
    const double B = fd_box_a0(xp, w);
    const double a0val = amplitude_ * kConcentrationNorm * chi({xp, w});
    const double qint =
        a0val != 0.0 ? q_line_integral(xp, -w, xn) : 0.0;  // int of q over s in (0,z)
    return complexd(0.0, 0.5) * (z * B + a0val * qint);
}

complexd WaveQuasimode::am1_at_node(int ix, int iy, double t) const {
    const std::size_t i = st_.spatial.index(ix, iy);
    const int ti = tab_index_[i];
    if (ti < 0) return {};
    const double xp = node_xp_[i], xn = node_xn_[i];
    const double w = 0.5 * (t - xn);
    const double z = 0.5 * (t + xn);
    const double halo = eps_ + 2.0 * st_.spatial.spacing() + 2.0 * st_.dt();
    if (std::abs(w) >= halo) return {};
    const double B = fd_box_a0(xp, w);
    const double a0val = amplitude_ * kConcentrationNorm * chi({xp, w});
    double qint = 0.0;
    if (a0val != 0.0) {
        // Q(x', x_n) - Q(x', -w) from the per-node tables
        const double f = (-w - tab_lo_) / tab_step_;
        const int j = std::clamp(static_cast<int>(f), 0,
                                 static_cast<int>(q_tab_[ti].size()) - 2);
        const double u = f - j;
        const double q_at_minus_w = q_tab_[ti][j] * (1.0 - u) + q_tab_[ti][j + 1] * u;
        qint = q_full_[ti] - q_at_minus_w;
    }
    return complexd(0.0, 0.5) * (z * B + a0val * qint);
}

complexd WaveQuasimode::box_plus_q_a0(Vec2 x, double t) const {
    const Vec2 fr = seg_.to_frame(x);
    const double w = 0.5 * (t - fr.y);
    return fd_box_a0(fr.x, w) + q_.interp(x) * a0(x, t);
}

complexd WaveQuasimode::value(Vec2 x, double t) const {
    const complexd I{0.0, 1.0};
    return std::exp(I * lambda_ * phase(x, t)) * (a0(x, t) + am1(x, t) / lambda_);
}

complexd WaveQuasimode::value_at_node(int ix, int iy, double t) const {
    const Vec2 x = st_.spatial.node(ix, iy);
    const complexd I{0.0, 1.0};
    return std::exp(I * lambda_ * phase(x, t)) * (a0(x, t) + am1_at_node(ix, iy, t) / lambda_);
}

WaveQuasimode build_wave_quasimode(const Segment& seg, const Potential& q,
                                   const SpaceTimeGrid& st, double lambda) {
    return WaveQuasimode(seg, q, st, lambda);
}

double quasimode_residual(const WaveQuasimode& qm, const Potential& q) {
    const SpaceTimeGrid& st = qm.st();
    const Grid2& grid = st.spatial;
    const int n = grid.n;
    const double h = grid.spacing();
    const double dt = st.dt();

    std::vector<std::vector<complexd>> slices(3, std::vector<complexd>(grid.size()));
    const auto fill_slice = [&](int k, std::vector<complexd>& s) {
        parallel_for(grid.size(), [&](std::size_t i) {
            const int iy = static_cast<int>(i) / n;
            const int ix = static_cast<int>(i) % n;
            s[i] = qm.am1_at_node(ix, iy, st.time(k));
        });
    };
    fill_slice(0, slices[0]);
    fill_slice(1, slices[1]);

    double sup = 0.0;
    for (int k = 1; k <= st.nt - 2; ++k) {
        fill_slice(k + 1, slices[(k + 1) % 3]);
        const auto& sm = slices[(k - 1) % 3];
        const auto& s0 = slices[k % 3];
        const auto& sp = slices[(k + 1) % 3];
        for (int iy = 1; iy < n - 1; ++iy) {
            for (int ix = 1; ix < n - 1; ++ix) {
                const std::size_t i = grid.index(ix, iy);
                const complexd lap =
                    (s0[i - 1] - 2.0 * s0[i] + s0[i + 1] + s0[i - n] - 2.0 * s0[i] + s0[i + n]) /
                    (h * h);
                const complexd dtt = (sm[i] - 2.0 * s0[i] + sp[i]) / (dt * dt);
                const complexd r = dtt - lap + q.q.values[i] * s0[i];
                sup = std::max(sup, std::abs(r));
            }
        }
    }
    return sup / qm.lambda();
}

double concentration_integral(const WaveQuasimode& qm,
                              const std::function<double(Vec2, double)>& psi) {
    const SpaceTimeGrid& st = qm.st();
    const Grid2& grid = st.spatial;
    const double h = grid.spacing();
    const double dt = st.dt();
    std::vector<double> per_step(st.nt, 0.0);
    parallel_for(st.nt, [&](std::size_t k) {
        const double t = st.time(static_cast<int>(k));
        double sum = 0.0;
        for (int iy = 0; iy < grid.n; ++iy) {
            const double wy = trapezoid_weight(iy, grid.n, h);
            for (int ix = 0; ix < grid.n; ++ix) {
                const Vec2 x = grid.node(ix, iy);
                const double a = qm.a0(x, t);
                if (a == 0.0) continue;
                sum += wy * trapezoid_weight(ix, grid.n, h) * psi(x, t) * a * a;
            }
        }
        per_step[k] = sum;
    });
    double total = 0.0;
    for (int k = 0; k < st.nt; ++k)
        total += per_step[k] * ((k == 0 || k == st.nt - 1) ? 0.5 * dt : dt);
    return total;
}

BoundaryTrace::BoundaryTrace(const SpaceTimeGrid& st_)
    : st(st_), nodes(boundary_nodes(st_.spatial)) {
    values.assign(static_cast<std::size_t>(st.nt) * nodes.size(), complexd{});
}

std::vector<std::pair<int, int>> BoundaryTrace::boundary_nodes(const Grid2& grid) {
    std::vector<std::pair<int, int>> nodes;
    const int n = grid.n;
    for (int ix = 0; ix < n; ++ix) nodes.emplace_back(ix, 0);
    for (int ix = 0; ix < n; ++ix) nodes.emplace_back(ix, n - 1);
    for (int iy = 1; iy < n - 1; ++iy) nodes.emplace_back(0, iy);
    for (int iy = 1; iy < n - 1; ++iy) nodes.emplace_back(n - 1, iy);
    return nodes;
}

WaveField::WaveField(const SpaceTimeGrid& st_) : st(st_) {
    u.assign(static_cast<std::size_t>(st.nt) * st.spatial.size(), complexd{});
}

namespace {

void check_trace_cutoff(const BoundaryTrace& f, TimeDirection dir) {
    double vmax = 0.0;
    for (const auto& v : f.values) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) return;
    const std::size_t nb = f.nodes.size();
    for (int k : {0, 1}) {
        const int kk = (dir == TimeDirection::Forward) ? k : f.st.nt - 1 - k;
        for (std::size_t b = 0; b < nb; ++b) {
            if (std::abs(f.at(kk, b)) > 1e-10 * vmax)
                throw std::invalid_argument(
                    "solve_wave: boundary data must vanish near the zero-Cauchy-data time");
        }
    }
}

/// Forward leapfrog march; on_slice(k, u_k) is invoked for k = 0..nt-1.
void stream_forward(const Potential& q, const BoundaryTrace& f, const ComplexImage* u_init,
                    const ComplexImage* ut_init,
                    const std::function<void(int, const std::vector<complexd>&)>& on_slice) {
    const SpaceTimeGrid& st = f.st;
    const Grid2& grid = st.spatial;
    const int n = grid.n;
    const double h = grid.spacing();
    const double dt = st.dt();
    if (dt > 0.5 * h + 1e-14) {
        std::ostringstream oss;
        oss << "solve_wave: CFL violation, dt = " << dt << " > h/2 = " << 0.5 * h;
        throw std::invalid_argument(oss.str());
    }

    std::vector<complexd> prev(grid.size()), cur(grid.size()), next(grid.size());
    const auto set_boundary = [&](std::vector<complexd>& u, int k) {
        for (std::size_t b = 0; b < f.nodes.size(); ++b) {
            const auto [ix, iy] = f.nodes[b];
            u[grid.index(ix, iy)] = f.at(k, b);
        }
    };
    const auto lap_minus_q = [&](const std::vector<complexd>& u, std::size_t i) {
        return (u[i - 1] + u[i + 1] + u[i - n] + u[i + n] - 4.0 * u[i]) / (h * h) -
               q.q.values[i] * u[i];
    };

    if (u_init) prev = u_init->values;
    set_boundary(prev, 0);
    on_slice(0, prev);

    // second-order start: u^1 = u^0 + dt v^0 + dt^2/2 (Lap - q) u^0
    for (int iy = 1; iy < n - 1; ++iy)
        for (int ix = 1; ix < n - 1; ++ix) {
            const std::size_t i = grid.index(ix, iy);
            cur[i] = prev[i] + 0.5 * dt * dt * lap_minus_q(prev, i);
            if (ut_init) cur[i] += dt * ut_init->values[i];
        }
    set_boundary(cur, 1);
    on_slice(1, cur);

    for (int k = 1; k < st.nt - 1; ++k) {
        parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t row) {
            const int iy = static_cast<int>(row) + 1;
            for (int ix = 1; ix < n - 1; ++ix) {
                const std::size_t i = grid.index(ix, iy);
                next[i] = 2.0 * cur[i] - prev[i] + dt * dt * lap_minus_q(cur, i);
            }
        });
        set_boundary(next, k + 1);
        on_slice(k + 1, next);
        std::swap(prev, cur);
        std::swap(cur, next);
    }
}

BoundaryTrace reverse_trace(const BoundaryTrace& f) {
    BoundaryTrace rev(f.st);
    const std::size_t nb = f.nodes.size();
    for (int k = 0; k < f.st.nt; ++k)
        for (std::size_t b = 0; b < nb; ++b) rev.at(k, b) = f.at(f.st.nt - 1 - k, b);
    return rev;
}

/// Contribution of one time slice to the boundary pairing sum(dnu * conj(g)).
complexd boundary_pairing_slice(const Grid2& grid, const std::vector<complexd>& u,
                                const BoundaryTrace& g, int k,
                                const std::vector<std::size_t>& node_to_trace) {
    const int n = grid.n;
    const double h = grid.spacing();
    complexd acc{};
    // per-edge trapezoid; each edge uses its own outward normal at its corners
    const auto edge_term = [&](int ix, int iy, int sx, int sy, double wb) {
        const std::size_t i0 = grid.index(ix, iy);
        const std::size_t i1 = grid.index(ix + sx, iy + sy);
        const std::size_t i2 = grid.index(ix + 2 * sx, iy + 2 * sy);
        // inward one-sided d/ds, outward normal derivative is its negative
        const complexd dnu = (3.0 * u[i0] - 4.0 * u[i1] + u[i2]) / (2.0 * h);
        acc += wb * dnu * std::conj(g.values[k * g.nodes.size() + node_to_trace[i0]]);
    };
    for (int ix = 0; ix < n; ++ix) {
        const double wb = trapezoid_weight(ix, n, h);
        edge_term(ix, 0, 0, 1, wb);
        edge_term(ix, n - 1, 0, -1, wb);
    }
    for (int iy = 0; iy < n; ++iy) {
        const double wb = trapezoid_weight(iy, n, h);
        edge_term(0, iy, 1, 0, wb);
        edge_term(n - 1, iy, -1, 0, wb);
    }
    return acc;
}

std::vector<std::size_t> trace_index_map(const Grid2& grid, const BoundaryTrace& f) {
    std::vector<std::size_t> map(grid.size(), 0);
    for (std::size_t b = 0; b < f.nodes.size(); ++b)
        map[grid.index(f.nodes[b].first, f.nodes[b].second)] = b;
    return map;
}

}  // namespace

WaveField solve_wave(const Potential& q, const BoundaryTrace& f, TimeDirection direction,
                     const ComplexImage* u_init, const ComplexImage* ut_init) {
    check_trace_cutoff(f, direction);
    if (direction == TimeDirection::Backward) {
        if (u_init || ut_init)
            throw std::invalid_argument("solve_wave: initial data requires the forward problem");
        const BoundaryTrace rev = reverse_trace(f);
        WaveField field(f.st);
        stream_forward(q, rev, nullptr, nullptr, [&](int k, const std::vector<complexd>& s) {
            std::copy(s.begin(), s.end(),
                      field.u.begin() + static_cast<std::size_t>(f.st.nt - 1 - k) *
                                            f.st.spatial.size());
        });
        return field;
    }
    WaveField field(f.st);
    stream_forward(q, f, u_init, ut_init, [&](int k, const std::vector<complexd>& s) {
        std::copy(s.begin(), s.end(),
                  field.u.begin() + static_cast<std::size_t>(k) * f.st.spatial.size());
    });
    return field;
}

DNPairing dn_pairing(const Potential& q, const BoundaryTrace& f1, const BoundaryTrace& f2) {
    check_trace_cutoff(f1, TimeDirection::Forward);
    const SpaceTimeGrid& st = f1.st;
    const auto map = trace_index_map(st.spatial, f2);
    const double dt = st.dt();
    complexd acc{};
    stream_forward(q, f1, nullptr, nullptr, [&](int k, const std::vector<complexd>& s) {
        const double wt = (k == 0 || k == st.nt - 1) ? 0.5 * dt : dt;
        acc += wt * boundary_pairing_slice(st.spatial, s, f2, k, map);
    });
    return {acc, st.spatial, dt};
}

DNPairing dn_pairing_transpose(const Potential& q, const BoundaryTrace& f1,
                               const BoundaryTrace& f2) {
    check_trace_cutoff(f2, TimeDirection::Backward);
    const SpaceTimeGrid& st = f2.st;
    const BoundaryTrace rev2 = reverse_trace(f2);
    const BoundaryTrace rev1 = reverse_trace(f1);
    const auto map = trace_index_map(st.spatial, rev1);
    const double dt = st.dt();
    complexd acc{};
    // (f1, Lambda^T f2) = conj( sum dnu(v) conj(f1) ) accumulated on reversed time
    stream_forward(q, rev2, nullptr, nullptr, [&](int k, const std::vector<complexd>& s) {
        const double wt = (k == 0 || k == st.nt - 1) ? 0.5 * dt : dt;
        acc += wt * boundary_pairing_slice(st.spatial, s, rev1, k, map);
    });
    return {std::conj(acc), st.spatial, dt};
}

complexd wave_volume_pairing(const Potential& q1, const BoundaryTrace& f1, const Potential& q2,
                             const BoundaryTrace& f2, const Image& weight) {
    const SpaceTimeGrid& st = f1.st;
    const Grid2& grid = st.spatial;
    if (!(weight.grid == grid))
        throw std::invalid_argument("wave_volume_pairing: weight grid mismatch");
    check_trace_cutoff(f1, TimeDirection::Forward);
    check_trace_cutoff(f2, TimeDirection::Backward);
    const double h = grid.spacing();
    const double dt = st.dt();

    std::vector<std::size_t> support;
    std::vector<double> wq;  // weight value times spatial quadrature weight
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix) {
            const std::size_t i = grid.index(ix, iy);
            if (weight.values[i] != 0.0) {
                support.push_back(i);
                wq.push_back(weight.values[i] * trapezoid_weight(ix, grid.n, h) *
                             trapezoid_weight(iy, grid.n, h));
            }
        }

    // backward solution stored on the weight support only
    std::vector<complexd> u2(static_cast<std::size_t>(st.nt) * support.size());
    const BoundaryTrace rev2 = reverse_trace(f2);
    stream_forward(q2, rev2, nullptr, nullptr, [&](int k, const std::vector<complexd>& s) {
        const std::size_t row = static_cast<std::size_t>(st.nt - 1 - k) * support.size();
        for (std::size_t j = 0; j < support.size(); ++j) u2[row + j] = s[support[j]];
    });

    complexd acc{};
    stream_forward(q1, f1, nullptr, nullptr, [&](int k, const std::vector<complexd>& s) {
        const double wt = (k == 0 || k == st.nt - 1) ? 0.5 * dt : dt;
        const std::size_t row = static_cast<std::size_t>(k) * support.size();
        complexd slice{};
        for (std::size_t j = 0; j < support.size(); ++j)
            slice += wq[j] * s[support[j]] * std::conj(u2[row + j]);
        acc += wt * slice;
    });
    return acc;
}

double discrete_energy(const WaveField& field, const Potential& q, int k) {
    const Grid2& grid = field.st.spatial;
    const int n = grid.n;
    const double h = grid.spacing();
    const double dt = field.st.dt();
    if (k < 0 || k + 1 >= field.st.nt) throw std::invalid_argument("discrete_energy: bad step");

    double kinetic = 0.0, potential = 0.0;
    for (int iy = 1; iy < n - 1; ++iy) {
        for (int ix = 1; ix < n - 1; ++ix) {
            const complexd du = (field.at(k + 1, ix, iy) - field.at(k, ix, iy)) / dt;
            kinetic += std::norm(du) * h * h;
            // Re <(-Lap + q) u^k, u^{k+1}>
            const complexd au =
                -(field.at(k, ix - 1, iy) + field.at(k, ix + 1, iy) + field.at(k, ix, iy - 1) +
                  field.at(k, ix, iy + 1) - 4.0 * field.at(k, ix, iy)) /
                    (h * h) +
                q.q.at(ix, iy) * field.at(k, ix, iy);
            potential += (au * std::conj(field.at(k + 1, ix, iy))).real() * h * h;
        }
    }
    return 0.5 * (kinetic + potential);
}

double segment_line_integral(const Image& weight, const Segment& seg, int nsub) {
    const double h = weight.grid.spacing();
    const double len = seg.length();
    const int m = std::max(2, static_cast<int>(std::ceil(len * nsub / h)));
    const double ds = len / m;
    double sum = 0.0;
    for (int j = 0; j <= m; ++j) {
        const double w = (j == 0 || j == m) ? 0.5 : 1.0;
        sum += w * weight.interp(seg.point(seg.delta + j * ds));
    }
    return sum * ds;
}

BoundaryTrace quasimode_boundary_trace(const WaveQuasimode& qm) {
    BoundaryTrace f(qm.st());
    const std::size_t nb = f.nodes.size();
    parallel_for(static_cast<std::size_t>(f.st.nt), [&](std::size_t k) {
        const double t = f.st.time(static_cast<int>(k));
        for (std::size_t b = 0; b < nb; ++b) {
            const auto [ix, iy] = f.nodes[b];
            f.at(static_cast<int>(k), b) = qm.value_at_node(ix, iy, t);
        }
    });
    return f;
}

std::vector<XrayRecoveryRow> xray_recovery_experiment(const Potential& q1, const Potential& q2,
                                                      const Segment& seg,
                                                      const std::vector<double>& lambdas,
                                                      const SpaceTimeGrid& st) {
    if (!(seg.length() < st.T))
        throw std::invalid_argument("xray_recovery_experiment: need segment length < T");
    Image weight(st.spatial);
    for (std::size_t i = 0; i < weight.values.size(); ++i)
        weight.values[i] = q1.q.values[i] - q2.q.values[i];
    const double line = segment_line_integral(weight, seg);

    std::vector<XrayRecoveryRow> rows;
    for (double lambda : lambdas) {
        const WaveQuasimode qm1(seg, q1, st, lambda);
        const WaveQuasimode qm2(seg, q2, st, lambda);
        const BoundaryTrace fwd = quasimode_boundary_trace(qm1);
        const BoundaryTrace bwd = quasimode_boundary_trace(qm2);
        const complexd value = wave_volume_pairing(q1, fwd, q2, bwd, weight);
        rows.push_back({lambda, value, line, std::abs(value - line)});
    }
    return rows;
}

}  // namespace microct
