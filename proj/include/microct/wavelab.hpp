#pragma once

#include <vector>

#include "microct/grid.hpp"

namespace microct {

/// Maximal line segment gamma(s) = origin + s * direction in the closed grid
/// square, entering at parameter delta and exiting at L. The origin lies
/// outside the closed square.
struct Segment {
    Vec2 origin;
    Vec2 direction;  // unit
    double delta = 0.0;
    double L = 0.0;

    /// Clips the ray origin + s*direction against [-half_width, half_width]^2.
    static Segment through(Vec2 origin, Vec2 direction, double half_width = 1.0);

    Vec2 point(double s) const { return origin + s * direction; }
    double length() const { return L - delta; }

    /// Segment frame: x_n along direction, x' along the left normal.
    /// Returns {x', x_n}.
    Vec2 to_frame(Vec2 x) const {
        const Vec2 d = x - origin;
        return {d.dot(direction.perp()), d.dot(direction)};
    }
    Vec2 from_frame(double xp, double xn) const {
        return origin + xn * direction + xp * direction.perp();
    }
};

/// Compactly supported potential on the grid square; support must keep a
/// margin of at least two cells from the boundary.
struct Potential {
    Image q;

    explicit Potential(Image q_);
    static Potential zero(const Grid2& grid);
    double operator()(Vec2 x) const { return q.interp(x); }
};

/// Geometric-optics quasimode concentrating on the light ray over a segment:
/// v = e^{i lambda phi} (a0 + a_{-1}/lambda) with phi = t - x_n in the segment
/// frame. The profile bump is chi(y) = eps^{-1} zeta(y/eps) with
/// zeta(y) = (3/sqrt(pi)) (1-|y|^2)^4 on |y| < 1 (unit L2 norm) and
/// eps = lambda^{-1/10}.
class WaveQuasimode {
  public:
    WaveQuasimode(const Segment& seg, const Potential& q, const SpaceTimeGrid& st, double lambda,
                  double amplitude = 1.0);

    const Segment& segment() const { return seg_; }
    const SpaceTimeGrid& st() const { return st_; }
    double lambda() const { return lambda_; }
    double eps() const { return eps_; }

    /// Profile bump chi on R^2 and the fixed unit-mass bump zeta.
    double chi(Vec2 y) const;
    static double zeta(Vec2 y);

    double phase(Vec2 x, double t) const { return t - seg_.to_frame(x).y; }
    /// Leading amplitude; carries the 1/sqrt(2) space-time normalization that
    /// makes the concentration mass per unit segment length equal one.
    double a0(Vec2 x, double t) const;
    /// First-order correction from the transport hierarchy; direct evaluation
    /// (z-integral by composite trapezoid on each call).
    complexd am1(Vec2 x, double t) const;
    /// Fast path for grid nodes, backed by precomputed line-integral tables.
    complexd am1_at_node(int ix, int iy, double t) const;
    /// (box + q) a0 by centered finite differences with the grid steps.
    complexd box_plus_q_a0(Vec2 x, double t) const;

    complexd value(Vec2 x, double t) const;
    complexd value_at_node(int ix, int iy, double t) const;

  private:
    double fd_box_a0(double xp, double w) const;
    double q_line_integral(double xp, double from, double to) const;

    Segment seg_;
    SpaceTimeGrid st_;
    double lambda_ = 1.0;
    double eps_ = 1.0;
    double amplitude_ = 1.0;
    Image q_;
    // per-node frame coordinates and cumulative line integrals of q
    std::vector<float> node_xp_, node_xn_;
    std::vector<double> q_full_;           // int_0^{x_n} q along the node's line
    std::vector<std::vector<double>> q_tab_;  // int_0^{sigma} q, sigma near 0
    double tab_lo_ = 0.0, tab_step_ = 0.0;
    std::vector<int> tab_index_;           // -1 outside the tube
};

enum class TimeDirection { Forward, Backward };

/// Dirichlet data on the boundary nodes of the grid square over time.
struct BoundaryTrace {
    SpaceTimeGrid st;
    std::vector<std::pair<int, int>> nodes;  // fixed enumeration of boundary nodes
    std::vector<complexd> values;            // nt * nodes.size(), time-major

    explicit BoundaryTrace(const SpaceTimeGrid& st_);
    complexd& at(int k, std::size_t b) { return values[k * nodes.size() + b]; }
    complexd at(int k, std::size_t b) const { return values[k * nodes.size() + b]; }

    static std::vector<std::pair<int, int>> boundary_nodes(const Grid2& grid);
};

/// Space-time field storage (small runs only; the pairing drivers stream).
struct WaveField {
    SpaceTimeGrid st;
    std::vector<complexd> u;  // nt * n^2, time-major

    explicit WaveField(const SpaceTimeGrid& st_);
    complexd& at(int k, int ix, int iy) {
        return u[static_cast<std::size_t>(k) * st.spatial.size() + st.spatial.index(ix, iy)];
    }
    complexd at(int k, int ix, int iy) const {
        return u[static_cast<std::size_t>(k) * st.spatial.size() + st.spatial.index(ix, iy)];
    }
};

struct DNPairing {
    complexd value;
    Grid2 grid;
    double dt = 0.0;
};

WaveQuasimode build_wave_quasimode(const Segment& seg, const Potential& q,
                                   const SpaceTimeGrid& st, double lambda);

/// Sup norm over the space-time interior of (box + q)(e^{i lambda phi} a),
/// evaluated through the factorization e^{i lambda phi} lambda^{-1}(box+q)a_{-1}
/// with centered finite differences on the sampled correction amplitude.
double quasimode_residual(const WaveQuasimode& qm, const Potential& q);

/// Space-time trapezoidal quadrature of psi |e^{i lambda phi} a0|^2.
double concentration_integral(const WaveQuasimode& qm,
                              const std::function<double(Vec2, double)>& psi);

/// Leapfrog solve of (box + q)u = 0 with Dirichlet trace f and vanishing
/// Cauchy data at t = 0 (forward) or t = T (backward). Optional initial data
/// override the zero Cauchy data of the forward problem.
WaveField solve_wave(const Potential& q, const BoundaryTrace& f,
                     TimeDirection direction = TimeDirection::Forward,
                     const ComplexImage* u_init = nullptr, const ComplexImage* ut_init = nullptr);

/// (Lambda_q f1, f2): boundary pairing of the normal derivative of the forward
/// solution against f2, by one-sided second-order differences and trapezoidal
/// boundary quadrature. Streams the solve.
DNPairing dn_pairing(const Potential& q, const BoundaryTrace& f1, const BoundaryTrace& f2);

/// (f1, Lambda_q^T f2): the transpose pairing through the backward solve.
DNPairing dn_pairing_transpose(const Potential& q, const BoundaryTrace& f1,
                               const BoundaryTrace& f2);

/// Volume integral of weight(x) u1 conj(u2) over Omega x (0,T) where u1 solves
/// the forward problem for (q1, f1) and u2 the backward problem for (q2, f2).
complexd wave_volume_pairing(const Potential& q1, const BoundaryTrace& f1, const Potential& q2,
                             const BoundaryTrace& f2, const Image& weight);

/// Staggered leapfrog energy between steps k and k+1; exactly conserved for
/// q >= 0 once the boundary data has switched off.
double discrete_energy(const WaveField& field, const Potential& q, int k);

/// Direct quadrature of weight along the segment.
double segment_line_integral(const Image& weight, const Segment& seg, int nsub = 4);

/// Dirichlet trace of the quasimode on the boundary nodes over all time steps.
BoundaryTrace quasimode_boundary_trace(const WaveQuasimode& qm);

struct XrayRecoveryRow {
    double lambda = 0.0;
    complexd pairing_value;
    double line_integral = 0.0;
    double abs_error = 0.0;
};

/// The desk-scale recovery experiment: quasimode traces injected into exact
/// solves, volume identity tabulated against the direct line integral.
std::vector<XrayRecoveryRow> xray_recovery_experiment(const Potential& q1, const Potential& q2,
                                                      const Segment& seg,
                                                      const std::vector<double>& lambdas,
                                                      const SpaceTimeGrid& st);

}  // namespace microct
