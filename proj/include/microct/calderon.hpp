#pragma once

#include <functional>
#include <vector>

#include "microct/common.hpp"

namespace microct {

/// Node-centered rectangle [-width, width] x [0, height] with equal spacing on
/// both axes. The flat edge {x_n = 0} is where all boundary asymptotics live.
struct HalfGrid {
    int nx = 3;
    int ny = 2;
    double width = 1.0;
    double height = 1.0;

    HalfGrid() = default;
    HalfGrid(double width_, double height_, int nodes_per_unit);

    double h() const { return 2.0 * width / (nx - 1); }
    double xp(int i) const { return -width + i * h(); }
    double xn(int j) const { return j * h(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    bool operator==(const HalfGrid&) const = default;

    /// The unit half-square (-1,1) x (0,1).
    static HalfGrid unit(int nodes_per_unit) { return HalfGrid(1.0, 1.0, nodes_per_unit); }
};

struct HalfField {
    HalfGrid grid;
    std::vector<complexd> values;

    HalfField() = default;
    explicit HalfField(const HalfGrid& g) : grid(g), values(g.size(), complexd{}) {}
    complexd& at(int i, int j) { return values[grid.index(i, j)]; }
    complexd at(int i, int j) const { return values[grid.index(i, j)]; }
};

struct RealHalfField {
    HalfGrid grid;
    std::vector<double> values;

    RealHalfField() = default;
    explicit RealHalfField(const HalfGrid& g) : grid(g), values(g.size(), 0.0) {}
    double& at(int i, int j) { return values[grid.index(i, j)]; }
    double at(int i, int j) const { return values[grid.index(i, j)]; }
};

HalfField make_half_field(const HalfGrid& g, const std::function<complexd(double, double)>& fn);
RealHalfField make_real_half_field(const HalfGrid& g,
                                   const std::function<double(double, double)>& fn);

/// Positive smooth conductivity sampled on the half grid.
struct Conductivity {
    RealHalfField gamma;

    explicit Conductivity(RealHalfField g);
    static Conductivity constant(const HalfGrid& g, double value);
    static Conductivity from_function(const HalfGrid& g,
                                      const std::function<double(double, double)>& fn);
};

/// Complex-phase quasimode v = lambda^{-1/2} e^{i lambda Phi} b with
/// Phi = x' xi0' + i x_n, concentrating at the flat-edge point (x0, 0). The
/// amplitude b = sum lambda^{-j} b_{-j} is built from normal-derivative traces
/// matched to order M at the edge and extended by the truncated Taylor
/// polynomial in x_n under a fixed cutoff at eps = 0.25.
class CalderonQuasimode {
  public:
    CalderonQuasimode(const Conductivity& gamma, double x0, double xi0p,
                      const std::function<double(double)>& chi, int N, int M, double lambda);

    const HalfGrid& grid() const { return grid_; }
    double lambda() const { return lambda_; }
    double x0() const { return x0_; }
    double xi0p() const { return xi0p_; }
    int order_n() const { return N_; }
    int matching_order() const { return M_; }
    static constexpr double eps() { return 0.25; }

    /// Edge trace of the normal derivative of order k of amplitude level j.
    const std::vector<complexd>& trace(int level, int k) const { return traces_[level][k]; }
    /// Amplitude level b_{-j} on the grid.
    const HalfField& amplitude_level(int level) const { return levels_[level]; }
    /// Full amplitude b.
    const HalfField& amplitude() const { return total_; }
    /// The quasimode field v on the grid.
    HalfField field_v() const;
    /// chi sampled on the edge nodes.
    const std::vector<double>& chi_on_edge() const { return chi_edge_; }

    complexd phase_factor(int i, int j) const {
        const complexd I{0.0, 1.0};
        return std::exp(I * lambda_ * xi0p_ * grid_.xp(i)) * std::exp(-lambda_ * grid_.xn(j));
    }

  private:
    HalfGrid grid_;
    RealHalfField gamma_;
    double x0_ = 0.0;
    double xi0p_ = 1.0;
    int N_ = 1;
    int M_ = 4;
    double lambda_ = 1.0;
    std::vector<std::vector<std::vector<complexd>>> traces_;  // [level][k][i]
    std::vector<HalfField> levels_;
    HalfField total_;
    std::vector<double> chi_edge_;
};

CalderonQuasimode build_calderon_quasimode(const Conductivity& gamma, double x0, double xi0p,
                                           const std::function<double(double)>& chi, int N, int M,
                                           double lambda);

/// L2 norm of div(gamma grad v) over the half rectangle. The oscillatory phase
/// is factored analytically; the transport and second-order terms are
/// evaluated by second-order finite differences on the amplitude.
double quasimode_defect(const CalderonQuasimode& qm, const Conductivity& gamma);

/// c_k = 2 int_0^inf x^k e^{-2x} dx = k!/2^k.
double ck_constant(int k);

/// lambda^k int x_n^k f grad v . conj(grad v~) over the half rectangle.
complexd boundary_limit_integral(const CalderonQuasimode& qm, const CalderonQuasimode& qm2,
                                 const RealHalfField& f, int k);

/// Dirichlet solve of div(gamma grad u) = 0 by conjugate gradients on the
/// five-point divergence-form stencil, to relative residual 1e-10. Only the
/// boundary ring of `data` is read. Checks the discrete maximum principle.
HalfField solve_conductivity(const Conductivity& gamma, const HalfField& data);

struct EllipticSolveStats {
    long solves = 0;
    long max_principle_violations = 0;
};
EllipticSolveStats elliptic_solve_stats();
void reset_elliptic_solve_stats();

/// (Lambda_gamma f, g) evaluated through the volume form
/// int gamma grad u_f . conj(grad u_g) dx.
complexd dn_pairing_elliptic(const Conductivity& gamma, const HalfField& f, const HalfField& g);

/// Centered-difference gradient with one-sided stencils at the edges.
std::pair<HalfField, HalfField> gradient(const HalfField& u);

/// One-sided normal-derivative traces d_n^r gamma(x', 0) on the edge nodes.
std::vector<double> gamma_normal_trace(const Conductivity& gamma, int r);

struct BoundaryDeterminationRow {
    double lambda = 0.0;
    int k = 0;
    double scaled_integral = 0.0;
    double boundary_oracle = 0.0;
    double rel_error = 0.0;
};

/// Taylor-order-k boundary determination: Alessandrini volume integrals with
/// exact solves driven by quasimode traces, tabulated against the boundary
/// quadrature oracle c_k int (d_n^k difference) |chi|^2. Order 1 requires
/// gamma1 = gamma2 on the flat edge.
std::vector<BoundaryDeterminationRow> boundary_determination_experiment(
    const Conductivity& gamma1, const Conductivity& gamma2, double x0,
    const std::vector<double>& lambdas, int k, int N, int M,
    const std::function<double(double)>& chi);

struct HalfspaceSymbolRow {
    double xi = 0.0;
    double ratio = 0.0;
    double oracle = 0.0;  // coth(xi * height), the exact finite-strip value
    double rel_error = 0.0;
};

/// Measures -d_n u / (|xi'| f) on the flat edge of a strip of the given height
/// for f = cos(xi' x') and gamma = 1, against the exact finite-height solution.
std::vector<HalfspaceSymbolRow> halfspace_dn_symbol_check(const std::vector<double>& frequencies,
                                                          int nodes_per_unit, double height);

/// The classic smooth bump exp(1 - 1/(1-u^2)) on |u| < 1, centered at x0 with
/// the given half width.
std::function<double(double)> edge_bump(double x0, double half_width);

}  // namespace microct
