#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wgraph/banded.hpp"
#include "wgraph/effective_1d.hpp"
#include "wgraph/geometry.hpp"
#include "wgraph/graph_limit.hpp"
#include "wgraph/report.hpp"

namespace wg {

// Tensor grid on [-L, L] x [-d, d]. The s-grid is a Grid1D (Dirichlet caps,
// interior nodes i = 1..N_s-1); the u-grid has n_u nodes including both
// Robin endpoints. Unknowns are ordered with u fastest.
struct Grid2D {
    Grid1D s;
    int n_u = 32;
    double d = 1.0;

    double h_s() const { return s.h(); }
    double h_u() const { return 2.0 * d / static_cast<double>(n_u - 1); }
    double s_node(std::size_t i) const { return s.node(i); }
    double u_node(int j) const { return -d + h_u() * j; }
    std::size_t interior_s() const { return s.intervals - 1; }
    std::size_t unknowns() const { return interior_s() * static_cast<std::size_t>(n_u); }
    // i is an s-node index in 1..N_s-1
    std::size_t index(std::size_t i, int j) const { return (i - 1) * static_cast<std::size_t>(n_u) + static_cast<std::size_t>(j); }
    // Trapezoid weight in u: 1/2 at the Robin endpoints.
    double u_weight(int j) const { return (j == 0 || j == n_u - 1) ? 0.5 : 1.0; }

    // n_u >= 16 and at least 8 points per half-wavelength of mode n_max.
    void validate(int n_max) const;
};

enum class WaveguideVariant { full_H, simplified_Hhat };

std::string to_string(WaveguideVariant v);

// Weighted-symmetric five-point discretization K = W Op, where W is the
// trapezoid weight in u. K is real symmetric; the physical operator is
// Op = W^{-1} K. Robin rows use a central ghost point eliminated into the
// boundary node; the s-flux is conservative with the metric coefficient
// (1 + u eta)^{-2} at half nodes.
struct DiscreteWaveguideOperator {
    Grid2D grid;
    WaveguideVariant variant = WaveguideVariant::full_H;
    double delta = 0.0;
    double epsilon = 1.0;
    double alpha = 0.0;  // flat-region Robin coefficient
    std::vector<double> diag;        // K(p, p)
    std::vector<double> s_coupling;  // K(p, p + n_u), i.e. (i, j) to (i + 1, j)
    std::vector<double> u_coupling;  // K(p, p + 1), i.e. (i, j) to (i, j + 1)
    std::vector<double> alpha1, alpha2;  // per s node

    // W^{-1} K psi (the operator itself).
    std::vector<cplx> apply(const std::vector<cplx>& psi) const;
    // K psi - sigma W psi.
    std::vector<cplx> apply_weighted_shifted(const std::vector<cplx>& psi, cplx sigma) const;
    // Weighted inner product sum w_j h_s h_u conj(a) b.
    cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) const;
    double norm(const std::vector<cplx>& a) const { return std::sqrt(inner(a, a).real()); }
};

// Rejects non-smooth profiles (full_H needs gamma'') and grids that violate
// their invariants.
DiscreteWaveguideOperator build_waveguide(const WaveguideGeometry& geometry, WaveguideVariant variant,
                                          int n_context, const Grid2D& grid);

// Discrete Robin eigenpairs of every column of the u-operator, for modes
// 0..n_max, orthonormal in sum_j w_j h_u phi phi. Signs follow the flat
// (eta = 0) column.
class ModeProjector {
public:
    ModeProjector(const DiscreteWaveguideOperator& op, int n_max);

    int n_max() const { return n_max_; }
    // Flat-column eigenvalue mu_n^h (the renormalization threshold).
    double threshold(int n) const { return flat_mu_[static_cast<std::size_t>(n)]; }
    // Column eigenvalue at s node i.
    double mu(std::size_t i, int n) const;
    // phi_n at (s_i, u_j)
    double phi(std::size_t i, int n, int j) const;
    const std::vector<double>& flat_mode(int n) const { return flat_phi_[static_cast<std::size_t>(n)]; }

    // F(s_i, u_j) = f(s_i) phi_n(s_i, u_j) on the unknowns.
    std::vector<cplx> lift(const std::vector<cplx>& f, int n) const;
    // g(s_i) = sum_j w_j h_u G(s_i, u_j) phi_m(s_i, u_j), on all s nodes (caps zero).
    std::vector<cplx> project(const std::vector<cplx>& G, int m) const;
    // max over columns of |<phi_m, phi_n> - delta_mn|
    double orthonormality_defect() const;

private:
    const Grid2D grid_;
    int n_max_;
    std::vector<double> flat_mu_;
    std::vector<std::vector<double>> flat_phi_;
    // per interior column: empty when the column is flat
    std::vector<std::vector<double>> col_mu_;
    std::vector<std::vector<double>> col_phi_;  // (n_max+1) * n_u per column
};

// Factorized (K - sigma W) for sigma = mu_n^h / delta^2 + z.
class WaveguideResolvent {
public:
    WaveguideResolvent(const DiscreteWaveguideOperator& op, const ModeProjector& projector, int n, cplx z);

    cplx sigma() const { return sigma_; }
    // G = (Op - sigma)^{-1} F with iterative refinement; `backward_error`
    // receives ||r|| / (||K - sigma W|| ||G|| + ||W F||) after refinement.
    std::vector<cplx> solve(const std::vector<cplx>& F, double* backward_error = nullptr) const;

private:
    const DiscreteWaveguideOperator& op_;
    cplx sigma_;
    double op_norm_;
    BandedMatrix lu_;
};

// r_{m,n} f: lift f onto mode n, solve, project onto mode m.
std::vector<cplx> reduced_resolvent(const DiscreteWaveguideOperator& op, const ModeProjector& projector, int m,
                                    int n, cplx z, const std::vector<cplx>& f, double* backward_error = nullptr);

// ||(full_H - simplified_Hhat) psi|| / ||psi|| for psi = f(s) xi_0(u) with
// xi_0 the flat transverse ground state. Robin rows are identical in both
// variants and cancel.
double operator_difference_norm(const WaveguideGeometry& geometry, const Grid2D& grid,
                                const std::function<double(double)>& f);

struct WaveguideOptions {
    cplx z{0.0, 1.0};
    std::vector<double> eps_list{0.4, 0.2, 0.1};
    double delta_ratio = 0.05;
    int n_u = 32;
    // h_s = eps * width / s_points_per_width
    double s_points_per_width = 50.0;
    double threshold = 0.02;
    double tol_D = 1e-9;
    WaveguideVariant variant = WaveguideVariant::full_H;
    bool grid_check = false;
    std::optional<GraphOperatorSpec> override_spec;
    std::vector<Probe> probes = default_probes();
};

// Reduced diagonal resolvent of mode n against the predicted graph limit,
// with delta = delta_ratio * eps held proportional to eps. The off-diagonal
// norm is that of r_{n+1,n}.
ConvergenceReport theorem_check(const CurvatureProfile& profile, double d, double alpha, double b, int n,
                                const WaveguideOptions& options = {});

}  // namespace wg
