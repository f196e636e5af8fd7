#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wgraph/geometry.hpp"
#include "wgraph/graph_limit.hpp"
#include "wgraph/report.hpp"

namespace wg {

// Nodes s_j = -L + j h, j = 0..N, h = 2L/N, N even so that s = 0 is node N/2.
// Homogeneous Dirichlet at both ends; unknowns are j = 1..N-1.
struct Grid1D {
    double half_length = 10.0;
    std::size_t intervals = 2000;

    double h() const { return 2.0 * half_length / static_cast<double>(intervals); }
    double node(std::size_t j) const { return -half_length + h() * static_cast<double>(j); }
    std::size_t size() const { return intervals + 1; }
    LineGrid line() const { return {-half_length, h(), size()}; }
    void validate() const;

    // Smallest even N with h <= h_max.
    static Grid1D with_spacing(double half_length, double h_max);
};

// -d^2/ds^2 + V with second-order central differences.
struct Discrete1DOperator {
    Grid1D grid;
    std::vector<double> potential;  // at every node (end values unused)
    double epsilon = 1.0;
    double beta = 0.0;
    double b = 0.0;
    std::string profile_tag;
};

// V_j = beta (1 + eps b) / eps^2 * gamma^2(s_j / eps); at a jump of gamma the
// mean of the one-sided limits. Rejects grids with h >= eps * width / 50.
Discrete1DOperator build_h_n_eps(const CurvatureProfile& profile, double beta, double eps, double b,
                                 const Grid1D& grid);

// Pure discrete Laplacian (gamma == 0).
Discrete1DOperator free_operator(const Grid1D& grid);

// (H - z) g = f, complex tridiagonal elimination. f and g live on all nodes;
// end values of f are ignored and those of g are zero. Relative residual is
// written to `residual` when given.
std::vector<cplx> resolvent_solve(const Discrete1DOperator& op, cplx z, const std::vector<cplx>& f,
                                  double* residual = nullptr);

// (H - z) g on the interior nodes (ends returned as zero).
std::vector<cplx> apply_shifted(const Discrete1DOperator& op, cplx z, const std::vector<cplx>& g);

// Lowest `count` eigenvalues of the Dirichlet matrix, ascending.
std::vector<double> lowest_eigenvalues(const Discrete1DOperator& op, int count);

// Wavenumber of the discrete free solutions omega^j: cos(k h) = 1 - z h^2 / 2, Im k > 0.
cplx discrete_wavenumber(cplx z, double h);

struct SideFit {
    // g = a e^{iks} + b e^{-iks} on a window
    cplx a, b;
};

// Least-squares fit of g on nodes with s in [s_from, s_to] by e^{+iks}, e^{-iks}.
SideFit fit_free_solution(const std::vector<cplx>& g, const Grid1D& grid, cplx k, double s_from, double s_to);

// One-sided vertex values from fits on [-window, -c_eps] and [c_eps, window];
// c_eps must clear the scaled support. Exact for the discrete free equation
// when k is the discrete wavenumber.
VertexData extract_vertex_data(const std::vector<cplx>& g, const Grid1D& grid, cplx k, double c_eps,
                               double window);

struct Probe {
    std::string name;
    std::function<double(double)> f;
    int side = 0;  // -1 supported in s < -1, +1 in s > 1, 0 both
    double reach = 0.0;  // f vanishes for |s| >= reach
};

// Half-length of the truncated line: the probes' reach plus 14 decay lengths
// 1 / Im sqrt(z), so the truncated Green's function is below 1e-6 at the caps.
double truncation_half_length(const std::vector<Probe>& probes, cplx z);

// Ten compactly supported probes, all vanishing on |s| < 1: bumps on each
// side plus even and odd combinations.
std::vector<Probe> default_probes();

// Accumulates the per-epsilon metrics of a study from probe responses g = R f:
// outer and full errors against the predicted limit, error against the
// alternative, cross-side leakage, and (first left probe only) the fitted
// transmission and vertex data. The fit windows run from +-0.95 to 0.05 short
// of the scaled support [support_lo, support_hi].
class ProbeScorer {
public:
    ProbeScorer(EpsilonRow& row, const Grid1D& grid, cplx z, const GraphOperatorSpec& predicted,
                const GraphOperatorSpec& alternative, double support_lo, double support_hi);
    // `light` records only the outer error (used for the refinement check).
    void add(const Probe& probe, const std::vector<cplx>& f, const std::vector<cplx>& g,
             const std::vector<cplx>* g_predicted, bool light = false);

private:
    EpsilonRow& row_;
    const Grid1D& grid_;
    cplx z_, k_, kh_;
    const GraphOperatorSpec& predicted_;
    const GraphOperatorSpec& alternative_;
    double lo_, hi_;
    bool have_fit_ = false;
};

struct StudyOptions {
    cplx z{0.0, 1.0};
    std::vector<double> eps_list{0.4, 0.2, 0.1, 0.05, 0.025};
    double threshold = 0.02;
    double tol_D = 1e-9;
    // Per-epsilon spacing: h = min(eps * width / 50, spacing_factor * eps^1.5).
    double spacing_factor = 0.05;
    bool grid_check = true;
    // Replace the predicted limit (negative controls).
    std::optional<GraphOperatorSpec> override_spec;
    std::vector<Probe> probes = default_probes();
};

// Compares (h^eps - z)^{-1} with the limit predicted by the zero-energy
// analysis of v = beta gamma^2 on every probe and epsilon.
ConvergenceReport convergence_study(const CurvatureProfile& profile, double beta, double b,
                                    const StudyOptions& options = {});

// Vertex data extrapolated linearly in eps from the two smallest eps rows,
// checked against the predicted conditions. NaN when either row lacks a fit.
double extrapolated_vertex_residual(const ConvergenceReport& report);

// Shared by the 1D and 2D studies: decreasing errors, final error under the
// threshold, grid refinement within 10%.
void assign_verdict(ConvergenceReport& report);

}  // namespace wg
