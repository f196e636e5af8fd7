#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wg {

using cplx = std::complex<double>;

enum class GraphKind { decoupled, scale_invariant, deformed, free };

std::string to_string(GraphKind kind);

// Vertex condition at s = 0 for the line cut into a left edge (s < 0) and a
// right edge (s > 0):
//   decoupled        f(0-) = f(0+) = 0
//   scale_invariant  c_- f(0+) = c_+ f(0-),  c_+ f'(0+) - c_- f'(0-) = 0
//   deformed         c_- f(0+) = c_+ f(0-),
//                    c_+ f'(0+) - c_- f'(0-) = b_hat (c_- f(0-) + c_+ f(0+))
//   free             scale_invariant with c_- = c_+ = 1/sqrt(2)
struct GraphOperatorSpec {
    GraphKind kind = GraphKind::free;
    double c_minus = 0.0;
    double c_plus = 0.0;
    double b_hat = 0.0;

    static GraphOperatorSpec decoupled();
    static GraphOperatorSpec free_line();
    // (c_-, c_+) is rescaled to unit length
    static GraphOperatorSpec scale_invariant(double c_minus, double c_plus);
    static GraphOperatorSpec deformed(double c_minus, double c_plus, double b_hat);

    // A F + B F' = 0 with F = (f(0-), f(0+)) and F' the derivatives pointing
    // away from the vertex along each edge: (-f'(0-), f'(0+)).
    Eigen::Matrix2d A() const;
    Eigen::Matrix2d B() const;
};

// S(k) = -(A + i k B)^{-1} (A - i k B). Edge order (left, right): S(0,0) is
// the reflection and S(1,0) the transmission for a wave incident from the left.
struct ScatteringMatrix {
    Eigen::Matrix2cd S;

    cplx reflection_left() const { return S(0, 0); }
    cplx transmission_left_to_right() const { return S(1, 0); }
    cplx reflection_right() const { return S(1, 1); }
    cplx transmission_right_to_left() const { return S(0, 1); }
    // || S^* S - I ||
    double unitarity_defect() const;
};

// Physical scattering matrix, k > 0; unitarity is checked on return.
ScatteringMatrix scattering_matrix(const GraphOperatorSpec& spec, double k);
// Analytic continuation to complex k (used by the Green's function).
ScatteringMatrix scattering_matrix(const GraphOperatorSpec& spec, cplx k);

// Principal sqrt(z) with Im > 0; throws BranchError on [0, inf).
cplx decaying_sqrt(cplx z);

// Kernel of (h - z)^{-1}:
//   (i / 2k) [ [same side] e^{ik|s-s'|} + S_{side(s), side(s')} e^{ik(|s|+|s'|)} ],  k = sqrt(z).
// s = 0 is treated as 0+.
cplx green_function(const GraphOperatorSpec& spec, cplx z, double s, double s_prime);

// Uniform grid s_j = s0 + j h, j = 0..size-1, containing the vertex as a node.
struct LineGrid {
    double s0 = 0.0;
    double h = 1.0;
    std::size_t size = 0;

    double node(std::size_t j) const { return s0 + h * static_cast<double>(j); }
    // index of s = 0; throws if the vertex is not a node strictly inside
    std::size_t vertex_index() const;
};

// (h - z)^{-1} f on the grid. Each edge is integrated separately (cubic
// interpolation of f inside the edge, 3-point Gauss per cell) and the
// convolution is accumulated recursively in O(size). The output at the vertex
// node is the right limit.
std::vector<cplx> resolvent_apply(const GraphOperatorSpec& spec, cplx z, const LineGrid& grid,
                                  const std::vector<cplx>& f);

struct VertexData {
    cplx f_left, df_left;    // f(0-), f'(0-)
    cplx f_right, df_right;  // f(0+), f'(0+)
};

// Exact one-sided vertex values of (h - z)^{-1} f (same quadrature as resolvent_apply).
VertexData resolvent_vertex_data(const GraphOperatorSpec& spec, cplx z, const LineGrid& grid,
                                 const std::vector<cplx>& f);

struct VertexResidual {
    double first = 0.0;   // value condition
    double second = 0.0;  // derivative condition
    double max() const { return first > second ? first : second; }
};

// Relative residuals of the two vertex conditions of `spec`. Each residual is
// divided by the sum of magnitudes of its terms; derivative data enter the
// decoupled conditions through `k_scale` (f' / k_scale has value units).
VertexResidual vertex_residual(const GraphOperatorSpec& spec, const VertexData& v, double k_scale = 1.0);

}  // namespace wg
