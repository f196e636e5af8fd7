#include "wgraph/graph_limit.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wgraph/errors.hpp"

namespace wg {

namespace {

constexpr cplx I{0.0, 1.0};

// 3-point Gauss-Legendre on [0, 1]
constexpr std::array<double, 3> gl_x{0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr std::array<double, 3> gl_w{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Lagrange weights of the cubic through nodes 0..3 evaluated at x (node units).
std::array<double, 4> lagrange4(double x) {
    std::array<double, 4> w{};
    for (int m = 0; m < 4; ++m) {
        double p = 1.0;
        for (int q = 0; q < 4; ++q)
            if (q != m) p *= (x - q) / static_cast<double>(m - q);
        w[static_cast<std::size_t>(m)] = p;
    }
    return w;
}

// Per-cell weighted integrals for cells [j, j+1] with lo <= j < hi:
//   pcell[j] = int f(s) e^{ik (s_{j+1} - s)},  qcell[j] = int f(s) e^{ik (s - s_j)}.
void cell_integrals(const std::vector<cplx>& f, std::size_t lo, std::size_t hi, double h, cplx k,
                    std::vector<cplx>& pcell, std::vector<cplx>& qcell) {
    if (hi - lo < 3) throw DomainError("each edge needs at least four grid nodes");
    // weights[c][q]: cell offset c inside the 4-node stencil, Gauss point q
    static const auto weights = [] {
        std::array<std::array<std::array<double, 4>, 3>, 3> w{};
        for (int c = 0; c < 3; ++c)
            for (int q = 0; q < 3; ++q) w[c][q] = lagrange4(c + gl_x[static_cast<std::size_t>(q)]);
        return w;
    }();
    std::array<cplx, 3> ep, eq;
    for (std::size_t q = 0; q < 3; ++q) {
        ep[q] = std::exp(I * k * (h * (1.0 - gl_x[q]))) * (gl_w[q] * h);
        eq[q] = std::exp(I * k * (h * gl_x[q])) * (gl_w[q] * h);
    }
    for (std::size_t j = lo; j < hi; ++j) {
        const std::size_t start = std::clamp<std::size_t>(j == 0 ? 0 : j - 1, lo, hi - 3);
        const std::size_t c = j - start;
        cplx p = 0.0, qv = 0.0;
        for (std::size_t q = 0; q < 3; ++q) {
            const auto& w = weights[c][q];
            const cplx fq = w[0] * f[start] + w[1] * f[start + 1] + w[2] * f[start + 2] + w[3] * f[start + 3];
            p += ep[q] * fq;
            qv += eq[q] * fq;
        }
        pcell[j] = p;
        qcell[j] = qv;
    }
}

struct Accumulated {
    std::vector<cplx> direct;  // int_{same edge} e^{ik|s_j - s'|} f(s') ds'
    cplx m_left, m_right;      // int_{edge} e^{ik|s'|} f(s') ds'
    std::size_t j0;
};

Accumulated accumulate(cplx k, const LineGrid& grid, const std::vector<cplx>& f) {
    if (f.size() != grid.size) throw DomainError("sampled function does not match the grid");
    const std::size_t n = grid.size;
    const std::size_t j0 = grid.vertex_index();
    const double h = grid.h;
    std::vector<cplx> pcell(n, 0.0), qcell(n, 0.0);
    cell_integrals(f, 0, j0, h, k, pcell, qcell);
    cell_integrals(f, j0, n - 1, h, k, pcell, qcell);

    const cplx step = std::exp(I * k * h);
    Accumulated a;
    a.j0 = j0;
    a.direct.assign(n, 0.0);
    std::vector<cplx> P(n, 0.0), Q(n, 0.0);
    for (std::size_t j = 0; j < j0; ++j) P[j + 1] = step * P[j] + pcell[j];
    for (std::size_t j = j0; j-- > 0;) Q[j] = step * Q[j + 1] + qcell[j];
    const cplx m_left = P[j0];
    // right edge restarts at the vertex
    std::vector<cplx> PR(n, 0.0), QR(n, 0.0);
    for (std::size_t j = j0; j + 1 < n; ++j) PR[j + 1] = step * PR[j] + pcell[j];
    for (std::size_t j = n - 1; j-- > j0;) QR[j] = step * QR[j + 1] + qcell[j];
    for (std::size_t j = 0; j < j0; ++j) a.direct[j] = P[j] + Q[j];
    for (std::size_t j = j0; j < n; ++j) a.direct[j] = PR[j] + QR[j];
    a.m_left = m_left;
    a.m_right = QR[j0];
    return a;
}

}  // namespace

std::string to_string(GraphKind kind) {
    switch (kind) {
    case GraphKind::decoupled: return "decoupled";
    case GraphKind::scale_invariant: return "scale_invariant";
    case GraphKind::deformed: return "deformed";
    case GraphKind::free: return "free";
    }
    return "unknown";
}

GraphOperatorSpec GraphOperatorSpec::decoupled() {
    GraphOperatorSpec s;
    s.kind = GraphKind::decoupled;
    return s;
}

GraphOperatorSpec GraphOperatorSpec::free_line() {
    GraphOperatorSpec s;
    s.kind = GraphKind::free;
    s.c_minus = s.c_plus = std::sqrt(0.5);
    return s;
}

GraphOperatorSpec GraphOperatorSpec::scale_invariant(double c_minus, double c_plus) {
    const double n = std::hypot(c_minus, c_plus);
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("c_- and c_+ cannot both vanish");
    GraphOperatorSpec s;
    s.kind = GraphKind::scale_invariant;
    s.c_minus = c_minus / n;
    s.c_plus = c_plus / n;
    return s;
}

GraphOperatorSpec GraphOperatorSpec::deformed(double c_minus, double c_plus, double b_hat) {
    GraphOperatorSpec s = scale_invariant(c_minus, c_plus);
    if (!std::isfinite(b_hat)) throw DomainError("b_hat must be finite");
    s.kind = GraphKind::deformed;
    s.b_hat = b_hat;
    return s;
}

Eigen::Matrix2d GraphOperatorSpec::A() const {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    if (kind == GraphKind::decoupled) return Eigen::Matrix2d::Identity();
    a(0, 0) = -c_plus;
    a(0, 1) = c_minus;
    if (kind == GraphKind::deformed) {
        a(1, 0) = -b_hat * c_minus;
        a(1, 1) = -b_hat * c_plus;
    }
    return a;
}

Eigen::Matrix2d GraphOperatorSpec::B() const {
    Eigen::Matrix2d b = Eigen::Matrix2d::Zero();
    if (kind == GraphKind::decoupled) return b;
    b(1, 0) = c_minus;
    b(1, 1) = c_plus;
    return b;
}

double ScatteringMatrix::unitarity_defect() const {
    return (S.adjoint() * S - Eigen::Matrix2cd::Identity()).norm();
}

ScatteringMatrix scattering_matrix(const GraphOperatorSpec& spec, cplx k) {
    const Eigen::Matrix2cd A = spec.A().cast<cplx>();
    const Eigen::Matrix2cd B = spec.B().cast<cplx>();
    const Eigen::Matrix2cd plus = A + I * k * B;
    const Eigen::Matrix2cd minus = A - I * k * B;
    const cplx det = plus.determinant();
    if (std::abs(det) < 1e-14 * (1.0 + std::abs(k)))
        throw NearSpectrumError("vertex matching system is singular at this k");
    ScatteringMatrix out;
    out.S = -plus.inverse() * minus;
    return out;
}

ScatteringMatrix scattering_matrix(const GraphOperatorSpec& spec, double k) {
    if (!(k > 0.0)) throw DomainError("scattering matrix needs k > 0");
    ScatteringMatrix out = scattering_matrix(spec, cplx(k, 0.0));
    if (out.unitarity_defect() > 1e-10) throw SolverError("scattering matrix failed the unitarity check");
    return out;
}

cplx decaying_sqrt(cplx z) {
    const cplx k = std::sqrt(z);
    if (!(k.imag() > 0.0)) throw BranchError("z on [0, inf): no decaying square root");
    return k;
}

cplx green_function(const GraphOperatorSpec& spec, cplx z, double s, double s_prime) {
    const cplx k = decaying_sqrt(z);
    const ScatteringMatrix sm = scattering_matrix(spec, k);
    const int e = s < 0.0 ? 0 : 1;
    const int ep = s_prime < 0.0 ? 0 : 1;
    cplx g = sm.S(e, ep) * std::exp(I * k * (std::abs(s) + std::abs(s_prime)));
    if (e == ep) g += std::exp(I * k * std::abs(s - s_prime));
    return I / (2.0 * k) * g;
}

std::size_t LineGrid::vertex_index() const {
    if (!(h > 0.0) || size < 2) throw DomainError("line grid needs h > 0 and at least two nodes");
    const double x = -s0 / h;
    const double j = std::round(x);
    if (std::abs(x - j) > 1e-9 || j <= 0.0 || j >= static_cast<double>(size - 1))
        throw DomainError("the vertex s = 0 must be an interior grid node");
    return static_cast<std::size_t>(j);
}

std::vector<cplx> resolvent_apply(const GraphOperatorSpec& spec, cplx z, const LineGrid& grid,
                                  const std::vector<cplx>& f) {
    const cplx k = decaying_sqrt(z);
    const Eigen::Matrix2cd S = scattering_matrix(spec, k).S;
    const Accumulated a = accumulate(k, grid, f);
    const cplx pre = I / (2.0 * k);
    const cplx img_left = S(0, 0) * a.m_left + S(0, 1) * a.m_right;
    const cplx img_right = S(1, 1) * a.m_right + S(1, 0) * a.m_left;
    std::vector<cplx> g(grid.size);
    for (std::size_t j = 0; j < grid.size; ++j) {
        const double s = grid.node(j);
        const cplx img = j < a.j0 ? img_left : img_right;
        const double dist = j == a.j0 ? 0.0 : std::abs(s);
        g[j] = pre * (a.direct[j] + std::exp(I * k * dist) * img);
    }
    return g;
}

VertexData resolvent_vertex_data(const GraphOperatorSpec& spec, cplx z, const LineGrid& grid,
                                 const std::vector<cplx>& f) {
    const cplx k = decaying_sqrt(z);
    const Eigen::Matrix2cd S = scattering_matrix(spec, k).S;
    const Accumulated a = accumulate(k, grid, f);
    const cplx pre = I / (2.0 * k);
    const cplx out_left = S(0, 0) * a.m_left + S(0, 1) * a.m_right;
    const cplx out_right = S(1, 1) * a.m_right + S(1, 0) * a.m_left;
    VertexData v;
    v.f_left = pre * (a.m_left + out_left);
    v.f_right = pre * (a.m_right + out_right);
    // d/ds on the right; on the left the edge coordinate is x = -s
    v.df_right = pre * (I * k) * (out_right - a.m_right);
    v.df_left = -pre * (I * k) * (out_left - a.m_left);
    return v;
}

VertexResidual vertex_residual(const GraphOperatorSpec& spec, const VertexData& v, double k_scale) {
    const double tiny = 1e-300;
    VertexResidual r;
    if (spec.kind == GraphKind::decoupled) {
        const double scale = std::abs(v.f_left) + std::abs(v.f_right) +
                             (std::abs(v.df_left) + std::abs(v.df_right)) / k_scale + tiny;
        r.first = std::abs(v.f_left) / scale;
        r.second = std::abs(v.f_right) / scale;
        return r;
    }
    const double cm = spec.c_minus, cp = spec.c_plus;
    const cplx a = cm * v.f_right, b = cp * v.f_left;
    r.first = std::abs(a - b) / (std::abs(a) + std::abs(b) + tiny);
    const cplx d1 = cp * v.df_right, d2 = cm * v.df_left;
    cplx rhs = 0.0;
    double rhs_mag = 0.0;
    if (spec.kind == GraphKind::deformed) {
        rhs = spec.b_hat * (cm * v.f_left + cp * v.f_right);
        rhs_mag = std::abs(spec.b_hat) * (std::abs(cm * v.f_left) + std::abs(cp * v.f_right));
    }
    r.second = std::abs(d1 - d2 - rhs) / (std::abs(d1) + std::abs(d2) + rhs_mag + tiny);
    return r;
}

}  // namespace wg
