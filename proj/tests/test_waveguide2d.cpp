#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wgraph/errors.hpp"
#include "wgraph/transverse.hpp"
#include "wgraph/waveguide2d.hpp"

using namespace wg;

namespace {

constexpr double kPi = 3.14159265358979323846;

WaveguideGeometry make_geometry(const CurvatureProfile& p, double alpha, double eps, double ratio = 0.05) {
    ScalingParams sc;
    sc.epsilon = eps;
    sc.delta_ratio = ratio;
    return WaveguideGeometry(p, 1.0, alpha, sc);
}

std::vector<cplx> sample(const Grid1D& grid, const std::function<double(double)>& f) {
    std::vector<cplx> out(grid.size());
    for (std::size_t j = 1; j + 1 < grid.size(); ++j) out[j] = f(grid.node(j));
    return out;
}

double bump(double s, double c, double w) {
    const double t = (s - c) / w;
    return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0, s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        m = std::max(m, std::abs(a[j] - b[j]));
        s = std::max(s, std::abs(b[j]));
    }
    return m / s;
}

}  // namespace

TEST(Waveguide2D, FlatGuideSpectrumIsSeparable) {
    // Small grid: the dense spectrum of the discrete operator is the sum of the
    // discrete s-Laplacian and the Robin u-matrix (scaled by delta^-2).
    const double alpha = 0.7, eps = 0.5, ratio = 0.5;
    const WaveguideGeometry geo = make_geometry(CurvatureProfile::zero(), alpha, eps, ratio);
    const Grid2D grid{Grid1D{2.0, 8}, 17, 1.0};
    const DiscreteWaveguideOperator op = build_waveguide(geo, WaveguideVariant::full_H, 0, grid);
    const std::size_t n = grid.unknowns();
    Eigen::MatrixXd M(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<cplx> e(n, 0.0);
        e[c] = 1.0;
        const auto col = op.apply(e);
        for (std::size_t r = 0; r < n; ++r) M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r].real();
    }
    Eigen::VectorXd ev = M.eigenvalues().real();
    std::sort(ev.data(), ev.data() + ev.size());

    const Eigen::VectorXd u = oracle::fd_robin_eigenvalues(alpha, alpha, 1.0, grid.n_u);
    const double hs = grid.h_s(), delta = ratio * eps;
    std::vector<double> ref;
    for (std::size_t i = 1; i < grid.s.intervals; ++i)
        for (int j = 0; j < grid.n_u; ++j)
            ref.push_back(4.0 / (hs * hs) * std::pow(std::sin(i * kPi / (2.0 * grid.s.intervals)), 2) +
                          u(j) / (delta * delta));
    std::sort(ref.begin(), ref.end());
    for (std::size_t k = 0; k < n; ++k)
        EXPECT_NEAR(ev(static_cast<Eigen::Index>(k)), ref[k], 1e-9 * std::abs(ref[k])) << k;
}

TEST(Waveguide2D, WeightedOperatorIsSymmetric) {
    const WaveguideGeometry geo = make_geometry(CurvatureProfile::smooth_bump(1.0), -0.5, 0.4);
    const Grid2D grid{Grid1D{2.0, 80}, 32, 1.0};
    for (auto v : {WaveguideVariant::full_H, WaveguideVariant::simplified_Hhat}) {
        const DiscreteWaveguideOperator op = build_waveguide(geo, v, 1, grid);
        const std::size_t n = grid.unknowns();
        std::vector<cplx> a(n), b(n);
        for (std::size_t p = 0; p < n; ++p) {
            a[p] = cplx(std::sin(0.37 * p), std::cos(0.11 * p));
            b[p] = cplx(std::cos(0.23 * p), 0.5 * std::sin(0.05 * p));
        }
        // <a, Op b> = <Op a, b> in the weighted inner product
        const cplx l = op.inner(a, op.apply(b)), r = op.inner(op.apply(a), b);
        EXPECT_LT(std::abs(l - r), 1e-12 * std::abs(l)) << to_string(v);
    }
}

TEST(Waveguide2D, DiscreteModesConvergeAtSecondOrder) {
    const double alpha = -0.6;
    const WaveguideGeometry geo = make_geometry(CurvatureProfile::zero(), alpha, 0.4);
    double err[2][3];
    for (int r = 0; r < 2; ++r) {
        const Grid2D grid{Grid1D{2.0, 8}, 32 * (1 << r) + 1, 1.0};
        const ModeProjector proj(build_waveguide(geo, WaveguideVariant::full_H, 1, grid), 2);
        for (int n = 0; n < 3; ++n) err[r][n] = std::abs(proj.threshold(n) - symmetric_mode(alpha, 1.0, n).eigenvalue);
    }
    for (int n = 0; n < 3; ++n) EXPECT_NEAR(err[0][n] / err[1][n], 4.0, 0.3) << n;
}

TEST(Waveguide2D, ProjectorIsOrthonormalOnCurvedColumns) {
    const WaveguideGeometry geo = make_geometry(CurvatureProfile::smooth_bump(1.0), 0.5, 0.2);
    const Grid2D grid{Grid1D::with_spacing(3.0, 0.004), 32, 1.0};
    const DiscreteWaveguideOperator op = build_waveguide(geo, WaveguideVariant::full_H, 1, grid);
    const ModeProjector proj(op, 2);
    EXPECT_LT(proj.orthonormality_defect(), 1e-12);
    // lift then project is the identity for the same mode and zero for others
    std::vector<cplx> f = sample(grid.s, [](double s) { return std::exp(-s * s); });
    const auto F = proj.lift(f, 1);
    EXPECT_LT(max_diff(proj.project(F, 1), f), 1e-12);
    for (const cplx& x : proj.project(F, 0)) EXPECT_LT(std::abs(x), 1e-12);
}

TEST(Waveguide2D, FlatGuideReducedResolventIsTheDiscreteLineResolvent) {
    const cplx z(0.0, 1.0);
    const Grid1D sg{12.0, 1200};
    const auto f = sample(sg, [](double s) { return bump(s, 2.0, 1.0) - bump(s, -3.0, 1.0); });
    const auto ref = resolvent_solve(free_operator(sg), z, f);
    for (int n : {0, 1}) {
        for (double ratio : {0.1, 0.05}) {
            const WaveguideGeometry geo = make_geometry(CurvatureProfile::zero(), 0.3, 0.2, ratio);
            const Grid2D grid{sg, 32, 1.0};
            const DiscreteWaveguideOperator op = build_waveguide(geo, WaveguideVariant::full_H, n, grid);
            const ModeProjector proj(op, n + 1);
            double be = 1.0;
            const auto g = reduced_resolvent(op, proj, n, n, z, f, &be);
            EXPECT_LT(max_diff(g, ref), 1e-8) << "n=" << n << " ratio=" << ratio;
            EXPECT_LT(be, 1e-12);
            const auto off = reduced_resolvent(op, proj, n + 1, n, z, f);
            double m = 0.0;
            for (const cplx& x : off) m = std::max(m, std::abs(x));
            EXPECT_LT(m, 1e-10);
        }
    }
}

TEST(Waveguide2D, ResolventAdjointIdentity) {
    const WaveguideGeometry geo = make_geometry(CurvatureProfile::smooth_bump(1.0), 0.0, 0.4);
    const Grid2D grid{Grid1D::with_spacing(6.0, 0.008), 32, 1.0};
    const DiscreteWaveguideOperator op = build_waveguide(geo, WaveguideVariant::full_H, 1, grid);
    const ModeProjector proj(op, 2);
    const cplx z(0.2, 1.0);
    const WaveguideResolvent ra(op, proj, 1, z), rb(op, proj, 1, std::conj(z));
    EXPECT_EQ(rb.sigma(), std::conj(ra.sigma()));
    const auto F = proj.lift(sample(grid.s, [](double s) { return bump(s, 2.0, 1.0); }), 1);
    const auto G = proj.lift(sample(grid.s, [](double s) { return bump(s, -2.0, 1.5); }), 1);
    const cplx l = op.inner(ra.solve(F), G), r = op.inner(F, rb.solve(G));
    EXPECT_LT(std::abs(l - r), 1e-10 * std::abs(l));
}

TEST(Waveguide2D, OperatorDifferenceVanishesOnFlatGuide) {
    const WaveguideGeometry geo = make_geometry(CurvatureProfile::zero(), 0.5, 0.2);
    const Grid2D grid{Grid1D::with_spacing(3.0, 0.004), 32, 1.0};
    EXPECT_EQ(operator_difference_norm(geo, grid, [](double s) { return std::exp(-s * s); }), 0.0);
}

TEST(Waveguide2D, RejectsNonSmoothProfilesAndCoarseGrids) {
    const WaveguideGeometry rect = make_geometry(CurvatureProfile::rectangular(1.0, -1.0, 1.0), 0.0, 0.4);
    const Grid2D grid{Grid1D{2.0, 400}, 32, 1.0};
    EXPECT_THROW(build_waveguide(rect, WaveguideVariant::full_H, 0, grid), DomainError);
    EXPECT_THROW(theorem_check(CurvatureProfile::rectangular(1.0, -1.0, 1.0), 1.0, 0.0, 0.0, 0), DomainError);
    const WaveguideGeometry geo = make_geometry(CurvatureProfile::smooth_bump(1.0), 0.0, 0.4);
    EXPECT_THROW(build_waveguide(geo, WaveguideVariant::full_H, 0, Grid2D{Grid1D{2.0, 400}, 12, 1.0}), DomainError);
    EXPECT_THROW(build_waveguide(geo, WaveguideVariant::full_H, 3, Grid2D{Grid1D{2.0, 400}, 32, 1.0}), DomainError);
    EXPECT_THROW(build_waveguide(geo, WaveguideVariant::full_H, 0, Grid2D{Grid1D{2.0, 400}, 32, 2.0}), DomainError);
}

TEST(Waveguide2D, ManufacturedSolutionConvergesAtSecondOrderOnBoundaryRows) {
    // psi = g(s) q(u) with q = cos(k u) + B satisfying both Robin conditions;
    // source from the continuum operator, error measured on the Robin rows
    const double alpha = 0.7, kq = 2.0, d = 1.0;
    const double B = kq * std::sin(kq * d) / alpha - std::cos(kq * d);
    auto q = [&](double u) { return std::cos(kq * u) + B; };
    auto g = [](double s) { return std::exp(-s * s); };
    auto g2 = [](double s) { return (4.0 * s * s - 2.0) * std::exp(-s * s); };
    const WaveguideGeometry geo = make_geometry(CurvatureProfile::zero(), alpha, 1.25, 0.8);
    double err[2];
    for (int r = 0; r < 2; ++r) {
        const Grid2D grid{Grid1D{6.0, 2400}, 16 * (1 << r) + 1, d};
        const DiscreteWaveguideOperator op = build_waveguide(geo, WaveguideVariant::full_H, 0, grid);
        const ModeProjector proj(op, 1);
        const WaveguideResolvent res(op, proj, 0, cplx(0.0, 1.0));
        const cplx sigma = res.sigma();
        std::vector<cplx> F(grid.unknowns()), psi(grid.unknowns());
        for (std::size_t i = 1; i <= grid.interior_s(); ++i)
            for (int j = 0; j < grid.n_u; ++j) {
                const double s = grid.s_node(i), u = grid.u_node(j);
                psi[grid.index(i, j)] = g(s) * q(u);
                F[grid.index(i, j)] = -g2(s) * q(u) + g(s) * kq * kq * std::cos(kq * u) - sigma * g(s) * q(u);
            }
        const auto G = res.solve(F);
        double e = 0.0;
        for (std::size_t i = 1; i <= grid.interior_s(); ++i)
            for (int j : {0, grid.n_u - 1}) e = std::max(e, std::abs(G[grid.index(i, j)] - psi[grid.index(i, j)]));
        err[r] = e;
    }
    EXPECT_NEAR(err[0] / err[1], 4.0, 0.4) << err[0] << " " << err[1];
}
