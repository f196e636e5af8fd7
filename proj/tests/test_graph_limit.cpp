#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wgraph/errors.hpp"
#include "wgraph/graph_limit.hpp"

using namespace wg;

namespace {

const cplx I(0.0, 1.0);

// Reflection and transmission for a wave e^{iks} incident from the left,
// solved directly from the vertex conditions written out for
// f = e^{iks} + rho e^{-iks} (s < 0), f = tau e^{iks} (s > 0).
std::pair<cplx, cplx> matching_solve(const GraphOperatorSpec& spec, cplx k) {
    const double cm = spec.c_minus, cp = spec.c_plus;
    // unknowns (rho, tau); f(0-) = 1 + rho, f'(0-) = ik(1 - rho), f(0+) = tau, f'(0+) = ik tau
    Eigen::Matrix2cd M;
    Eigen::Vector2cd r;
    if (spec.kind == GraphKind::decoupled) {
        M << 1.0, 0.0, 0.0, 1.0;
        r << -1.0, 0.0;
    } else {
        // c_- tau - c_+ (1 + rho) = 0
        M(0, 0) = -cp;
        M(0, 1) = cm;
        r(0) = cp;
        // c_+ ik tau - c_- ik (1 - rho) - b (c_- (1 + rho) + c_+ tau) = 0
        const double b = spec.kind == GraphKind::deformed ? spec.b_hat : 0.0;
        M(1, 0) = cm * I * k - b * cm;
        M(1, 1) = cp * I * k - b * cp;
        r(1) = cm * I * k + b * cm;
    }
    const Eigen::Vector2cd x = M.fullPivLu().solve(r);
    return {x(0), x(1)};
}

std::vector<GraphOperatorSpec> sample_specs() {
    return {GraphOperatorSpec::free_line(), GraphOperatorSpec::decoupled(),
            GraphOperatorSpec::scale_invariant(0.3, -1.1), GraphOperatorSpec::scale_invariant(1.0, 0.0),
            GraphOperatorSpec::deformed(1.0, -1.0, -1.96), GraphOperatorSpec::deformed(0.4, 0.9, 2.5)};
}

double bump(double s, double c, double w) {
    const double t = (s - c) / w;
    return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
}

}  // namespace

TEST(GraphLimit, ScatteringMatrixIsUnitary) {
    for (const auto& spec : sample_specs())
        for (double k : {0.05, 0.7, 1.0, 3.0, 40.0})
            EXPECT_LT(scattering_matrix(spec, k).unitarity_defect(), 1e-12) << to_string(spec.kind) << " k=" << k;
}

TEST(GraphLimit, ScatteringMatrixMatchesDirectMatching) {
    for (const auto& spec : sample_specs()) {
        for (cplx k : {cplx(0.8, 0.0), cplx(2.0, 0.0), cplx(0.7, 0.7)}) {
            const ScatteringMatrix sm = scattering_matrix(spec, k);
            const auto [rho, tau] = matching_solve(spec, k);
            EXPECT_LT(std::abs(sm.reflection_left() - rho), 1e-13) << to_string(spec.kind);
            EXPECT_LT(std::abs(sm.transmission_left_to_right() - tau), 1e-13) << to_string(spec.kind);
        }
    }
}

TEST(GraphLimit, ScaleInvariantClosedForm) {
    const GraphOperatorSpec spec = GraphOperatorSpec::scale_invariant(2.0, -0.5);
    const double cm = spec.c_minus, cp = spec.c_plus;
    EXPECT_NEAR(cm * cm + cp * cp, 1.0, 1e-15);
    const ScatteringMatrix a = scattering_matrix(spec, 0.3), b = scattering_matrix(spec, 9.0);
    EXPECT_LT((a.S - b.S).norm(), 1e-14);
    EXPECT_NEAR(a.transmission_left_to_right().real(), 2.0 * cm * cp, 1e-14);
    EXPECT_NEAR(a.reflection_left().real(), cm * cm - cp * cp, 1e-14);
}

TEST(GraphLimit, FreeAndDecoupledLimits) {
    const ScatteringMatrix f = scattering_matrix(GraphOperatorSpec::free_line(), 1.3);
    EXPECT_LT(std::abs(f.transmission_left_to_right() - 1.0), 1e-14);
    EXPECT_LT(std::abs(f.reflection_left()), 1e-14);
    const ScatteringMatrix d = scattering_matrix(GraphOperatorSpec::decoupled(), 1.3);
    EXPECT_LT(std::abs(d.transmission_left_to_right()), 1e-15);
    EXPECT_LT(std::abs(d.reflection_left() + 1.0), 1e-15);
}

TEST(GraphLimit, DeformedTransmissionDependsOnEnergy) {
    const GraphOperatorSpec spec = GraphOperatorSpec::deformed(1.0, -1.0, -2.0);
    const cplx t1 = scattering_matrix(spec, 0.5).transmission_left_to_right();
    const cplx t2 = scattering_matrix(spec, 5.0).transmission_left_to_right();
    EXPECT_GT(std::abs(t1 - t2), 1e-2);
    // high energy recovers the scale-invariant value
    const cplx t_inf = scattering_matrix(spec, 1e7).transmission_left_to_right();
    EXPECT_NEAR(t_inf.real(), -1.0, 1e-6);
}

TEST(GraphLimit, RejectsBadSpecsAndBranch) {
    EXPECT_THROW(GraphOperatorSpec::scale_invariant(0.0, 0.0), DomainError);
    EXPECT_THROW(scattering_matrix(GraphOperatorSpec::free_line(), 0.0), DomainError);
    EXPECT_THROW(decaying_sqrt(cplx(2.0, 0.0)), BranchError);
    EXPECT_NEAR(decaying_sqrt(cplx(-4.0, 0.0)).imag(), 2.0, 1e-15);
}

TEST(GraphLimit, FreeGreenFunctionIsPlaneWaveKernel) {
    const cplx z(0.3, 1.0), k = std::sqrt(z);
    for (double s : {-2.0, -0.3, 0.0, 1.5})
        for (double t : {-1.0, 0.2, 2.5}) {
            const cplx ref = I / (2.0 * k) * std::exp(I * k * std::abs(s - t));
            EXPECT_LT(std::abs(green_function(GraphOperatorSpec::free_line(), z, s, t) - ref), 1e-15);
        }
}

TEST(GraphLimit, GreenFunctionSatisfiesVertexConditions) {
    const cplx z(0.0, 1.0);
    const double eta = 1e-3;
    for (const auto& spec : sample_specs()) {
        // with c_+ = 0 the value condition is f(0+) = 0, and the relative
        // residual of an extrapolated zero is meaningless
        if (spec.c_plus == 0.0 && spec.kind != GraphKind::decoupled) continue;
        for (double sp : {-1.2, 0.7}) {
            auto G = [&](double s) { return green_function(spec, z, s, sp); };
            // one-sided values and second-order one-sided derivatives
            VertexData v;
            v.f_left = 3.0 * G(-eta) - 3.0 * G(-2 * eta) + G(-3 * eta);
            v.f_right = 3.0 * G(eta) - 3.0 * G(2 * eta) + G(3 * eta);
            v.df_left = (3.0 * v.f_left - 4.0 * G(-eta) + G(-2 * eta)) / (2 * eta);
            v.df_right = (-3.0 * v.f_right + 4.0 * G(eta) - G(2 * eta)) / (2 * eta);
            EXPECT_LT(vertex_residual(spec, v).max(), 1e-5) << to_string(spec.kind) << " s'=" << sp;
        }
        // symmetry of the kernel
        EXPECT_LT(std::abs(green_function(spec, z, -0.4, 1.1) - green_function(spec, z, 1.1, -0.4)), 1e-15);
    }
}

TEST(GraphLimit, ResolventApplyMatchesQuadratureOfFreeKernel) {
    const cplx z(0.0, 1.0), k = std::sqrt(z);
    const LineGrid grid{-10.0, 0.01, 2001};
    std::vector<cplx> f(grid.size);
    auto fs = [](double s) { return bump(s, 2.0, 1.0) + 0.5 * bump(s, -3.0, 1.5); };
    for (std::size_t j = 0; j < grid.size; ++j) f[j] = fs(grid.node(j));
    const auto g = resolvent_apply(GraphOperatorSpec::free_line(), z, grid, f);
    for (std::size_t j = 0; j < grid.size; j += 97) {
        const double s = grid.node(j);
        auto kern = [&](double t) { return I / (2.0 * k) * std::exp(I * k * std::abs(s - t)) * fs(t); };
        cplx ref = 0.0;
        for (auto [a, b] : {std::pair{-4.5, -1.5}, std::pair{1.0, 3.0}}) {
            if (s > a && s < b) ref += oracle::integrate(kern, a, s) + oracle::integrate(kern, s, b);
            else ref += oracle::integrate(kern, a, b);
        }
        EXPECT_LT(std::abs(g[j] - ref), 1e-8) << "s=" << s;
    }
}

TEST(GraphLimit, ResolventApplyMatchesQuadratureOfGreenFunction) {
    const cplx z(0.2, 0.8);
    const LineGrid grid{-8.0, 0.01, 1601};
    std::vector<cplx> f(grid.size);
    auto fs = [](double s) { return bump(s, -2.0, 1.0) - 0.7 * bump(s, 2.5, 1.2); };
    for (std::size_t j = 0; j < grid.size; ++j) f[j] = fs(grid.node(j));
    for (const auto& spec : sample_specs()) {
        const auto g = resolvent_apply(spec, z, grid, f);
        for (std::size_t j = 13; j < grid.size; j += 151) {
            const double s = grid.node(j);
            auto kern = [&](double t) { return green_function(spec, z, s, t) * fs(t); };
            cplx ref = 0.0;
            for (auto [a, b] : {std::pair{-3.0, -1.0}, std::pair{1.3, 3.7}}) {
                if (s > a && s < b) ref += oracle::integrate(kern, a, s) + oracle::integrate(kern, s, b);
                else ref += oracle::integrate(kern, a, b);
            }
            EXPECT_LT(std::abs(g[j] - ref), 1e-8) << to_string(spec.kind) << " s=" << s;
        }
    }
}

TEST(GraphLimit, ResolventVertexDataSatisfiesConditions) {
    const cplx z(0.0, 1.0);
    const LineGrid grid{-8.0, 0.02, 801};
    std::vector<cplx> f(grid.size);
    for (std::size_t j = 0; j < grid.size; ++j) f[j] = bump(grid.node(j), -2.0, 1.0) + bump(grid.node(j), 3.0, 0.5);
    for (const auto& spec : sample_specs()) {
        const VertexData v = resolvent_vertex_data(spec, z, grid, f);
        EXPECT_LT(vertex_residual(spec, v).max(), 1e-12) << to_string(spec.kind);
        const auto g = resolvent_apply(spec, z, grid, f);
        EXPECT_LT(std::abs(g[grid.vertex_index()] - v.f_right), 1e-14 + 1e-12 * std::abs(v.f_right));
    }
}

TEST(GraphLimit, VertexResidualDetectsWrongConditions) {
    const cplx z(0.0, 1.0);
    const LineGrid grid{-8.0, 0.02, 801};
    std::vector<cplx> f(grid.size);
    for (std::size_t j = 0; j < grid.size; ++j) f[j] = bump(grid.node(j), -2.0, 1.0);
    const VertexData v = resolvent_vertex_data(GraphOperatorSpec::free_line(), z, grid, f);
    EXPECT_GT(vertex_residual(GraphOperatorSpec::decoupled(), v).max(), 0.1);
    EXPECT_GT(vertex_residual(GraphOperatorSpec::scale_invariant(1.0, -1.0), v).max(), 0.1);
}

TEST(GraphLimit, LineGridVertexMustBeInteriorNode) {
    EXPECT_EQ((LineGrid{-1.0, 0.1, 21}).vertex_index(), 10u);
    EXPECT_THROW((LineGrid{-1.05, 0.1, 21}).vertex_index(), DomainError);
    EXPECT_THROW((LineGrid{0.0, 0.1, 21}).vertex_index(), DomainError);
}
