#include <cmath>

#include <gtest/gtest.h>

#include "wgraph/errors.hpp"
#include "wgraph/geometry.hpp"

using namespace wg;

TEST(Geometry, BumpShapeAndSupport) {
    const CurvatureProfile p = CurvatureProfile::smooth_bump(2.0, 0.5, 0.25);
    EXPECT_DOUBLE_EQ(p(0.5), 2.0);
    EXPECT_EQ(p(0.75), 0.0);
    EXPECT_EQ(p(0.2), 0.0);
    EXPECT_DOUBLE_EQ(p.s_lo(), 0.25);
    EXPECT_DOUBLE_EQ(p.s_hi(), 0.75);
    EXPECT_TRUE(p.smooth());
}

TEST(Geometry, BumpDerivativesMatchCentralDifferences) {
    const CurvatureProfile p = CurvatureProfile::smooth_bump(1.3, -0.2, 0.8);
    const double h = 1e-5;
    for (double s : {-0.9, -0.5, -0.2, 0.1, 0.45}) {
        EXPECT_NEAR(p.derivative(s), (p(s + h) - p(s - h)) / (2 * h), 1e-7);
        EXPECT_NEAR(p.second_derivative(s), (p.derivative(s + h) - p.derivative(s - h)) / (2 * h), 1e-6);
    }
}

TEST(Geometry, BendingAngleOfBump) {
    // integral of exp(1 - 1/(1 - t^2)) over (-1, 1), computed independently at high precision
    const double unit = 1.2069003224378762;
    EXPECT_NEAR(bending_angle(CurvatureProfile::smooth_bump(1.0)), unit, 1e-11);
    EXPECT_NEAR(bending_angle(CurvatureProfile::smooth_bump(-0.5, 3.0, 2.0)), -0.5 * 2.0 * unit, 1e-11);
    EXPECT_NEAR(bending_angle(CurvatureProfile::rectangular(2.0, -1.0, 0.5)), 3.0, 1e-13);
}

TEST(Geometry, RectangularJumpUsesMeanOfSquares) {
    const CurvatureProfile p = CurvatureProfile::rectangular(3.0, 0.0, 1.0);
    EXPECT_FALSE(p.smooth());
    EXPECT_DOUBLE_EQ(p.squared_mean(0.0, 1e-12), 4.5);
    EXPECT_DOUBLE_EQ(p.squared_mean(1.0, 1e-12), 4.5);
    EXPECT_DOUBLE_EQ(p.squared_mean(0.5, 1e-12), 9.0);
    EXPECT_DOUBLE_EQ(p.squared_mean(1.5, 1e-12), 0.0);
}

TEST(Geometry, TabulatedSplineInterpolatesNodes) {
    std::vector<double> x{-1.0, -0.3, 0.2, 0.6, 1.0}, y;
    for (double v : x) y.push_back(0.0);
    y[1] = 0.5;
    y[2] = 1.0;
    y[3] = 0.4;
    const CurvatureProfile p = CurvatureProfile::tabulated(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(p(x[i]), y[i], 1e-14);
    EXPECT_EQ(p(1.2), 0.0);
    EXPECT_EQ(p.kind(), ProfileKind::tabulated);
    EXPECT_THROW(CurvatureProfile::tabulated({0.0}, {1.0}), DomainError);
    EXPECT_THROW(CurvatureProfile::tabulated({0.0, 1.0}, {1.0}), DomainError);
    EXPECT_THROW(CurvatureProfile::tabulated({0.0, 1.0, 1.0}, {1.0, 0.0, 1.0}), DomainError);
}

TEST(Geometry, RobinCoefficientsAndValidity) {
    const auto [a1, a2] = robin_coefficients(1.0, 1.0, 0.2);
    EXPECT_DOUBLE_EQ(a1, 1.0 - 0.2 / (2.0 * 1.2));
    EXPECT_DOUBLE_EQ(a2, 1.0 + 0.2 / (2.0 * 0.8));
    EXPECT_THROW(robin_coefficients(1.0, 1.0, 1.0), DomainError);

    ScalingParams sc;
    sc.epsilon = 0.1;
    sc.delta_ratio = 0.05;
    const WaveguideGeometry g(CurvatureProfile::smooth_bump(1.0), 1.0, 0.0, sc);
    EXPECT_NEAR(g.eta(0.0), 0.05, 1e-15);
    EXPECT_NEAR(scaled_curvature(g, 0.0), 10.0, 1e-13);
    EXPECT_DOUBLE_EQ(g.support_lo(), -0.1);

    sc.delta_ratio = 0.9;
    EXPECT_THROW(WaveguideGeometry(CurvatureProfile::smooth_bump(2.0), 1.0, 0.0, sc), DomainError);
}

TEST(Geometry, ScalingParameters) {
    ScalingParams sc;
    sc.epsilon = 0.5;
    sc.a = 4.0;
    EXPECT_DOUBLE_EQ(sc.delta(), 0.0625);
    EXPECT_TRUE(sc.theorem_regime());
    sc.b = 1.0;
    EXPECT_DOUBLE_EQ(sc.deformation_factor(), std::sqrt(2.0));
    sc.b = -2.0;
    EXPECT_THROW(sc.validate(), DomainError);
    sc.b = 0.0;
    sc.delta_ratio = 0.1;
    EXPECT_DOUBLE_EQ(sc.delta(), 0.05);
    EXPECT_FALSE(sc.theorem_regime());
}

TEST(Geometry, DeformationScalesCurvature) {
    ScalingParams sc;
    sc.epsilon = 0.2;
    sc.b = 1.0;
    sc.delta_ratio = 0.05;
    const WaveguideGeometry g(CurvatureProfile::smooth_bump(1.0), 1.0, 0.5, sc);
    EXPECT_NEAR(g.gamma_tilde(0.0), std::sqrt(1.4), 1e-15);
}
