#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wgraph/errors.hpp"
#include "wgraph/resonance.hpp"

using namespace wg;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kBetaStar = -9.3147576807214;  // default bump, pinned by two independent integrators
}  // namespace

TEST(Resonance, SquareWellHalfBoundState) {
    const ResonanceResult r = detect_resonance(Potential1D::square_well(-kPi * kPi, 0.0, 1.0));
    EXPECT_TRUE(r.resonant);
    EXPECT_LT(std::abs(r.D), 1e-10);
    EXPECT_NEAR(r.c_minus, 1.0 / std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(r.c_plus, -1.0 / std::sqrt(2.0), 1e-10);
    EXPECT_NEAR(r.c_minus * r.c_minus + r.c_plus * r.c_plus, 1.0, 1e-12);
    EXPECT_NEAR(r.b_hat_per_b, -kPi * kPi / 4.0, 1e-8);
    EXPECT_LT(resonance_residual(Potential1D::square_well(-kPi * kPi, 0.0, 1.0), r), 1e-6);
}

TEST(Resonance, SquareWellSecondResonanceIsEven) {
    const ResonanceResult r = detect_resonance(Potential1D::square_well(-4.0 * kPi * kPi, 0.0, 1.0));
    EXPECT_TRUE(r.resonant);
    EXPECT_NEAR(r.c_plus, 1.0 / std::sqrt(2.0), 1e-10);
}

TEST(Resonance, SquareWellMismatchClosedForm) {
    for (double beta : {-1.0, -5.0, -20.0, 3.0}) {
        const ZeroEnergyTrace t = zero_energy_solve(Potential1D::square_well(beta, 0.0, 1.0));
        const double p = std::sqrt(std::abs(beta));
        const double expected = beta < 0 ? -p * std::sin(p) : p * std::sinh(p);
        EXPECT_NEAR(t.D, expected, 1e-10 * std::max(1.0, std::abs(expected))) << beta;
        EXPECT_FALSE(detect_resonance(Potential1D::square_well(beta, 0.0, 1.0)).resonant);
    }
}

TEST(Resonance, PositivePotentialsNeverResonant) {
    const CurvatureProfile p = CurvatureProfile::smooth_bump(1.0);
    for (int i = 1; i <= 100; ++i) {
        const double beta = 0.2 * i;
        EXPECT_FALSE(detect_resonance(Potential1D::from_profile(p, beta)).resonant) << beta;
    }
}

TEST(Resonance, BumpMismatchMatchesRK4) {
    const CurvatureProfile p = CurvatureProfile::smooth_bump(1.0);
    for (double beta : {-3.0, -12.0, 2.0}) {
        const Potential1D v = Potential1D::from_profile(p, beta);
        const auto [f, df] = oracle::rk4_zero_energy([&](double s) { return v(s); }, -1.0, 1.0, 20000);
        const ZeroEnergyTrace t = zero_energy_solve(v);
        EXPECT_NEAR(t.D, df, 1e-9) << beta;
        EXPECT_NEAR(t.f_right, f, 1e-9) << beta;
    }
}

TEST(Resonance, TunedBumpCoupling) {
    const CurvatureProfile p = CurvatureProfile::smooth_bump(1.0);
    const auto beta = find_resonant_coupling(p, -20.0, 0.0);
    ASSERT_TRUE(beta.has_value());
    EXPECT_NEAR(*beta, kBetaStar, 1e-9);
    const ResonanceResult r = detect_resonance(Potential1D::from_profile(p, *beta));
    EXPECT_TRUE(r.resonant);
    EXPECT_NEAR(r.c_minus, 1.0 / std::sqrt(2.0), 1e-8);
    EXPECT_NEAR(r.c_plus, -1.0 / std::sqrt(2.0), 1e-8);
    // detuned by 10% in amplitude: no longer resonant
    const ResonanceResult off = detect_resonance(Potential1D::from_profile(p.scaled(1.1), *beta));
    EXPECT_FALSE(off.resonant);
}

TEST(Resonance, NoCouplingFoundForPositiveRange) {
    EXPECT_FALSE(find_resonant_coupling(CurvatureProfile::smooth_bump(1.0), 0.5, 10.0).has_value());
}

TEST(Resonance, ReflectionSwapsAsymptoticConstants) {
    // reflection maps the resonance f(s) to f(-s)
    const double beta = -kPi * kPi;
    const Potential1D v = Potential1D::square_well(beta, 0.0, 1.0);
    const ResonanceResult r = detect_resonance(v);
    const ResonanceResult m = detect_resonance(v.reflected());
    EXPECT_TRUE(m.resonant);
    EXPECT_NEAR(std::abs(m.c_minus), std::abs(r.c_plus), 1e-10);
    EXPECT_NEAR(m.b_hat_per_b, r.b_hat_per_b, 1e-8);
}

TEST(Resonance, ScaledPotentialKeepsVerdictAndConstants) {
    const Potential1D v = Potential1D::from_profile(CurvatureProfile::smooth_bump(1.0), kBetaStar);
    const ResonanceResult r1 = detect_resonance(v);
    const ResonanceResult r2 = detect_resonance(v.scaled(0.1));
    EXPECT_TRUE(r2.resonant);
    EXPECT_NEAR(r2.c_plus, r1.c_plus, 1e-9);
    // D scales like 1/eps
    EXPECT_NEAR(zero_energy_solve(v.scaled(0.1)).D, 10.0 * zero_energy_solve(v).D, 1e-9);
}

TEST(Resonance, ZeroCouplingIsTheFreeResonance) {
    const ResonanceResult r = detect_resonance(Potential1D::from_profile(CurvatureProfile::smooth_bump(1.0), 0.0));
    EXPECT_TRUE(r.resonant);
    EXPECT_TRUE(r.integral_warning);
    EXPECT_NEAR(r.c_minus, r.c_plus, 1e-15);
    EXPECT_EQ(r.b_hat_per_b, 0.0);
}

TEST(Resonance, RejectsBadPotentials) {
    EXPECT_THROW(Potential1D::square_well(1.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(Potential1D::square_well(1.0, 0.0, 1.0).scaled(0.0), DomainError);
}
