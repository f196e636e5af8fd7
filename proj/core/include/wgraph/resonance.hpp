#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wgraph/geometry.hpp"

namespace wg {

// Compactly supported potential v on [lo, hi] for h = -d^2/ds^2 + v.
class Potential1D {
public:
    Potential1D(std::function<double(double)> v, double lo, double hi,
                std::vector<double> breakpoints, std::string tag);

    // v = stretch * beta * gamma^2 (stretch = 1 + eps b for the deformed operator)
    static Potential1D from_profile(const CurvatureProfile& profile, double beta, double stretch = 1.0);
    // v = value on [lo, hi]
    static Potential1D square_well(double value, double lo, double hi);

    // eps^-2 v(s/eps)
    Potential1D scaled(double eps) const;
    // v(-s)
    Potential1D reflected() const;

    double operator()(double s) const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::string& tag() const { return tag_; }
    double integral() const { return integral_; }
    // |integral v| < 1e-10: the mean-zero case (beta = 0 is the expected one).
    bool integral_warning() const { return std::abs(integral_) < 1e-10; }

private:
    std::function<double(double)> v_;
    double lo_, hi_;
    std::vector<double> breakpoints_;
    std::string tag_;
    double integral_ = 0.0;
};

struct ZeroEnergyTrace {
    // D = f'(hi) for f'' = v f, f(lo) = 1, f'(lo) = 0
    double D = 0.0;
    double f_right = 1.0;
    // integral of v f^2 over the support
    double weighted_integral = 0.0;
    std::vector<double> s, f, df;
};

struct ZeroEnergyOptions {
    double tolerance = 1e-12;
    // uniform samples across the support (breakpoints are added); 0 keeps
    // only the end state
    int samples = 1001;
};

ZeroEnergyTrace zero_energy_solve(const Potential1D& v, const ZeroEnergyOptions& options = {});

struct ResonanceResult {
    bool resonant = false;
    double D = 0.0;
    // |D| (hi - lo) / sup|f|, the quantity compared against tol_D
    double D_scaled = 0.0;
    double tol_D = 1e-9;
    double c_minus = 0.0;
    double c_plus = 0.0;
    // normalized resonance function (c_-^2 + c_+^2 = 1) and its derivative
    std::vector<double> s, f_r, df_r;
    // integral of v f_r^2, so that b_hat = b * b_hat_per_b
    double b_hat_per_b = 0.0;
    bool integral_warning = false;
};

ResonanceResult detect_resonance(const Potential1D& v, double tol_D = 1e-9,
                                 const ZeroEnergyOptions& options = {});

// max |-f_r'' + v f_r| on the sample grid, with f_r'' from a fourth-order
// difference of the sampled f_r'; stencils crossing a breakpoint are skipped.
double resonance_residual(const Potential1D& v, const ResonanceResult& r);

struct MismatchSample {
    double beta;
    double D;
};

// D(beta) for v = beta gamma^2 on `samples + 1` equispaced couplings.
std::vector<MismatchSample> scan_mismatch(const CurvatureProfile& profile, double beta_lo,
                                          double beta_hi, int samples);

// Smallest-|beta| root of D(beta) = 0 in [beta_lo, beta_hi] intersected with
// (-inf, 0), refined to |D| < 1e-11. nullopt when D has no sign change.
std::optional<double> find_resonant_coupling(const CurvatureProfile& profile, double beta_lo,
                                             double beta_hi, int samples = 200);

}  // namespace wg
