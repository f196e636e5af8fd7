#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wg {

enum class ProfileKind { smooth_bump, rectangular, tabulated };

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

// Signed curvature gamma(s) of the reference curve, compactly supported on
// [s_lo, s_hi] and exactly zero outside.
//
//   smooth_bump:  A exp(1 - 1/(1 - t^2)),  t = (s - c)/w,  peak value A at s = c
//   rectangular:  A on [s_lo, s_hi]  (non-smooth, 1D use only)
//   tabulated:    natural cubic spline through (s_i, gamma_i)
class CurvatureProfile {
public:
    static CurvatureProfile smooth_bump(double amplitude, double center = 0.0,
                                        double half_width = 1.0);
    static CurvatureProfile rectangular(double amplitude, double s_lo, double s_hi);
    static CurvatureProfile tabulated(std::vector<double> nodes, std::vector<double> values);
    // gamma == 0; represented as a zero-amplitude bump so it counts as smooth.
    static CurvatureProfile zero();

    ProfileKind kind() const { return kind_; }
    bool smooth() const { return kind_ == ProfileKind::smooth_bump; }
    double amplitude() const { return amplitude_; }
    double s_lo() const { return s_lo_; }
    double s_hi() const { return s_hi_; }
    double width() const { return s_hi_ - s_lo_; }
    double center() const { return center_; }
    double half_width() const { return half_width_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }

    double operator()(double s) const;
    double derivative(double s) const;
    double second_derivative(double s) const;

    // gamma(s)^2, except at a jump of gamma where the mean of the one-sided
    // limits of gamma^2 is returned. `tol` is the distance under which s is
    // considered to sit on the jump.
    double squared_mean(double s, double tol) const;

    // Points where gamma or one of its first two derivatives is not continuous.
    std::vector<double> breakpoints() const;

    double sup_abs() const;

    // Same shape, amplitude multiplied by `factor`.
    CurvatureProfile scaled(double factor) const;

private:
    CurvatureProfile() = default;

    ProfileKind kind_ = ProfileKind::smooth_bump;
    double amplitude_ = 0.0;
    double s_lo_ = -1.0;
    double s_hi_ = 1.0;
    double center_ = 0.0;
    double half_width_ = 1.0;
    // tabulated only: nodes, values and spline second derivatives
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> m_;

    std::size_t interval(double s) const;
};

// theta = integral of gamma over the line; adaptive Gauss-Kronrod split at
// the profile breakpoints.
double bending_angle(const CurvatureProfile& profile);

// epsilon, the thinness exponent a (delta = epsilon^a) and the deformation b.
// At desk scale delta/epsilon is usually fixed directly via delta_ratio.
struct ScalingParams {
    double epsilon = 1.0;
    double a = 4.0;
    double b = 0.0;
    std::optional<double> delta_ratio;

    double delta() const;
    double delta_over_epsilon() const { return delta() / epsilon; }
    // sqrt(1 + 2 epsilon b), the deformation factor applied to gamma
    double deformation_factor() const;
    // True when delta = epsilon^a with a > 3 (the regime the limit theorems assume).
    bool theorem_regime() const { return !delta_ratio && a > 3.0; }
    void validate() const;
};

class WaveguideGeometry {
public:
    WaveguideGeometry(CurvatureProfile profile, double d, double alpha, ScalingParams scaling);

    const CurvatureProfile& profile() const { return profile_; }
    double d() const { return d_; }
    double alpha() const { return alpha_; }
    const ScalingParams& scaling() const { return scaling_; }

    // Deformed profile sqrt(1+2 eps b) gamma(x) and its x-derivatives, at x = s/eps.
    double gamma_tilde(double s) const;
    double gamma_tilde_d1(double s) const;
    double gamma_tilde_d2(double s) const;

    // eta(s) = (delta/eps) sqrt(1+2 eps b) gamma(s/eps)
    double eta(double s) const;

    // Support of gamma(s/eps) in the s variable.
    double support_lo() const { return scaling_.epsilon * profile_.s_lo(); }
    double support_hi() const { return scaling_.epsilon * profile_.s_hi(); }

private:
    CurvatureProfile profile_;
    double d_;
    double alpha_;
    ScalingParams scaling_;
};

// (sqrt(1+2 eps b)/eps) gamma(s/eps)
double scaled_curvature(const WaveguideGeometry& geometry, double s);

// alpha_1 = alpha - eta/(2(1 + d eta)), alpha_2 = alpha + eta/(2(1 - d eta))
std::pair<double, double> robin_coefficients(const WaveguideGeometry& geometry, double s);
std::pair<double, double> robin_coefficients(double alpha, double d, double eta);

}  // namespace wg
