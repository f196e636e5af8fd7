#include "wgraph/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wgraph/errors.hpp"

namespace wg {

namespace {

// exp(1 - 1/(1 - t^2)) and its first two t-derivatives; zero for |t| >= 1.
struct BumpValue {
    double g, g1, g2;
};

BumpValue bump(double t) {
    if (std::abs(t) >= 1.0) return {0.0, 0.0, 0.0};
    const double q = 1.0 - t * t;
    const double g = std::exp(1.0 - 1.0 / q);
    if (g == 0.0) return {0.0, 0.0, 0.0};
    const double q2 = q * q;
    const double g1 = -2.0 * t / q2 * g;
    const double g2 = g * (4.0 * t * t / (q2 * q2) - 2.0 / q2 - 8.0 * t * t / (q2 * q));
    return {g, g1, g2};
}

}  // namespace

std::string to_string(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::smooth_bump: return "bump";
    case ProfileKind::rectangular: return "rectangular";
    case ProfileKind::tabulated: return "tabulated";
    }
    return "unknown";
}

ProfileKind profile_kind_from_string(const std::string& name) {
    if (name == "bump" || name == "smooth_bump") return ProfileKind::smooth_bump;
    if (name == "rectangular") return ProfileKind::rectangular;
    if (name == "tabulated") return ProfileKind::tabulated;
    throw DomainError("unknown profile kind '" + name + "'");
}

CurvatureProfile CurvatureProfile::smooth_bump(double amplitude, double center, double half_width) {
    if (!(half_width > 0.0) || !std::isfinite(amplitude) || !std::isfinite(center))
        throw DomainError("smooth bump needs finite amplitude/center and half_width > 0");
    CurvatureProfile p;
    p.kind_ = ProfileKind::smooth_bump;
    p.amplitude_ = amplitude;
    p.center_ = center;
    p.half_width_ = half_width;
    p.s_lo_ = center - half_width;
    p.s_hi_ = center + half_width;
    return p;
}

CurvatureProfile CurvatureProfile::rectangular(double amplitude, double s_lo, double s_hi) {
    if (!(s_hi > s_lo) || !std::isfinite(amplitude))
        throw DomainError("rectangular profile needs s_lo < s_hi and finite amplitude");
    CurvatureProfile p;
    p.kind_ = ProfileKind::rectangular;
    p.amplitude_ = amplitude;
    p.s_lo_ = s_lo;
    p.s_hi_ = s_hi;
    p.center_ = 0.5 * (s_lo + s_hi);
    p.half_width_ = 0.5 * (s_hi - s_lo);
    return p;
}

CurvatureProfile CurvatureProfile::tabulated(std::vector<double> nodes, std::vector<double> values) {
    const std::size_t n = nodes.size();
    if (n < 2 || values.size() != n)
        throw DomainError("tabulated profile needs at least two (node, value) pairs");
    for (std::size_t i = 1; i < n; ++i)
        if (!(nodes[i] > nodes[i - 1]))
            throw DomainError("tabulated profile nodes must be strictly increasing");

    // Natural spline: m_0 = m_{n-1} = 0, tridiagonal system for the interior.
    std::vector<double> m(n, 0.0);
    if (n > 2) {
        std::vector<double> diag(n - 2), rhs(n - 2), upper(n - 2);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = nodes[i] - nodes[i - 1];
            const double h1 = nodes[i + 1] - nodes[i];
            diag[i - 1] = (h0 + h1) / 3.0;
            upper[i - 1] = h1 / 6.0;
            rhs[i - 1] = (values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0;
        }
        for (std::size_t i = 1; i < n - 2; ++i) {
            const double lower = (nodes[i + 1] - nodes[i]) / 6.0;
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i-- > 0;) {
            double r = rhs[i];
            if (i + 1 < n - 2) r -= upper[i] * m[i + 2];
            m[i + 1] = r / diag[i];
        }
    }

    CurvatureProfile p;
    p.kind_ = ProfileKind::tabulated;
    p.s_lo_ = nodes.front();
    p.s_hi_ = nodes.back();
    p.center_ = 0.5 * (p.s_lo_ + p.s_hi_);
    p.half_width_ = 0.5 * (p.s_hi_ - p.s_lo_);
    p.nodes_ = std::move(nodes);
    p.values_ = std::move(values);
    p.m_ = std::move(m);
    p.amplitude_ = 0.0;
    for (double v : p.values_) p.amplitude_ = std::max(p.amplitude_, std::abs(v));
    return p;
}

CurvatureProfile CurvatureProfile::zero() { return smooth_bump(0.0, 0.0, 1.0); }

std::size_t CurvatureProfile::interval(double s) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    if (i == 0) return 0;
    return std::min(i - 1, nodes_.size() - 2);
}

double CurvatureProfile::operator()(double s) const {
    if (s < s_lo_ || s > s_hi_) return 0.0;
    switch (kind_) {
    case ProfileKind::smooth_bump: return amplitude_ * bump((s - center_) / half_width_).g;
    case ProfileKind::rectangular: return amplitude_;
    case ProfileKind::tabulated: {
        const std::size_t i = interval(s);
        const double h = nodes_[i + 1] - nodes_[i];
        const double a = (nodes_[i + 1] - s) / h;
        const double b = (s - nodes_[i]) / h;
        return a * values_[i] + b * values_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }
    }
    return 0.0;
}

double CurvatureProfile::derivative(double s) const {
    if (s <= s_lo_ || s >= s_hi_) return 0.0;
    switch (kind_) {
    case ProfileKind::smooth_bump:
        return amplitude_ * bump((s - center_) / half_width_).g1 / half_width_;
    case ProfileKind::rectangular: return 0.0;
    case ProfileKind::tabulated: {
        const std::size_t i = interval(s);
        const double h = nodes_[i + 1] - nodes_[i];
        const double a = (nodes_[i + 1] - s) / h;
        const double b = (s - nodes_[i]) / h;
        return (values_[i + 1] - values_[i]) / h +
               (-(3.0 * a * a - 1.0) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
    }
    }
    return 0.0;
}

double CurvatureProfile::second_derivative(double s) const {
    if (s <= s_lo_ || s >= s_hi_) return 0.0;
    switch (kind_) {
    case ProfileKind::smooth_bump:
        return amplitude_ * bump((s - center_) / half_width_).g2 / (half_width_ * half_width_);
    case ProfileKind::rectangular: return 0.0;
    case ProfileKind::tabulated: {
        const std::size_t i = interval(s);
        const double h = nodes_[i + 1] - nodes_[i];
        const double a = (nodes_[i + 1] - s) / h;
        return a * m_[i] + (1.0 - a) * m_[i + 1];
    }
    }
    return 0.0;
}

double CurvatureProfile::squared_mean(double s, double tol) const {
    if (kind_ != ProfileKind::smooth_bump) {
        if (std::abs(s - s_lo_) <= tol) {
            const double inner = (*this)(s_lo_);
            return 0.5 * inner * inner;
        }
        if (std::abs(s - s_hi_) <= tol) {
            const double inner = (*this)(s_hi_);
            return 0.5 * inner * inner;
        }
    }
    const double g = (*this)(s);
    return g * g;
}

std::vector<double> CurvatureProfile::breakpoints() const {
    if (kind_ == ProfileKind::tabulated) return nodes_;
    return {s_lo_, s_hi_};
}

double CurvatureProfile::sup_abs() const {
    if (kind_ != ProfileKind::tabulated) return std::abs(amplitude_);
    // Spline extrema can overshoot the node values; sample each interval densely.
    double sup = 0.0;
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        for (int j = 0; j <= 64; ++j) {
            const double s = nodes_[i] + (nodes_[i + 1] - nodes_[i]) * j / 64.0;
            sup = std::max(sup, std::abs((*this)(s)));
        }
    }
    return sup;
}

CurvatureProfile CurvatureProfile::scaled(double factor) const {
    CurvatureProfile p = *this;
    p.amplitude_ *= factor;
    for (double& v : p.values_) v *= factor;
    for (double& v : p.m_) v *= factor;
    if (kind_ == ProfileKind::tabulated) p.amplitude_ = std::abs(p.amplitude_);
    return p;
}

double bending_angle(const CurvatureProfile& profile) {
    std::vector<double> cuts = profile.breakpoints();
    cuts.push_back(profile.s_lo());
    cuts.push_back(profile.s_hi());
    if (profile.kind() == ProfileKind::smooth_bump) cuts.push_back(profile.center());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto f = [&](double s) { return profile(s); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i] < profile.s_lo() || cuts[i + 1] > profile.s_hi()) continue;
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            f, cuts[i], cuts[i + 1], 20, 1e-14);
    }
    return total;
}

double ScalingParams::delta() const {
    if (delta_ratio) return *delta_ratio * epsilon;
    return std::pow(epsilon, a);
}

double ScalingParams::deformation_factor() const {
    const double q = 1.0 + 2.0 * epsilon * b;
    if (!(q > 0.0)) throw DomainError("deformation requires 1 + 2 eps b > 0");
    return std::sqrt(q);
}

void ScalingParams::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be positive");
    if (delta_ratio) {
        if (!(*delta_ratio > 0.0 && *delta_ratio < 1.0))
            throw DomainError("delta/epsilon must lie in (0, 1)");
    } else if (!(a > 1.0)) {
        throw DomainError("thinness exponent a must exceed 1 (delta/epsilon < 1)");
    }
    deformation_factor();
}

WaveguideGeometry::WaveguideGeometry(CurvatureProfile profile, double d, double alpha,
                                     ScalingParams scaling)
    : profile_(std::move(profile)), d_(d), alpha_(alpha), scaling_(scaling) {
    if (!(d_ > 0.0)) throw DomainError("half-width d must be positive");
    if (!std::isfinite(alpha_)) throw DomainError("alpha must be finite");
    scaling_.validate();
    const double sup_eta = scaling_.delta_over_epsilon() * scaling_.deformation_factor() *
                           profile_.sup_abs();
    if (!(sup_eta * d_ < 1.0))
        throw DomainError("coordinate validity violated: sup |eta| d >= 1");
}

double WaveguideGeometry::gamma_tilde(double s) const {
    return scaling_.deformation_factor() * profile_(s / scaling_.epsilon);
}

double WaveguideGeometry::gamma_tilde_d1(double s) const {
    return scaling_.deformation_factor() * profile_.derivative(s / scaling_.epsilon);
}

double WaveguideGeometry::gamma_tilde_d2(double s) const {
    return scaling_.deformation_factor() * profile_.second_derivative(s / scaling_.epsilon);
}

double WaveguideGeometry::eta(double s) const {
    return scaling_.delta_over_epsilon() * gamma_tilde(s);
}

double scaled_curvature(const WaveguideGeometry& geometry, double s) {
    return geometry.gamma_tilde(s) / geometry.scaling().epsilon;
}

std::pair<double, double> robin_coefficients(double alpha, double d, double eta) {
    if (!(std::abs(d * eta) < 1.0)) throw DomainError("robin coefficients need |d eta| < 1");
    return {alpha - eta / (2.0 * (1.0 + d * eta)), alpha + eta / (2.0 * (1.0 - d * eta))};
}

std::pair<double, double> robin_coefficients(const WaveguideGeometry& geometry, double s) {
    return robin_coefficients(geometry.alpha(), geometry.d(), geometry.eta(s));
}

}  // namespace wg
