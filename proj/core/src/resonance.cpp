#include "wgraph/resonance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <boost/numeric/odeint.hpp>

#include "wgraph/errors.hpp"

namespace wg {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 3>;  // f, f', integral of v f^2

std::vector<double> sorted_cuts(double lo, double hi, const std::vector<double>& bps) {
    std::vector<double> cuts{lo, hi};
    for (double b : bps)
        if (b > lo && b < hi) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

}  // namespace

Potential1D::Potential1D(std::function<double(double)> v, double lo, double hi,
                         std::vector<double> breakpoints, std::string tag)
    : v_(std::move(v)), lo_(lo), hi_(hi), breakpoints_(std::move(breakpoints)), tag_(std::move(tag)) {
    if (!(hi_ >= lo_)) throw DomainError("potential support must satisfy lo <= hi");
    const std::vector<double> cuts = sorted_cuts(lo_, hi_, breakpoints_);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        auto inner = [&](double s) { return v_(std::clamp(s, std::nextafter(a, b), std::nextafter(b, a))); };
        integral_ += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(inner, a, b, 15, 1e-14);
    }
}

Potential1D Potential1D::from_profile(const CurvatureProfile& profile, double beta, double stretch) {
    std::ostringstream tag;
    tag << "beta*gamma^2 beta=" << beta << " profile=" << to_string(profile.kind());
    if (stretch != 1.0) tag << " stretch=" << stretch;
    const double c = beta * stretch;
    return Potential1D([profile, c](double s) { const double g = profile(s); return c * g * g; },
                       profile.s_lo(), profile.s_hi(), profile.breakpoints(), tag.str());
}

Potential1D Potential1D::square_well(double value, double lo, double hi) {
    std::ostringstream tag;
    tag << "square well v=" << value;
    return Potential1D([value, lo, hi](double s) { return s >= lo && s <= hi ? value : 0.0; }, lo, hi,
                       {lo, hi}, tag.str());
}

Potential1D Potential1D::scaled(double eps) const {
    if (!(eps > 0.0)) throw DomainError("scale factor must be positive");
    std::vector<double> bps;
    for (double b : breakpoints_) bps.push_back(eps * b);
    auto v = v_;
    return Potential1D([v, eps](double s) { return v(s / eps) / (eps * eps); }, eps * lo_, eps * hi_,
                       std::move(bps), tag_ + " scaled");
}

Potential1D Potential1D::reflected() const {
    std::vector<double> bps;
    for (double b : breakpoints_) bps.push_back(-b);
    auto v = v_;
    return Potential1D([v](double s) { return v(-s); }, -hi_, -lo_, std::move(bps), tag_ + " reflected");
}

double Potential1D::operator()(double s) const {
    if (s < lo_ || s > hi_) return 0.0;
    return v_(s);
}

ZeroEnergyTrace zero_energy_solve(const Potential1D& v, const ZeroEnergyOptions& options) {
    ZeroEnergyTrace trace;
    const double lo = v.lo(), hi = v.hi();
    if (hi == lo) {
        if (options.samples > 0) {
            trace.s = {lo};
            trace.f = {1.0};
            trace.df = {0.0};
        }
        return trace;
    }

    const std::vector<double> cuts = sorted_cuts(lo, hi, v.breakpoints());
    std::vector<double> times;
    if (options.samples > 0) {
        const int n = std::max(options.samples, 2);
        for (int i = 0; i < n; ++i) times.push_back(lo + (hi - lo) * i / (n - 1));
        times.back() = hi;
    }
    times.insert(times.end(), cuts.begin(), cuts.end());
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    // The step cap keeps the global error near the local tolerance; without it
    // the accuracy of D would depend on how densely the trace is sampled.
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(
        options.tolerance, options.tolerance, (hi - lo) / 1000.0);
    State y{1.0, 0.0, 0.0};
    const bool keep = options.samples > 0;
    if (keep) {
        trace.s.push_back(lo);
        trace.f.push_back(1.0);
        trace.df.push_back(0.0);
    }

    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c], b = cuts[c + 1];
        // One-sided evaluation keeps jumps of v out of the stage points.
        const double a_in = std::nextafter(a, b), b_in = std::nextafter(b, a);
        auto rhs = [&](const State& x, State& dxdt, double s) {
            const double vs = v(std::clamp(s, a_in, b_in));
            dxdt[0] = x[1];
            dxdt[1] = vs * x[0];
            dxdt[2] = vs * x[0] * x[0];
        };
        std::vector<double> seg;
        for (double t : times)
            if (t >= a && t <= b) seg.push_back(t);
        const double dt0 = std::min((b - a) / 64.0, (hi - lo) / 256.0);
        std::size_t obs_count = 0;
        try {
            odeint::integrate_times(stepper, rhs, y, seg.begin(), seg.end(), dt0,
                                    [&](const State& x, double s) {
                                        // the first observation repeats the segment start
                                        if (obs_count++ == 0 || !keep) return;
                                        trace.s.push_back(s);
                                        trace.f.push_back(x[0]);
                                        trace.df.push_back(x[1]);
                                    });
        } catch (const std::exception& e) {
            throw SolverError(std::string("zero-energy integration failed: ") + e.what());
        }
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
            throw SolverError("zero-energy integration produced non-finite values");
    }

    trace.D = y[1];
    trace.f_right = y[0];
    trace.weighted_integral = y[2];
    return trace;
}

ResonanceResult detect_resonance(const Potential1D& v, double tol_D, const ZeroEnergyOptions& options) {
    ZeroEnergyOptions opt = options;
    if (opt.samples <= 0) opt.samples = 2;
    const ZeroEnergyTrace t = zero_energy_solve(v, opt);

    ResonanceResult r;
    r.tol_D = tol_D;
    r.D = t.D;
    r.integral_warning = v.integral_warning();
    double sup = 0.0;
    for (double f : t.f) sup = std::max(sup, std::abs(f));
    const double length = v.hi() - v.lo();
    r.D_scaled = length > 0.0 ? std::abs(t.D) * length / sup : 0.0;
    r.resonant = r.D_scaled < tol_D;
    if (!r.resonant) return r;

    // Pre-normalization (c_-, c_+) = (1, f(hi)), then c_-^2 + c_+^2 = 1.
    const double norm = std::hypot(1.0, t.f_right);
    r.c_minus = 1.0 / norm;
    r.c_plus = t.f_right / norm;
    r.s = t.s;
    r.f_r.resize(t.f.size());
    r.df_r.resize(t.df.size());
    for (std::size_t i = 0; i < t.f.size(); ++i) {
        r.f_r[i] = t.f[i] / norm;
        r.df_r[i] = t.df[i] / norm;
    }
    r.b_hat_per_b = t.weighted_integral / (norm * norm);
    return r;
}

double resonance_residual(const Potential1D& v, const ResonanceResult& r) {
    const std::size_t n = r.s.size();
    if (n < 5) return 0.0;
    const std::vector<double> bps = v.breakpoints();
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double h = r.s[i + 1] - r.s[i];
        bool uniform = true;
        for (std::size_t j = i - 2; j < i + 2; ++j)
            if (std::abs((r.s[j + 1] - r.s[j]) - h) > 1e-9 * h) uniform = false;
        if (!uniform) continue;
        bool crosses = false;
        for (double b : bps)
            if (b > r.s[i - 2] - 1e-12 && b < r.s[i + 2] + 1e-12) crosses = true;
        if (crosses) continue;
        const double d2 = (-r.df_r[i + 2] + 8.0 * r.df_r[i + 1] - 8.0 * r.df_r[i - 1] + r.df_r[i - 2]) / (12.0 * h);
        worst = std::max(worst, std::abs(-d2 + v(r.s[i]) * r.f_r[i]));
    }
    return worst;
}

std::vector<MismatchSample> scan_mismatch(const CurvatureProfile& profile, double beta_lo, double beta_hi,
                                          int samples) {
    if (samples < 1) throw DomainError("scan needs at least one interval");
    if (!(beta_hi > beta_lo)) throw DomainError("scan needs beta_lo < beta_hi");
    ZeroEnergyOptions opt;
    opt.samples = 0;
    std::vector<MismatchSample> out;
    out.reserve(static_cast<std::size_t>(samples) + 1);
    for (int i = 0; i <= samples; ++i) {
        const double beta = beta_lo + (beta_hi - beta_lo) * i / samples;
        out.push_back({beta, zero_energy_solve(Potential1D::from_profile(profile, beta), opt).D});
    }
    return out;
}

std::optional<double> find_resonant_coupling(const CurvatureProfile& profile, double beta_lo, double beta_hi,
                                             int samples) {
    if (!(beta_hi > beta_lo)) throw DomainError("coupling range needs beta_lo < beta_hi");
    if (samples < 1) throw DomainError("coupling scan needs at least one interval");
    if (beta_lo >= 0.0) return std::nullopt;
    ZeroEnergyOptions opt;
    opt.samples = 0;
    auto D = [&](double beta) { return zero_energy_solve(Potential1D::from_profile(profile, beta), opt).D; };

    const double top = std::min(beta_hi, 0.0);
    const double step = (top - beta_lo) / samples;
    // D(0) = 0 identically (free line), so the scan starts one step below 0.
    double b_prev = top == 0.0 ? top - step : top;
    double d_prev = D(b_prev);
    if (d_prev == 0.0) return b_prev;
    const int start = top == 0.0 ? 2 : 1;
    for (int i = start; i <= samples; ++i) {
        const double b = top - step * i;
        const double d = D(b);
        if (d == 0.0) return b;
        if ((d > 0.0) != (d_prev > 0.0)) {
            std::uintmax_t iters = 200;
            auto r = boost::math::tools::toms748_solve(D, b, b_prev, d, d_prev,
                                                       boost::math::tools::eps_tolerance<double>(52), iters);
            const double root = std::abs(D(r.first)) < std::abs(D(r.second)) ? r.first : r.second;
            if (std::abs(D(root)) >= 1e-11)
                throw SolverError("resonant coupling refinement did not reach |D| < 1e-11");
            return root;
        }
        b_prev = b;
        d_prev = d;
    }
    return std::nullopt;
}

}  // namespace wg
