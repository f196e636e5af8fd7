#include "wgraph/transverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "wgraph/errors.hpp"

namespace wg {

namespace {

constexpr double pi = std::numbers::pi;

// sin(y)/y
double sinc(double y) {
    if (std::abs(y) < 1e-4) return 1.0 - y * y / 6.0;
    return std::sin(y) / y;
}

// 1 - sin(y)/y without cancellation near 0.
double one_minus_sinc(double y) {
    if (std::abs(y) < 0.5) {
        const double y2 = y * y;
        return y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0 * (1.0 - y2 / 72.0 * (1.0 - y2 / 110.0))));
    }
    return 1.0 - std::sin(y) / y;
}

// exp(-y) (sinh(y)/y - 1) for y >= 0.
double scaled_shc_minus_one(double y) {
    if (y < 0.5) {
        const double y2 = y * y;
        const double series =
            y2 / 6.0 * (1.0 + y2 / 20.0 * (1.0 + y2 / 42.0 * (1.0 + y2 / 72.0 * (1.0 + y2 / 110.0))));
        return std::exp(-y) * series;
    }
    return -std::expm1(-2.0 * y) / (2.0 * y) - std::exp(-y);
}

double norm_squared(Branch branch, double w, double c1, double c2, double d) {
    switch (branch) {
    case Branch::real: {
        const double y = 2.0 * w * d;
        return c1 * c1 * d * one_minus_sinc(y) + c2 * c2 * d * (1.0 + sinc(y));
    }
    case Branch::imaginary: {
        const double y = 2.0 * w * d;
        const double ch = c1 + c2;
        const double sh = c1 - c2;
        const double cosh_part = d * (std::exp(-y) - std::expm1(-2.0 * y) / (2.0 * y));
        return ch * ch * cosh_part + sh * sh * d * scaled_shc_minus_one(y);
    }
    case Branch::zero: return c1 * c1 * 2.0 * d * d * d / 3.0 + c2 * c2 * 2.0 * d;
    }
    return 0.0;
}

double mode_value(Branch branch, double w, double c1, double c2, double d, double u) {
    switch (branch) {
    case Branch::real: return c1 * std::sin(w * u) + c2 * std::cos(w * u);
    case Branch::imaginary: return c1 * std::exp(w * (u - d)) + c2 * std::exp(-w * (u + d));
    case Branch::zero: return c1 * u + c2;
    }
    return 0.0;
}

double mode_derivative(Branch branch, double w, double c1, double c2, double d, double u) {
    switch (branch) {
    case Branch::real: return w * (c1 * std::cos(w * u) - c2 * std::sin(w * u));
    case Branch::imaginary: return w * (c1 * std::exp(w * (u - d)) - c2 * std::exp(-w * (u + d)));
    case Branch::zero: return c1;
    }
    return 0.0;
}

void normalize(TransverseMode& m) {
    const double nrm = std::sqrt(norm_squared(m.branch, m.wavenumber, m.c1, m.c2, m.d));
    if (!(nrm > 0.0) || !std::isfinite(nrm))
        throw SolverError("transverse mode normalization failed");
    m.c1 /= nrm;
    m.c2 /= nrm;
}

// Coefficients from whichever boundary row is better conditioned.
void coefficients_from_boundary(TransverseMode& m) {
    const double a1 = m.alpha1, a2 = m.alpha2, d = m.d, w = m.wavenumber;
    double r1[2] = {0.0, 0.0}, r2[2] = {0.0, 0.0};
    switch (m.branch) {
    case Branch::real: {
        const double s = std::sin(w * d), c = std::cos(w * d);
        r1[0] = w * c + a1 * s;
        r1[1] = -w * s + a1 * c;
        r2[0] = -w * c - a2 * s;
        r2[1] = -w * s + a2 * c;
        break;
    }
    case Branch::imaginary: {
        const double e = std::exp(-2.0 * w * d);
        r1[0] = w + a1;
        r1[1] = e * (a1 - w);
        r2[0] = e * (a2 - w);
        r2[1] = w + a2;
        break;
    }
    case Branch::zero:
        r1[0] = 1.0 + a1 * d;
        r1[1] = a1;
        r2[0] = -1.0 - a2 * d;
        r2[1] = a2;
        break;
    }
    const double n1 = std::hypot(r1[0], r1[1]);
    const double n2 = std::hypot(r2[0], r2[1]);
    const double* r = n1 >= n2 ? r1 : r2;
    m.c1 = -r[1];
    m.c2 = r[0];
    normalize(m);
    // Sign: phi(-d) > 0, or phi'(-d) > 0 when phi(-d) vanishes.
    const double v = m.value(-d);
    const double dv = m.derivative(-d);
    const bool flip = std::abs(v) > 1e-12 * std::max(1.0, std::abs(dv) * d) ? v < 0.0 : dv < 0.0;
    if (flip) {
        m.c1 = -m.c1;
        m.c2 = -m.c2;
    }
}

double scaled_residual(const TransverseMode& m) {
    const double a1 = m.alpha1, a2 = m.alpha2, d = m.d, w = m.wavenumber;
    const double mag = std::abs(a1 * a2) + w * w + w * (std::abs(a1) + std::abs(a2));
    switch (m.branch) {
    case Branch::real:
        return std::abs(eigen_condition(a1, a2, d, w)) / std::max(mag, 1e-300);
    case Branch::imaginary: {
        const double e = std::exp(-4.0 * w * d);
        const double r = (a1 * a2 + w * w) * (1.0 - e) / 2.0 + w * (a1 + a2) * (1.0 + e) / 2.0;
        return std::abs(r) / std::max(mag, 1e-300);
    }
    case Branch::zero:
        return std::abs(a1 + a2 + 2.0 * d * a1 * a2) /
               (std::abs(a1) + std::abs(a2) + 2.0 * d * std::abs(a1 * a2) + 1.0 / d);
    }
    return 0.0;
}

template <class F>
double bracketed_root(F f, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw BracketError("root bracket has no sign change");
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                               boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace

std::string to_string(Branch branch) {
    switch (branch) {
    case Branch::real: return "real";
    case Branch::imaginary: return "imaginary";
    case Branch::zero: return "zero";
    }
    return "unknown";
}

std::string to_string(Parity parity) {
    switch (parity) {
    case Parity::none: return "none";
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    }
    return "unknown";
}

std::complex<double> TransverseMode::k() const {
    switch (branch) {
    case Branch::real: return {wavenumber, 0.0};
    case Branch::imaginary: return {0.0, wavenumber};
    case Branch::zero: return {0.0, 0.0};
    }
    return {};
}

double TransverseMode::value(double u) const { return mode_value(branch, wavenumber, c1, c2, d, u); }

double TransverseMode::derivative(double u) const {
    return mode_derivative(branch, wavenumber, c1, c2, d, u);
}

double TransverseMode::residual() const { return scaled_residual(*this); }

std::complex<double> eigen_condition(double alpha1, double alpha2, double d, std::complex<double> k) {
    return (alpha1 * alpha2 - k * k) * std::sin(2.0 * k * d) +
           k * (alpha1 + alpha2) * std::cos(2.0 * k * d);
}

double boundary_function(double alpha1, double alpha2, double d, double energy) {
    const double p = alpha1 * alpha2;
    const double s = alpha1 + alpha2;
    if (energy > 0.0) {
        const double k = std::sqrt(energy);
        return (p - energy) * 2.0 * d * sinc(2.0 * k * d) + s * std::cos(2.0 * k * d);
    }
    if (energy < 0.0) {
        const double kappa = std::sqrt(-energy);
        const double e = std::exp(-4.0 * kappa * d);
        const double sh = kappa * d < 1e-8 ? 2.0 * d : -std::expm1(-4.0 * kappa * d) / (2.0 * kappa);
        return (p - energy) * sh + s * (1.0 + e) / 2.0;
    }
    return 2.0 * d * p + s;
}

int count_below(double alpha1, double alpha2, double d, double energy) {
    // Shoot from -d with phi = 1, phi' = alpha2; the Pruefer angle
    // theta = arg(phi' + i phi) increases with energy and crosses multiples of
    // pi exactly at zeros of phi.
    const double x = 2.0 * d;
    double phi, dphi;
    int zeros = 0;
    if (energy > 0.0) {
        const double k = std::sqrt(energy);
        phi = std::cos(k * x) + alpha2 * x * sinc(k * x);
        dphi = -k * std::sin(k * x) + alpha2 * std::cos(k * x);
        const double shift = std::atan(alpha2 / k);
        const double first = shift + pi / 2.0;
        if (k * x > first) zeros = static_cast<int>(std::floor((k * x - first) / pi)) + 1;
    } else if (energy < 0.0) {
        const double kappa = std::sqrt(-energy);
        const double e = std::exp(-2.0 * kappa * x);
        const double sh = -std::expm1(-2.0 * kappa * x) / 2.0;
        phi = (1.0 + e) / 2.0 + alpha2 / kappa * sh;
        dphi = kappa * sh + alpha2 * (1.0 + e) / 2.0;
        if (alpha2 < 0.0 && kappa < -alpha2 && std::atanh(kappa / -alpha2) / kappa < x) zeros = 1;
    } else {
        phi = 1.0 + alpha2 * x;
        dphi = alpha2;
        if (alpha2 < 0.0 && -1.0 / alpha2 < x) zeros = 1;
    }
    double frac = std::atan2(phi, dphi);
    if (frac <= 0.0) frac += pi;
    const double theta = zeros * pi + frac;
    const double theta_right = std::atan2(1.0, -alpha1);
    if (theta <= theta_right) return 0;
    return static_cast<int>(std::floor((theta - theta_right) / pi)) + 1;
}

int negative_count(double alpha1, double alpha2, double d) {
    int n = count_below(alpha1, alpha2, d, 0.0);
    // A zero eigenvalue sits exactly at the count threshold; do not let
    // rounding promote it to a negative one.
    const double z = alpha1 + alpha2 + 2.0 * d * alpha1 * alpha2;
    if (std::abs(z) <= 1e-14 * (std::abs(alpha1) + std::abs(alpha2) + 2.0 * d * std::abs(alpha1 * alpha2)) &&
        n > 0 && count_below(alpha1, alpha2, d, -1e-12 / (d * d)) < n)
        --n;
    return n;
}

TransverseMode symmetric_mode(double alpha, double d, int n) {
    if (!(d > 0.0)) throw DomainError("half-width d must be positive");
    if (n < 0) throw DomainError("mode index must be non-negative");
    if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");

    TransverseMode m;
    m.index = n;
    m.alpha1 = m.alpha2 = alpha;
    m.d = d;
    m.parity = n % 2 == 0 ? Parity::even : Parity::odd;
    const bool even = m.parity == Parity::even;
    const double ad = alpha * d;

    auto finish_real = [&](double p) {
        m.branch = Branch::real;
        m.wavenumber = p;
        m.eigenvalue = p * p;
        m.alpha_sq_plus_mu = alpha * alpha + p * p;
        m.c1 = even ? 0.0 : 1.0;
        m.c2 = even ? 1.0 : 0.0;
        normalize(m);
        m.norm_constant = even ? m.c2 : m.c1;
    };

    if (alpha == 0.0) {
        if (n == 0) {
            m.branch = Branch::zero;
            m.c1 = 0.0;
            m.c2 = 1.0;
            normalize(m);
            m.norm_constant = m.c2;
            return m;
        }
        finish_real(n * pi / (2.0 * d));
        return m;
    }

    const double a = -alpha;
    if (alpha < 0.0 && n == 0) {
        // kappa tanh(kappa d) = a on [a, a / tanh(a d)]
        const double kappa = bracketed_root([&](double k) { return k * std::tanh(k * d) - a; }, a,
                                            a / std::tanh(a * d));
        m.branch = Branch::imaginary;
        m.wavenumber = kappa;
        m.eigenvalue = -kappa * kappa;
        // a - kappa = -2 kappa / (exp(2 kappa d) + 1)
        m.alpha_sq_plus_mu = -2.0 * kappa / (std::exp(2.0 * kappa * d) + 1.0) * (a + kappa);
        m.c1 = 1.0;
        m.c2 = 1.0;
        normalize(m);
        m.norm_constant = 2.0 * m.c1 * std::exp(-kappa * d);
        return m;
    }
    if (alpha < 0.0 && n == 1 && ad <= -1.0) {
        if (ad == -1.0) {
            m.branch = Branch::zero;
            m.c1 = 1.0;
            m.c2 = 0.0;
            normalize(m);
            m.norm_constant = m.c1;
            m.alpha_sq_plus_mu = alpha * alpha;
            return m;
        }
        // kappa coth(kappa d) = a, written as 1 - a tanh(kappa d)/kappa = 0 on (0, a]
        auto g = [&](double k) { return 1.0 - a * d * std::tanh(k * d) / (k * d); };
        const double lo = std::min(1e-8 / d, a * 1e-8);
        const double kappa = bracketed_root(g, lo, a);
        m.branch = Branch::imaginary;
        m.wavenumber = kappa;
        m.eigenvalue = -kappa * kappa;
        // a - kappa = 2 kappa / (exp(2 kappa d) - 1)
        m.alpha_sq_plus_mu = 2.0 * kappa / std::expm1(2.0 * kappa * d) * (a + kappa);
        m.c1 = 1.0;
        m.c2 = -1.0;
        normalize(m);
        m.norm_constant = 2.0 * m.c1 * std::exp(-kappa * d);
        return m;
    }

    // Real branch: Theta(p) = p d + atan2(p, alpha) = (n + 1) pi / 2. Theta is
    // monotone on the bracket below (for n = 1, alpha < 0 it starts at the
    // minimum of Theta).
    const double level = (n + 1) * pi / 2.0;
    auto theta = [&](double p) { return p * d + std::atan2(p, alpha) - level; };
    double lo = std::max(0.0, (level - pi) / d);
    const double hi = level / d;
    if (alpha < 0.0 && n == 1) lo = std::sqrt(a / d - a * a);
    if (lo == 0.0) lo = std::min(1e-300, hi);
    finish_real(bracketed_root(theta, lo, hi));
    return m;
}

std::vector<TransverseMode> symmetric_spectrum(double alpha, double d, int n_max) {
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    std::vector<TransverseMode> modes;
    modes.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) modes.push_back(symmetric_mode(alpha, d, n));
    for (std::size_t i = 1; i < modes.size(); ++i)
        if (!(modes[i].eigenvalue > modes[i - 1].eigenvalue))
            throw BracketError("symmetric spectrum out of Sturm order");
    return modes;
}

TransverseMode asymmetric_mode(double alpha1, double alpha2, double d, int n) {
    if (!(d > 0.0)) throw DomainError("half-width d must be positive");
    if (n < 0) throw DomainError("mode index must be non-negative");
    if (!std::isfinite(alpha1) || !std::isfinite(alpha2)) throw DomainError("alpha must be finite");

    TransverseMode m;
    m.index = n;
    m.alpha1 = alpha1;
    m.alpha2 = alpha2;
    m.d = d;

    const int n_neg = negative_count(alpha1, alpha2, d);
    const double zc = alpha1 + alpha2 + 2.0 * d * alpha1 * alpha2;
    const bool zero_root =
        std::abs(zc) <= 1e-14 * (std::abs(alpha1) + std::abs(alpha2) + 2.0 * d * std::abs(alpha1 * alpha2)) ||
        zc == 0.0;
    if (zero_root && n == n_neg) {
        m.branch = Branch::zero;
        m.eigenvalue = 0.0;
        m.wavenumber = 0.0;
        coefficients_from_boundary(m);
        return m;
    }

    // Bracket [lo, hi] with exactly one eigenvalue: count(lo) = n, count(hi) = n + 1.
    const double unit = 1.0 / (d * d);
    double hi = std::pow((n + 1) * pi / (2.0 * d), 2) + unit;
    while (count_below(alpha1, alpha2, d, hi) <= n) hi = 2.0 * hi + unit;
    double lo = n >= 2 ? std::pow((n - 2) * pi / (2.0 * d), 2) : 0.0;
    if (n < n_neg || lo <= 0.0) {
        const double amax = std::max({0.0, -alpha1, -alpha2});
        lo = -(amax * amax + unit) * 4.0;
    }
    for (int guard = 0; count_below(alpha1, alpha2, d, lo) > n; ++guard) {
        lo = lo > 0.0 ? 0.0 : 4.0 * lo - unit;
        if (guard > 200) throw BracketError("lower eigenvalue bracket not found");
    }
    for (int it = 0; it < 200; ++it) {
        if (count_below(alpha1, alpha2, d, lo) == n && count_below(alpha1, alpha2, d, hi) == n + 1) break;
        const double mid = 0.5 * (lo + hi);
        if (count_below(alpha1, alpha2, d, mid) <= n)
            lo = mid;
        else
            hi = mid;
    }
    if (count_below(alpha1, alpha2, d, lo) != n || count_below(alpha1, alpha2, d, hi) != n + 1)
        throw BracketError("eigenvalue isolation failed");

    const double e = bracketed_root([&](double x) { return boundary_function(alpha1, alpha2, d, x); }, lo, hi);
    m.eigenvalue = e;
    if (e > 0.0) {
        m.branch = Branch::real;
        m.wavenumber = std::sqrt(e);
    } else if (e < 0.0) {
        m.branch = Branch::imaginary;
        m.wavenumber = std::sqrt(-e);
    } else {
        m.branch = Branch::zero;
        m.wavenumber = 0.0;
    }
    coefficients_from_boundary(m);
    // mean coefficient stands in for alpha
    m.alpha_sq_plus_mu = 0.25 * (alpha1 + alpha2) * (alpha1 + alpha2) + e;
    return m;
}

std::vector<TransverseMode> asymmetric_spectrum(double alpha1, double alpha2, double d, int n_max) {
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    std::vector<TransverseMode> modes;
    modes.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) modes.push_back(asymmetric_mode(alpha1, alpha2, d, n));
    return modes;
}

std::complex<double> resolvent_kernel(double alpha1, double alpha2, double d, std::complex<double> k,
                                      double u, double u_prime) {
    if (k.imag() < 0.0) throw BranchError("resolvent kernel needs Im k >= 0");
    if (std::abs(k) == 0.0) throw DomainError("resolvent kernel needs k != 0");
    const std::complex<double> c2 = std::cos(2.0 * k * d);
    const std::complex<double> delta = eigen_condition(alpha1, alpha2, d, k);
    const double growth = std::cosh(2.0 * k.imag() * d);
    const double mag = (std::abs(alpha1 * alpha2) + std::norm(k) + std::abs(k) * (std::abs(alpha1) + std::abs(alpha2))) *
                       growth;
    if (std::abs(delta) < 1e-10 * mag) throw NearSpectrumError("k^2 too close to the transverse spectrum");
    if (std::abs(c2) < 1e-10 * growth) throw NearSpectrumError("cos(2kd) too close to zero");

    const double p = alpha1 * alpha2;
    const std::complex<double> two_k = 2.0 * k;
    const std::complex<double> t1 = std::sin(k * (2.0 * d - std::abs(u - u_prime))) / (two_k * c2);
    const std::complex<double> t2 =
        (k * (alpha1 - alpha2) * std::sin(k * (u + u_prime)) - (p + k * k) * std::cos(k * (u + u_prime))) /
        (two_k * delta);
    const std::complex<double> t3 = (p - k * k) * std::cos(k * (u - u_prime)) / (two_k * c2 * delta);
    return t1 - t2 - t3;
}

double lambda2_coefficient(double alpha, double mu, double alpha_sq_plus_mu, double d) {
    if (!(d > 0.0)) throw DomainError("half-width d must be positive");
    if (mu == 0.0 && alpha == 0.0) return 1.0 / (4.0 * d * d);
    if (mu == 0.0 && alpha * d == -1.0) return 9.0 / (4.0 * d * d);
    const double q = alpha_sq_plus_mu;
    const double f = alpha + d * q;
    if (q != 0.0 && std::abs(f) <= 1e-13 * (std::abs(alpha) + d * std::abs(q)))
        throw NearSpectrumError("lambda2: alpha + d (alpha^2 + mu) vanishes");
    // q may underflow to a signed zero deep in the anomalous regime; the
    // quotient is then the correctly signed infinity.
    return -mu * (alpha - 2.0 * d * q) / (2.0 * d * d * q * f);
}

double lambda2_coefficient(double alpha, double mu, double d) {
    return lambda2_coefficient(alpha, mu, alpha * alpha + mu, d);
}

PerturbationCoefficients perturbation_coefficients(double alpha, double d, int n) {
    const TransverseMode m = symmetric_mode(alpha, d, n);
    PerturbationCoefficients pc;
    pc.n = n;
    pc.mu = m.eigenvalue;
    pc.lambda2 = lambda2_coefficient(alpha, m.eigenvalue, m.alpha_sq_plus_mu, d);
    pc.beta = -0.25 + d * d * pc.lambda2;
    return pc;
}

std::vector<BetaRow> beta_table(const std::vector<double>& alpha_grid, double d, int n_max) {
    if (n_max < 0) throw DomainError("n_max must be non-negative");
    if (!(d > 0.0)) throw DomainError("half-width d must be positive");
    std::vector<BetaRow> rows;
    rows.reserve(alpha_grid.size() * static_cast<std::size_t>(n_max + 1));
    for (double alpha : alpha_grid) {
        for (int n = 0; n <= n_max; ++n) {
            BetaRow row;
            row.alpha = alpha;
            row.n = n;
            try {
                const PerturbationCoefficients pc = perturbation_coefficients(alpha, d, n);
                row.mu = pc.mu;
                row.lambda2 = pc.lambda2;
                row.beta = pc.beta;
                if (!std::isfinite(pc.beta)) {
                    row.ok = false;
                    row.note = "beyond double range";
                }
            } catch (const Error& e) {
                row.ok = false;
                row.mu = row.lambda2 = row.beta = std::numeric_limits<double>::quiet_NaN();
                row.note = e.what();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace wg
