#pragma once

// Reference computations that share no code path with the library. Each one
// reaches the same quantity by a different construction.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

using cplx = std::complex<double>;

// Green's function of -d^2/du^2 - E on (-d, d) with
//   y'(d) + a1 y(d) = 0,  -y'(-d) + a2 y(-d) = 0
// from two boundary-adapted solutions and their Wronskian. K = sqrt(-E), any branch.
inline cplx wronskian_green(double a1, double a2, double d, cplx E, double u, double v) {
    const cplx K = std::sqrt(-E);
    auto yl = [&](double x) { return std::cosh(K * (x + d)) + a2 * (K == 0.0 ? x + d : std::sinh(K * (x + d)) / K); };
    auto dyl = [&](double x) { return K * std::sinh(K * (x + d)) + a2 * std::cosh(K * (x + d)); };
    auto yr = [&](double x) { return std::cosh(K * (d - x)) + a1 * (K == 0.0 ? d - x : std::sinh(K * (d - x)) / K); };
    auto dyr = [&](double x) { return -K * std::sinh(K * (d - x)) - a1 * std::cosh(K * (d - x)); };
    const double x0 = 0.0;
    const cplx w = dyl(x0) * yr(x0) - yl(x0) * dyr(x0);
    const double lo = std::min(u, v), hi = std::max(u, v);
    return yl(lo) * yr(hi) / w;
}

// Dense second-order FD matrix of the Robin problem on n nodes (ghost points
// eliminated, symmetrized). Returns its eigenvalues, ascending.
inline Eigen::VectorXd fd_robin_eigenvalues(double a1, double a2, double d, int n) {
    const double h = 2.0 * d / (n - 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        A(j, j) = 2.0 / (h * h);
        if (j > 0) A(j, j - 1) = -1.0 / (h * h);
        if (j + 1 < n) A(j, j + 1) = -1.0 / (h * h);
    }
    A(0, 1) = -2.0 / (h * h);
    A(0, 0) += 2.0 * a2 / h;
    A(n - 1, n - 2) = -2.0 / (h * h);
    A(n - 1, n - 1) += 2.0 * a1 / h;
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXd ev = es.eigenvalues().real();
    std::sort(ev.data(), ev.data() + ev.size());
    return ev;
}

// Adaptive Gauss-Kronrod on [a, b] for a complex integrand.
inline cplx integrate(const std::function<cplx(double)>& f, double a, double b) {
    using boost::math::quadrature::gauss_kronrod;
    const double re = gauss_kronrod<double, 31>::integrate([&](double x) { return f(x).real(); }, a, b, 12, 1e-14);
    const double im = gauss_kronrod<double, 31>::integrate([&](double x) { return f(x).imag(); }, a, b, 12, 1e-14);
    return {re, im};
}

// Zero-energy solution of f'' = v f by classical RK4 with fixed step, f(lo)=1, f'(lo)=0.
// Returns (f(hi), f'(hi)).
inline std::pair<double, double> rk4_zero_energy(const std::function<double(double)>& v, double lo, double hi,
                                                 int steps) {
    double f = 1.0, g = 0.0;
    const double h = (hi - lo) / steps;
    for (int i = 0; i < steps; ++i) {
        const double s = lo + i * h;
        const double k1f = g, k1g = v(s) * f;
        const double k2f = g + 0.5 * h * k1g, k2g = v(s + 0.5 * h) * (f + 0.5 * h * k1f);
        const double k3f = g + 0.5 * h * k2g, k3g = v(s + 0.5 * h) * (f + 0.5 * h * k2f);
        const double k4f = g + h * k3g, k4g = v(s + h) * (f + h * k3f);
        f += h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);
        g += h / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g);
    }
    return {f, g};
}

}  // namespace oracle
