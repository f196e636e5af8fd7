#pragma once

#include <complex>
#include <string>
#include <vector>

namespace wg {

// Cross-section problem: -phi'' = lambda phi on (-d, d) with
//   phi'(d) + alpha1 phi(d) = 0,   -phi'(-d) + alpha2 phi(-d) = 0.

enum class Branch { real, imaginary, zero };
enum class Parity { none, even, odd };

std::string to_string(Branch branch);
std::string to_string(Parity parity);

// One normalized eigenpair. The coefficient pair (c1, c2) depends on the branch:
//   real       lambda = k^2 > 0:   phi = c1 sin(k u) + c2 cos(k u)
//   imaginary  lambda = -kappa^2:  phi = c1 exp(kappa (u - d)) + c2 exp(-kappa (u + d))
//   zero       lambda = 0:         phi = c1 u + c2
// The imaginary-branch form never overflows. Symmetric modes also carry the
// parity and the constant N of phi = N cos(p u) or N sin(p u) (N cosh/sinh on
// the imaginary branch, N u at zero).
struct TransverseMode {
    int index = 0;
    Branch branch = Branch::real;
    double wavenumber = 0.0;  // k, kappa, or 0
    double eigenvalue = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    Parity parity = Parity::none;
    double norm_constant = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double d = 1.0;
    // alpha^2 + eigenvalue evaluated without cancellation (symmetric modes);
    // for other modes it is formed directly.
    double alpha_sq_plus_mu = 0.0;

    std::complex<double> k() const;
    double value(double u) const;
    double derivative(double u) const;
    // |Delta(k)| divided by its natural magnitude; zero modes use Delta(k)/k at k = 0.
    double residual() const;
};

// Delta(k) = (a1 a2 - k^2) sin(2kd) + k (a1 + a2) cos(2kd)
std::complex<double> eigen_condition(double alpha1, double alpha2, double d, std::complex<double> k);

// Delta(k)/k as a function of E = k^2, rescaled by exp(-2 kappa d) for E < 0.
// Real, continuous, sign-faithful; its zeros are exactly the eigenvalues.
double boundary_function(double alpha1, double alpha2, double d, double energy);

// Number of eigenvalues strictly below `energy` (exact Pruefer-angle count).
int count_below(double alpha1, double alpha2, double d, double energy);

// Number of negative eigenvalues. For equal coefficients: 0 for alpha >= 0,
// 1 for -1 <= alpha d < 0, 2 for alpha d < -1.
int negative_count(double alpha1, double alpha2, double d);

TransverseMode symmetric_mode(double alpha, double d, int n);
std::vector<TransverseMode> symmetric_spectrum(double alpha, double d, int n_max);

TransverseMode asymmetric_mode(double alpha1, double alpha2, double d, int n);
std::vector<TransverseMode> asymmetric_spectrum(double alpha1, double alpha2, double d, int n_max);

// Integral kernel of (h_{alpha1,alpha2} - k^2)^{-1}, Im k >= 0, k != 0.
std::complex<double> resolvent_kernel(double alpha1, double alpha2, double d,
                                      std::complex<double> k, double u, double u_prime);

// Second-order coefficient of lambda_n(eta) - mu_n in powers of (d eta) for
// the curvature-perturbed coefficients. Removable singular points
// (alpha, mu) = (0, 0) and (alpha d, mu) = (-1, 0) return their limits
// 1/(4 d^2) and 9/(4 d^2).
double lambda2_coefficient(double alpha, double mu, double d);
// Same, with alpha^2 + mu supplied by the caller (avoids cancellation).
double lambda2_coefficient(double alpha, double mu, double alpha_sq_plus_mu, double d);

struct PerturbationCoefficients {
    int n = 0;
    double mu = 0.0;
    double lambda2 = 0.0;
    // Effective coupling of (beta/eps^2) gamma^2 in the reduced operator:
    // beta = -1/4 + d^2 lambda2.
    double beta = 0.0;
};

PerturbationCoefficients perturbation_coefficients(double alpha, double d, int n);

struct BetaRow {
    double alpha = 0.0;
    int n = 0;
    double mu = 0.0;
    double lambda2 = 0.0;
    double beta = 0.0;
    bool ok = true;
    std::string note;
};

// beta_n(alpha) for every grid point and n = 0..n_max. Failing points are
// flagged (ok = false) instead of aborting the table.
std::vector<BetaRow> beta_table(const std::vector<double>& alpha_grid, double d, int n_max);

}  // namespace wg
