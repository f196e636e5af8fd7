#include "wgraph/waveguide2d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

#include "wgraph/errors.hpp"
#include "wgraph/resonance.hpp"
#include "wgraph/transverse.hpp"

namespace wg {

void Grid2D::validate(int n_max) const {
    s.validate();
    if (n_u < 16) throw DomainError("u-grid needs at least 16 nodes");
    if (!(d > 0.0)) throw DomainError("half-width d must be positive");
    // mode n_max + 1 has about n_max + 2 half-wavelengths across [-d, d]
    if (n_max < 0 || static_cast<double>(n_u - 1) / static_cast<double>(n_max + 2) < 8.0)
        throw DomainError("u-grid does not resolve the transverse modes in use");
}

std::string to_string(WaveguideVariant v) {
    return v == WaveguideVariant::full_H ? "full_H" : "simplified_Hhat";
}

DiscreteWaveguideOperator build_waveguide(const WaveguideGeometry& geometry, WaveguideVariant variant,
                                          int n_context, const Grid2D& grid) {
    if (!geometry.profile().smooth())
        throw DomainError("waveguide2d needs a smooth curvature profile (gamma'' enters the potential)");
    grid.validate(n_context);
    if (std::abs(grid.d - geometry.d()) > 1e-14 * geometry.d()) throw DomainError("grid and geometry disagree on d");

    const ScalingParams& sc = geometry.scaling();
    DiscreteWaveguideOperator op;
    op.grid = grid;
    op.variant = variant;
    op.delta = sc.delta();
    op.epsilon = sc.epsilon;
    op.alpha = geometry.alpha();

    const std::size_t ns = grid.s.intervals;
    const int nu = grid.n_u;
    const double hs = grid.h_s(), hu = grid.h_u();
    const double ihs2 = 1.0 / (hs * hs);
    const double t = 1.0 / (op.delta * op.delta * hu * hu);
    const double eps = sc.epsilon, ratio = sc.delta_over_epsilon();
    const bool full = variant == WaveguideVariant::full_H;

    op.alpha1.resize(ns + 1);
    op.alpha2.resize(ns + 1);
    for (std::size_t i = 0; i <= ns; ++i) {
        const auto [a1, a2] = robin_coefficients(geometry, grid.s_node(i));
        op.alpha1[i] = a1;
        op.alpha2[i] = a2;
    }

    const std::size_t n = grid.unknowns();
    op.diag.assign(n, 0.0);
    op.s_coupling.assign(n, 0.0);
    op.u_coupling.assign(n, 0.0);
    for (std::size_t i = 1; i < ns; ++i) {
        const double s = grid.s_node(i);
        const double eta = geometry.eta(s);
        const double eta_m = geometry.eta(s - 0.5 * hs), eta_p = geometry.eta(s + 0.5 * hs);
        const double g = geometry.gamma_tilde(s);
        const double g1 = geometry.gamma_tilde_d1(s), g2 = geometry.gamma_tilde_d2(s);
        for (int j = 0; j < nu; ++j) {
            const std::size_t p = grid.index(i, j);
            const double w = grid.u_weight(j), u = grid.u_node(j);

            double a_m = 1.0, a_p = 1.0;
            if (full) {
                a_m = 1.0 / ((1.0 + u * eta_m) * (1.0 + u * eta_m));
                a_p = 1.0 / ((1.0 + u * eta_p) * (1.0 + u * eta_p));
            }
            op.diag[p] += w * (a_m + a_p) * ihs2;
            if (i + 1 < ns) op.s_coupling[p] = -w * a_p * ihs2;

            // u-part with the ghost node eliminated; boundary rows already carry w = 1/2
            if (j == 0)
                op.diag[p] += (1.0 + hu * op.alpha2[i]) * t;
            else if (j == nu - 1)
                op.diag[p] += (1.0 + hu * op.alpha1[i]) * t;
            else
                op.diag[p] += 2.0 * t;
            if (j + 1 < nu) op.u_coupling[p] = -t;

            double v;
            if (full) {
                const double q = 1.0 + u * eta;
                v = -g * g / (4.0 * q * q) + ratio * u * g2 / (2.0 * q * q * q) -
                    1.25 * ratio * ratio * u * u * g1 * g1 / (q * q * q * q);
            } else {
                v = -g * g / 4.0;
            }
            op.diag[p] += w * v / (eps * eps);
        }
    }
    return op;
}

std::vector<cplx> DiscreteWaveguideOperator::apply_weighted_shifted(const std::vector<cplx>& psi, cplx sigma) const {
    const std::size_t n = grid.unknowns();
    if (psi.size() != n) throw DomainError("field does not match the grid");
    const std::size_t nu = static_cast<std::size_t>(grid.n_u);
    std::vector<cplx> out(n);
    for (std::size_t p = 0; p < n; ++p) {
        const int j = static_cast<int>(p % nu);
        cplx acc = (diag[p] - sigma * grid.u_weight(j)) * psi[p];
        if (p + nu < n) acc += s_coupling[p] * psi[p + nu];
        if (p >= nu) acc += s_coupling[p - nu] * psi[p - nu];
        if (j + 1 < grid.n_u) acc += u_coupling[p] * psi[p + 1];
        if (j > 0) acc += u_coupling[p - 1] * psi[p - 1];
        out[p] = acc;
    }
    return out;
}

std::vector<cplx> DiscreteWaveguideOperator::apply(const std::vector<cplx>& psi) const {
    std::vector<cplx> out = apply_weighted_shifted(psi, 0.0);
    const std::size_t nu = static_cast<std::size_t>(grid.n_u);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] /= grid.u_weight(static_cast<int>(p % nu));
    return out;
}

cplx DiscreteWaveguideOperator::inner(const std::vector<cplx>& a, const std::vector<cplx>& b) const {
    const std::size_t nu = static_cast<std::size_t>(grid.n_u);
    cplx acc = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) acc += grid.u_weight(static_cast<int>(p % nu)) * std::conj(a[p]) * b[p];
    return acc * grid.h_s() * grid.h_u();
}

namespace {

// Eigenpairs 0..n_max of the weighted Robin column problem, phi orthonormal
// in sum_j w_j h_u phi_j psi_j. Returned column-major: phi[k * n_u + j].
void column_modes(double a1, double a2, const Grid2D& grid, int n_max, std::vector<double>& mu,
                  std::vector<double>& phi) {
    const int nu = grid.n_u;
    const double h = grid.h_u(), ih2 = 1.0 / (h * h);
    std::vector<double> dg(static_cast<std::size_t>(nu)), e(static_cast<std::size_t>(nu - 1));
    for (int j = 0; j < nu; ++j) {
        double kjj = 2.0 * ih2;
        if (j == 0) kjj = (1.0 + h * a2) * ih2;
        if (j == nu - 1) kjj = (1.0 + h * a1) * ih2;
        dg[static_cast<std::size_t>(j)] = kjj / grid.u_weight(j);
    }
    for (int j = 0; j + 1 < nu; ++j)
        e[static_cast<std::size_t>(j)] = -ih2 / std::sqrt(grid.u_weight(j) * grid.u_weight(j + 1));
    std::vector<double> z(static_cast<std::size_t>(nu * nu));
    const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', nu, dg.data(), e.data(), z.data(), nu);
    if (info != 0) throw SolverError("transverse column eigensolver failed");
    mu.assign(dg.begin(), dg.begin() + n_max + 1);
    phi.assign(static_cast<std::size_t>((n_max + 1) * nu), 0.0);
    for (int k = 0; k <= n_max; ++k)
        for (int j = 0; j < nu; ++j)
            phi[static_cast<std::size_t>(k * nu + j)] =
                z[static_cast<std::size_t>(k * nu + j)] / std::sqrt(grid.u_weight(j) * h);
}

}  // namespace

ModeProjector::ModeProjector(const DiscreteWaveguideOperator& op, int n_max) : grid_(op.grid), n_max_(n_max) {
    if (n_max < 0 || n_max >= grid_.n_u) throw DomainError("mode count out of range");
    const int nu = grid_.n_u;
    std::vector<double> phi;
    column_modes(op.alpha, op.alpha, grid_, n_max, flat_mu_, phi);
    flat_phi_.resize(static_cast<std::size_t>(n_max + 1));
    for (int k = 0; k <= n_max; ++k) {
        std::vector<double> v(phi.begin() + k * nu, phi.begin() + (k + 1) * nu);
        double peak = 0.0;
        for (double x : v) peak = std::max(peak, std::abs(x));
        // first clearly nonzero value is made positive
        for (double x : v) {
            if (std::abs(x) > 1e-6 * peak) {
                if (x < 0.0)
                    for (double& y : v) y = -y;
                break;
            }
        }
        flat_phi_[static_cast<std::size_t>(k)] = std::move(v);
    }

    const std::size_t ni = grid_.interior_s();
    col_mu_.resize(ni);
    col_phi_.resize(ni);
    for (std::size_t c = 0; c < ni; ++c) {
        const double a1 = op.alpha1[c + 1], a2 = op.alpha2[c + 1];
        if (a1 == op.alpha && a2 == op.alpha) continue;
        column_modes(a1, a2, grid_, n_max, col_mu_[c], col_phi_[c]);
        for (int k = 0; k <= n_max; ++k) {
            const std::vector<double>& f = flat_phi_[static_cast<std::size_t>(k)];
            double ov = 0.0;
            for (int j = 0; j < nu; ++j) ov += grid_.u_weight(j) * f[static_cast<std::size_t>(j)] * col_phi_[c][static_cast<std::size_t>(k * nu + j)];
            if (ov < 0.0)
                for (int j = 0; j < nu; ++j) col_phi_[c][static_cast<std::size_t>(k * nu + j)] *= -1.0;
        }
    }
}

double ModeProjector::mu(std::size_t i, int n) const {
    const std::size_t c = i - 1;
    return col_mu_[c].empty() ? flat_mu_[static_cast<std::size_t>(n)] : col_mu_[c][static_cast<std::size_t>(n)];
}

double ModeProjector::phi(std::size_t i, int n, int j) const {
    const std::size_t c = i - 1;
    if (col_phi_[c].empty()) return flat_phi_[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)];
    return col_phi_[c][static_cast<std::size_t>(n * grid_.n_u + j)];
}

std::vector<cplx> ModeProjector::lift(const std::vector<cplx>& f, int n) const {
    if (n < 0 || n > n_max_) throw DomainError("mode index out of range");
    if (f.size() != grid_.s.size()) throw DomainError("probe does not match the s-grid");
    std::vector<cplx> F(grid_.unknowns());
    for (std::size_t i = 1; i <= grid_.interior_s(); ++i)
        for (int j = 0; j < grid_.n_u; ++j) F[grid_.index(i, j)] = f[i] * phi(i, n, j);
    return F;
}

std::vector<cplx> ModeProjector::project(const std::vector<cplx>& G, int m) const {
    if (m < 0 || m > n_max_) throw DomainError("mode index out of range");
    if (G.size() != grid_.unknowns()) throw DomainError("field does not match the grid");
    std::vector<cplx> g(grid_.s.size(), 0.0);
    const double hu = grid_.h_u();
    for (std::size_t i = 1; i <= grid_.interior_s(); ++i) {
        cplx acc = 0.0;
        for (int j = 0; j < grid_.n_u; ++j) acc += grid_.u_weight(j) * G[grid_.index(i, j)] * phi(i, m, j);
        g[i] = acc * hu;
    }
    return g;
}

double ModeProjector::orthonormality_defect() const {
    double worst = 0.0;
    const double hu = grid_.h_u();
    for (std::size_t i = 1; i <= grid_.interior_s(); ++i) {
        if (col_phi_[i - 1].empty() && i > 1) continue;  // flat columns are all the same
        for (int a = 0; a <= n_max_; ++a)
            for (int b = a; b <= n_max_; ++b) {
                double acc = 0.0;
                for (int j = 0; j < grid_.n_u; ++j) acc += grid_.u_weight(j) * phi(i, a, j) * phi(i, b, j);
                worst = std::max(worst, std::abs(acc * hu - (a == b ? 1.0 : 0.0)));
            }
    }
    return worst;
}

WaveguideResolvent::WaveguideResolvent(const DiscreteWaveguideOperator& op, const ModeProjector& projector, int n,
                                       cplx z)
    : op_(op),
      sigma_(projector.threshold(n) / (op.delta * op.delta) + z),
      op_norm_(0.0),
      lu_(static_cast<int>(op.grid.unknowns()), op.grid.n_u, op.grid.n_u) {
    if (z.imag() == 0.0) throw DomainError("reduced resolvent needs z off the real axis");
    if (n < 0 || n > projector.n_max()) throw DomainError("mode index out of range");
    const std::size_t N = op.grid.unknowns();
    const std::size_t nu = static_cast<std::size_t>(op.grid.n_u);
    for (std::size_t p = 0; p < N; ++p) {
        const int j = static_cast<int>(p % nu);
        const int ip = static_cast<int>(p);
        const cplx dpp = op.diag[p] - sigma_ * op.grid.u_weight(j);
        lu_.add(ip, ip, dpp);
        double row = std::abs(dpp);
        if (p + nu < N) {
            lu_.add(ip, ip + op.grid.n_u, op.s_coupling[p]);
            lu_.add(ip + op.grid.n_u, ip, op.s_coupling[p]);
            row += std::abs(op.s_coupling[p]);
        }
        if (p >= nu) row += std::abs(op.s_coupling[p - nu]);
        if (j + 1 < op.grid.n_u) {
            lu_.add(ip, ip + 1, op.u_coupling[p]);
            lu_.add(ip + 1, ip, op.u_coupling[p]);
            row += std::abs(op.u_coupling[p]);
        }
        if (j > 0) row += std::abs(op.u_coupling[p - 1]);
        op_norm_ = std::max(op_norm_, row);
    }
    lu_.factor();
}

std::vector<cplx> WaveguideResolvent::solve(const std::vector<cplx>& F, double* backward_error) const {
    const std::size_t N = op_.grid.unknowns();
    if (F.size() != N) throw DomainError("source does not match the grid");
    const std::size_t nu = static_cast<std::size_t>(op_.grid.n_u);
    std::vector<cplx> b(N);
    for (std::size_t p = 0; p < N; ++p) b[p] = op_.grid.u_weight(static_cast<int>(p % nu)) * F[p];
    double bn = 0.0;
    for (const cplx& x : b) bn += std::norm(x);
    bn = std::sqrt(bn);

    std::vector<cplx> G = b;
    lu_.solve(G);
    // The plain ||r|| / ||b|| is floored by rounding at eps_mach ||K|| ||G|| / ||b||,
    // which reaches 1e-9 once delta^-2 h_u^-2 ~ 1e7; the backward error is not.
    auto berr = [&](std::vector<cplx>& r) {
        r = op_.apply_weighted_shifted(G, sigma_);
        double rn = 0.0, gn = 0.0;
        for (std::size_t p = 0; p < N; ++p) {
            r[p] = b[p] - r[p];
            rn += std::norm(r[p]);
            gn += std::norm(G[p]);
        }
        return std::sqrt(rn) / (op_norm_ * std::sqrt(gn) + bn + 1e-300);
    };
    std::vector<cplx> r;
    double err = berr(r);
    for (int it = 0; it < 3 && err > 1e-14; ++it) {
        lu_.solve(r);
        for (std::size_t p = 0; p < N; ++p) G[p] += r[p];
        err = berr(r);
    }
    if (err > 1e-9) {
        std::ostringstream os;
        os << "waveguide solve missed the residual tolerance (backward error " << err << ")";
        throw SolverError(os.str());
    }
    if (backward_error) *backward_error = err;
    return G;
}

std::vector<cplx> reduced_resolvent(const DiscreteWaveguideOperator& op, const ModeProjector& projector, int m,
                                    int n, cplx z, const std::vector<cplx>& f, double* backward_error) {
    const WaveguideResolvent res(op, projector, n, z);
    return projector.project(res.solve(projector.lift(f, n), backward_error), m);
}

double operator_difference_norm(const WaveguideGeometry& geometry, const Grid2D& grid,
                                const std::function<double(double)>& f) {
    const DiscreteWaveguideOperator full = build_waveguide(geometry, WaveguideVariant::full_H, 0, grid);
    const DiscreteWaveguideOperator hat = build_waveguide(geometry, WaveguideVariant::simplified_Hhat, 0, grid);
    const ModeProjector proj(full, 0);
    const std::vector<double>& xi = proj.flat_mode(0);
    std::vector<cplx> psi(grid.unknowns());
    for (std::size_t i = 1; i <= grid.interior_s(); ++i)
        for (int j = 0; j < grid.n_u; ++j) psi[grid.index(i, j)] = f(grid.s_node(i)) * xi[static_cast<std::size_t>(j)];
    std::vector<cplx> a = full.apply(psi);
    const std::vector<cplx> c = hat.apply(psi);
    for (std::size_t p = 0; p < a.size(); ++p) a[p] -= c[p];
    return full.norm(a) / full.norm(psi);
}

namespace {

double s_norm(const std::vector<cplx>& g, double h) {
    double acc = 0.0;
    for (const cplx& x : g) acc += std::norm(x);
    return std::sqrt(acc * h);
}

}  // namespace

ConvergenceReport theorem_check(const CurvatureProfile& profile, double d, double alpha, double b, int n,
                                const WaveguideOptions& options) {
    if (!profile.smooth()) throw DomainError("waveguide2d needs a smooth curvature profile");
    if (n < 0) throw DomainError("mode index must be non-negative");
    if (options.eps_list.empty()) throw DomainError("epsilon list is empty");
    for (std::size_t i = 1; i < options.eps_list.size(); ++i)
        if (!(options.eps_list[i] < options.eps_list[i - 1])) throw DomainError("epsilon list must be strictly decreasing");
    if (options.probes.empty()) throw DomainError("probe set is empty");
    const cplx k = decaying_sqrt(options.z);

    ConvergenceReport rep;
    rep.study = "waveguide2d";
    rep.mode = n;
    rep.delta_ratio = options.delta_ratio;
    rep.b = b;
    rep.z = options.z;
    rep.threshold = options.threshold;
    rep.beta = perturbation_coefficients(alpha, d, n).beta;

    const ResonanceResult res = detect_resonance(Potential1D::from_profile(profile, rep.beta), options.tol_D);
    rep.resonant = res.resonant;
    if (!res.resonant) {
        rep.predicted = GraphOperatorSpec::decoupled();
        rep.alternative = GraphOperatorSpec::free_line();
    } else {
        // the deformed geometry carries (1 + 2 eps b) gamma^2, hence the factor 2
        rep.predicted = b == 0.0 ? GraphOperatorSpec::scale_invariant(res.c_minus, res.c_plus)
                                 : GraphOperatorSpec::deformed(res.c_minus, res.c_plus, 2.0 * b * res.b_hat_per_b);
        rep.alternative = GraphOperatorSpec::decoupled();
    }
    if (options.override_spec) {
        rep.alternative = rep.predicted;
        rep.predicted = *options.override_spec;
        rep.notes.push_back("prediction overridden to " + to_string(rep.predicted.kind));
    }
    rep.predicted_transmission = scattering_matrix(rep.predicted, k).S(1, 0);
    {
        std::ostringstream os;
        os << "factorized protocol: delta/eps fixed at " << options.delta_ratio
           << "; the joint scaling delta = eps^a, a > 3, is not reachable at desk scale";
        rep.notes.push_back(os.str());
        if (n > 0) rep.notes.push_back("off_diagonal measures the closed channel m = n + 1 only");
    }

    const double half_length = truncation_half_length(options.probes, options.z);
    const int n_max = n + 1;
    // Only the closed neighbour m = n + 1: channels m < n are open at
    // sigma ~ mu_n / delta^2, barely damped, and their amplitude depends on the
    // cavity formed by the Dirichlet caps rather than on the bend.
    const std::vector<int> off_modes{n + 1};

    auto run = [&](double eps, const Grid2D& grid, bool light) {
        ScalingParams sc;
        sc.epsilon = eps;
        sc.b = b;
        sc.delta_ratio = options.delta_ratio;
        const WaveguideGeometry geom(profile, d, alpha, sc);
        const DiscreteWaveguideOperator op = build_waveguide(geom, options.variant, n, grid);
        const ModeProjector proj(op, n_max);
        const WaveguideResolvent solver(op, proj, n, options.z);

        EpsilonRow row;
        row.epsilon = eps;
        row.h = grid.h_s();
        row.nodes = grid.unknowns();
        row.off_diagonal = 0.0;
        row.solver_residual = 0.0;
        ProbeScorer scorer(row, grid.s, options.z, rep.predicted, rep.alternative, geom.support_lo(),
                           geom.support_hi());
        for (const Probe& p : options.probes) {
            std::vector<cplx> f(grid.s.size(), 0.0);
            for (std::size_t i = 1; i + 1 < grid.s.size(); ++i) f[i] = p.f(grid.s_node(i));
            double be = 0.0;
            const std::vector<cplx> G = solver.solve(proj.lift(f, n), &be);
            row.solver_residual = std::max(row.solver_residual, be);
            scorer.add(p, f, proj.project(G, n), nullptr, light);
            if (light) continue;
            const double fn = s_norm(f, grid.h_s());
            for (int m : off_modes)
                row.off_diagonal = std::max(row.off_diagonal, s_norm(proj.project(G, m), grid.h_s()) / fn);
        }
        return row;
    };

    for (double eps : options.eps_list) {
        if (!(eps > 0.0)) throw DomainError("epsilon values must be positive");
        Grid2D grid;
        grid.s = Grid1D::with_spacing(half_length, 0.999 * eps * profile.width() / options.s_points_per_width);
        grid.n_u = options.n_u;
        grid.d = d;
        EpsilonRow row = run(eps, grid, false);
        if (options.grid_check) {
            Grid2D fine = grid;
            fine.s.intervals *= 2;
            fine.n_u = 2 * grid.n_u - 1;
            row.error_refined = run(eps, fine, true).error;
        }
        rep.rows.push_back(row);
    }
    rep.extrapolated_vertex_residual = extrapolated_vertex_residual(rep);
    assign_verdict(rep);
    return rep;
}

}  // namespace wg
