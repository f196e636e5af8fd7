#include "wgraph/effective_1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <lapacke.h>

#include "wgraph/errors.hpp"
#include "wgraph/resonance.hpp"

namespace wg {

namespace {

constexpr cplx I{0.0, 1.0};

double bump_shape(double s, double c, double w) {
    const double t = (s - c) / w;
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

// L2 norm with node weight h over nodes selected by `keep`.
template <class Keep>
double l2(const std::vector<cplx>& g, const Grid1D& grid, Keep keep) {
    double acc = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
        if (keep(grid.node(j))) acc += std::norm(g[j]);
    return std::sqrt(acc * grid.h());
}

double l2_diff(const std::vector<cplx>& a, const std::vector<cplx>& b, const Grid1D& grid, bool outer_only) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (outer_only && std::abs(grid.node(j)) <= 1.0) continue;
        acc += std::norm(a[j] - b[j]);
    }
    return std::sqrt(acc * grid.h());
}

}  // namespace

void Grid1D::validate() const {
    if (!(half_length > 0.0)) throw DomainError("grid half-length must be positive");
    if (intervals < 8 || intervals % 2 != 0) throw DomainError("grid interval count must be even and >= 8");
}

Grid1D Grid1D::with_spacing(double half_length, double h_max) {
    if (!(half_length > 0.0) || !(h_max > 0.0)) throw DomainError("grid needs positive length and spacing");
    std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * half_length / h_max));
    if (n % 2) ++n;
    n = std::max<std::size_t>(n, 8);
    return {half_length, n};
}

Discrete1DOperator build_h_n_eps(const CurvatureProfile& profile, double beta, double eps, double b,
                                 const Grid1D& grid) {
    grid.validate();
    if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
    if (!(1.0 + eps * b > 0.0)) throw DomainError("deformation requires 1 + eps b > 0");
    const double h = grid.h();
    if (!(h < eps * profile.width() / 50.0))
        throw DomainError("under-resolved potential: h must be below eps * support width / 50");
    Discrete1DOperator op;
    op.grid = grid;
    op.epsilon = eps;
    op.beta = beta;
    op.b = b;
    op.profile_tag = to_string(profile.kind());
    op.potential.resize(grid.size());
    const double c = beta * (1.0 + eps * b) / (eps * eps);
    const double tol = 1e-9 * h / eps;
    for (std::size_t j = 0; j < grid.size(); ++j) op.potential[j] = c * profile.squared_mean(grid.node(j) / eps, tol);
    return op;
}

Discrete1DOperator free_operator(const Grid1D& grid) {
    grid.validate();
    Discrete1DOperator op;
    op.grid = grid;
    op.potential.assign(grid.size(), 0.0);
    op.profile_tag = "free";
    return op;
}

std::vector<cplx> apply_shifted(const Discrete1DOperator& op, cplx z, const std::vector<cplx>& g) {
    const std::size_t n = op.grid.size();
    if (g.size() != n) throw DomainError("vector does not match the grid");
    const double ih2 = 1.0 / (op.grid.h() * op.grid.h());
    std::vector<cplx> out(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const cplx left = j > 1 ? g[j - 1] : cplx(0.0);
        const cplx right = j + 2 < n ? g[j + 1] : cplx(0.0);
        out[j] = (2.0 * g[j] - left - right) * ih2 + (op.potential[j] - z) * g[j];
    }
    return out;
}

namespace {

std::vector<cplx> thomas(const Discrete1DOperator& op, cplx z, const std::vector<cplx>& f) {
    const std::size_t n = op.grid.size();
    const double ih2 = 1.0 / (op.grid.h() * op.grid.h());
    const double off = -ih2;
    std::vector<cplx> cp(n, 0.0), fp(n, 0.0), g(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        cplx m = 2.0 * ih2 + op.potential[j] - z;
        cplx rhs = f[j];
        if (j > 1) {
            m -= off * cp[j - 1];
            rhs -= off * fp[j - 1];
        }
        if (std::abs(m) < 1e-300 * ih2) throw SolverError("singular pivot in tridiagonal solve");
        cp[j] = off / m;
        fp[j] = rhs / m;
    }
    for (std::size_t j = n - 1; j-- > 1;) g[j] = fp[j] - (j + 2 < n ? cp[j] * g[j + 1] : cplx(0.0));
    return g;
}

}  // namespace

std::vector<cplx> resolvent_solve(const Discrete1DOperator& op, cplx z, const std::vector<cplx>& f,
                                  double* residual) {
    const std::size_t n = op.grid.size();
    if (f.size() != n) throw DomainError("right-hand side does not match the grid");
    if (z.imag() == 0.0) throw DomainError("resolvent_solve needs z off the real axis");
    std::vector<cplx> g = thomas(op, z, f);

    // Backward error ||r|| / (||H - z|| ||g|| + ||f||); the plain ||r||/||f||
    // is bounded below by rounding of order eps_mach / (h^2 |z|).
    const double ih2 = 1.0 / (op.grid.h() * op.grid.h());
    double vmax = 0.0;
    for (double v : op.potential) vmax = std::max(vmax, std::abs(v));
    const double op_norm = 4.0 * ih2 + vmax + std::abs(z);
    auto backward_error = [&](const std::vector<cplx>& x, std::vector<cplx>& r) {
        r = apply_shifted(op, z, x);
        double rn = 0.0, xn = 0.0, fn = 0.0;
        for (std::size_t j = 1; j + 1 < n; ++j) {
            r[j] -= f[j];
            rn += std::norm(r[j]);
            xn += std::norm(x[j]);
            fn += std::norm(f[j]);
        }
        return std::sqrt(rn) / (op_norm * std::sqrt(xn) + std::sqrt(fn) + 1e-300);
    };
    std::vector<cplx> r;
    double err = backward_error(g, r);
    for (int it = 0; it < 2 && err > 1e-14; ++it) {
        const std::vector<cplx> c = thomas(op, z, r);
        for (std::size_t j = 0; j < n; ++j) g[j] -= c[j];
        err = backward_error(g, r);
    }
    if (err > 1e-12) throw SolverError("tridiagonal solve missed the residual tolerance");
    if (residual) *residual = err;
    return g;
}

std::vector<double> lowest_eigenvalues(const Discrete1DOperator& op, int count) {
    const lapack_int n = static_cast<lapack_int>(op.grid.size()) - 2;
    if (count < 1 || count > n) throw DomainError("eigenvalue count out of range");
    const double ih2 = 1.0 / (op.grid.h() * op.grid.h());
    std::vector<double> d(static_cast<std::size_t>(n)), e(static_cast<std::size_t>(n - 1), -ih2);
    for (lapack_int j = 0; j < n; ++j) d[static_cast<std::size_t>(j)] = 2.0 * ih2 + op.potential[static_cast<std::size_t>(j) + 1];
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<lapack_int> iblock(static_cast<std::size_t>(n)), isplit(static_cast<std::size_t>(n));
    lapack_int m = 0, nsplit = 0;
    const lapack_int info = LAPACKE_dstebz('I', 'E', n, 0.0, 0.0, 1, count, 0.0, d.data(), e.data(), &m, &nsplit,
                                           w.data(), iblock.data(), isplit.data());
    if (info != 0 || m != count) throw SolverError("tridiagonal eigenvalue bisection failed");
    w.resize(static_cast<std::size_t>(m));
    return w;
}

cplx discrete_wavenumber(cplx z, double h) {
    cplx k = std::acos(1.0 - z * h * h / 2.0) / h;
    if (k.imag() < 0.0) k = -k;
    return k;
}

SideFit fit_free_solution(const std::vector<cplx>& g, const Grid1D& grid, cplx k, double s_from, double s_to) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double s = grid.node(j);
        if (s >= s_from && s <= s_to) idx.push_back(j);
    }
    if (idx.size() < 2) throw DomainError("fit window contains fewer than two nodes");
    // Thin the window to at most 64 nodes; the fit is exact up to the model error.
    const std::size_t stride = std::max<std::size_t>(1, idx.size() / 64);
    std::vector<std::size_t> use;
    for (std::size_t i = 0; i < idx.size(); i += stride) use.push_back(idx[i]);
    Eigen::MatrixXcd A(static_cast<Eigen::Index>(use.size()), 2);
    Eigen::VectorXcd y(static_cast<Eigen::Index>(use.size()));
    // centre the exponentials on the window to keep the columns O(1)
    const double sc = 0.5 * (s_from + s_to);
    for (std::size_t i = 0; i < use.size(); ++i) {
        const double s = grid.node(use[i]) - sc;
        A(static_cast<Eigen::Index>(i), 0) = std::exp(I * k * s);
        A(static_cast<Eigen::Index>(i), 1) = std::exp(-I * k * s);
        y(static_cast<Eigen::Index>(i)) = g[use[i]];
    }
    const Eigen::VectorXcd c = A.colPivHouseholderQr().solve(y);
    SideFit fit;
    fit.a = c(0) * std::exp(-I * k * sc);
    fit.b = c(1) * std::exp(I * k * sc);
    return fit;
}

VertexData extract_vertex_data(const std::vector<cplx>& g, const Grid1D& grid, cplx k, double c_eps,
                               double window) {
    if (!(window > c_eps) || !(c_eps > 0.0)) throw DomainError("extrapolation window must satisfy 0 < c_eps < window");
    if (window >= 0.5 * grid.half_length) throw DomainError("extrapolation window exceeds half the grid");
    const SideFit left = fit_free_solution(g, grid, k, -window, -c_eps);
    const SideFit right = fit_free_solution(g, grid, k, c_eps, window);
    VertexData v;
    v.f_left = left.a + left.b;
    v.df_left = I * k * (left.a - left.b);
    v.f_right = right.a + right.b;
    v.df_right = I * k * (right.a - right.b);
    return v;
}

std::vector<Probe> default_probes() {
    struct B {
        double c, w;
    };
    const B near{2.0, 1.0}, mid{3.0, 1.0}, far{4.5, 1.0};
    std::vector<Probe> p;
    auto side_probe = [&](const char* name, B b, int side) {
        const double c = side * b.c, w = b.w;
        p.push_back({name, [c, w](double s) { return bump_shape(s, c, w); }, side, std::abs(c) + w});
    };
    side_probe("left_near", near, -1);
    side_probe("left_mid", mid, -1);
    side_probe("left_far", far, -1);
    side_probe("right_near", near, 1);
    side_probe("right_mid", mid, 1);
    side_probe("right_far", far, 1);
    auto combo = [&](const char* name, B b, double sign) {
        const double c = b.c, w = b.w;
        p.push_back({name, [c, w, sign](double s) { return bump_shape(s, -c, w) + sign * bump_shape(s, c, w); }, 0,
                     c + w});
    };
    combo("even_near", near, 1.0);
    combo("odd_near", near, -1.0);
    combo("even_mid", mid, 1.0);
    combo("odd_mid", mid, -1.0);
    return p;
}

double truncation_half_length(const std::vector<Probe>& probes, cplx z) {
    double reach = 1.0;
    for (const Probe& p : probes) {
        if (!(p.reach > 0.0)) throw DomainError("probe '" + p.name + "' has no reach");
        reach = std::max(reach, p.reach);
    }
    return reach + 14.0 / decaying_sqrt(z).imag();
}

ProbeScorer::ProbeScorer(EpsilonRow& row, const Grid1D& grid, cplx z, const GraphOperatorSpec& predicted,
                         const GraphOperatorSpec& alternative, double support_lo, double support_hi)
    : row_(row),
      grid_(grid),
      z_(z),
      k_(decaying_sqrt(z)),
      kh_(discrete_wavenumber(z, grid.h())),
      predicted_(predicted),
      alternative_(alternative),
      lo_(support_lo),
      hi_(support_hi) {
    row_.error = 0.0;
    row_.error_full = 0.0;
    row_.error_alternative = 0.0;
    row_.leakage = 0.0;
}

void ProbeScorer::add(const Probe& p, const std::vector<cplx>& f, const std::vector<cplx>& g,
                      const std::vector<cplx>* g_predicted, bool light) {
    const LineGrid line = grid_.line();
    const double fn = l2(f, grid_, [](double) { return true; });
    if (!(fn > 0.0)) throw DomainError("probe vanishes on the grid");
    const std::vector<cplx> gp = g_predicted ? *g_predicted : resolvent_apply(predicted_, z_, line, f);
    const double e = l2_diff(g, gp, grid_, true) / fn;
    row_.probe_errors.push_back(e);
    row_.error = std::max(row_.error, e);
    if (light) return;
    row_.error_full = std::max(row_.error_full, l2_diff(g, gp, grid_, false) / fn);
    const std::vector<cplx> ga = resolvent_apply(alternative_, z_, line, f);
    row_.error_alternative = std::max(row_.error_alternative, l2_diff(g, ga, grid_, true) / fn);
    if (p.side != -1) return;
    row_.leakage = std::max(row_.leakage, l2(g, grid_, [](double s) { return s > 1.0; }) / fn);
    const double margin = 0.05;
    if (have_fit_ || !(lo_ - margin > -0.95 && hi_ + margin < 0.95)) return;
    const SideFit left = fit_free_solution(g, grid_, kh_, -0.95, lo_ - margin);
    const SideFit right = fit_free_solution(g, grid_, kh_, hi_ + margin, 0.95);
    row_.transmission = right.a / left.a;
    row_.vertex.f_left = left.a + left.b;
    row_.vertex.df_left = I * kh_ * (left.a - left.b);
    row_.vertex.f_right = right.a + right.b;
    row_.vertex.df_right = I * kh_ * (right.a - right.b);
    row_.vertex_residual = vertex_residual(predicted_, row_.vertex, std::abs(k_)).max();
    have_fit_ = true;
}

namespace {

struct StudyContext {
    const CurvatureProfile& profile;
    double beta, b;
    cplx z, k;
    GraphOperatorSpec predicted, alternative;
    const std::vector<Probe>& probes;
};

EpsilonRow run_epsilon(const StudyContext& ctx, double eps, const Grid1D& grid, bool light) {
    const Discrete1DOperator op = build_h_n_eps(ctx.profile, ctx.beta, eps, ctx.b, grid);
    EpsilonRow row;
    row.epsilon = eps;
    row.h = grid.h();
    row.nodes = grid.size();
    ProbeScorer scorer(row, grid, ctx.z, ctx.predicted, ctx.alternative, eps * ctx.profile.s_lo(),
                       eps * ctx.profile.s_hi());
    for (const Probe& p : ctx.probes) {
        std::vector<cplx> f(grid.size(), 0.0);
        for (std::size_t j = 1; j + 1 < grid.size(); ++j) f[j] = p.f(grid.node(j));
        scorer.add(p, f, resolvent_solve(op, ctx.z, f), nullptr, light);
    }
    return row;
}

}  // namespace

ConvergenceReport convergence_study(const CurvatureProfile& profile, double beta, double b,
                                    const StudyOptions& options) {
    if (options.eps_list.empty()) throw DomainError("epsilon list is empty");
    for (std::size_t i = 0; i < options.eps_list.size(); ++i) {
        if (!(options.eps_list[i] > 0.0)) throw DomainError("epsilon values must be positive");
        if (i > 0 && !(options.eps_list[i] < options.eps_list[i - 1]))
            throw DomainError("epsilon list must be strictly decreasing");
    }
    if (options.probes.empty()) throw DomainError("probe set is empty");
    const cplx k = decaying_sqrt(options.z);

    ConvergenceReport rep;
    rep.study = "effective_1d";
    rep.beta = beta;
    rep.b = b;
    rep.z = options.z;
    rep.threshold = options.threshold;

    const ResonanceResult res = detect_resonance(Potential1D::from_profile(profile, beta), options.tol_D);
    rep.resonant = res.resonant;
    if (!res.resonant) {
        rep.predicted = GraphOperatorSpec::decoupled();
        rep.alternative = GraphOperatorSpec::free_line();
    } else {
        rep.predicted = b == 0.0 ? GraphOperatorSpec::scale_invariant(res.c_minus, res.c_plus)
                                 : GraphOperatorSpec::deformed(res.c_minus, res.c_plus, b * res.b_hat_per_b);
        rep.alternative = GraphOperatorSpec::decoupled();
    }
    if (options.override_spec) {
        rep.alternative = rep.predicted;
        rep.predicted = *options.override_spec;
        rep.notes.push_back("prediction overridden to " + to_string(rep.predicted.kind));
    }
    rep.predicted_transmission = scattering_matrix(rep.predicted, k).S(1, 0);

    const StudyContext ctx{profile, beta, b, options.z, k, rep.predicted, rep.alternative, options.probes};
    const double half_length = truncation_half_length(options.probes, options.z);
    for (double eps : options.eps_list) {
        const double h_max = std::min(0.999 * eps * profile.width() / 50.0, options.spacing_factor * std::pow(eps, 1.5));
        const Grid1D grid = Grid1D::with_spacing(half_length, h_max);
        EpsilonRow row = run_epsilon(ctx, eps, grid, false);
        if (options.grid_check) {
            const Grid1D fine{grid.half_length, grid.intervals * 2};
            row.error_refined = run_epsilon(ctx, eps, fine, true).error;
        }
        rep.rows.push_back(row);
    }

    rep.extrapolated_vertex_residual = extrapolated_vertex_residual(rep);
    assign_verdict(rep);
    return rep;
}

double extrapolated_vertex_residual(const ConvergenceReport& rep) {
    if (rep.rows.size() < 2) return kNaN;
    const EpsilonRow& r1 = rep.rows[rep.rows.size() - 1];
    const EpsilonRow& r2 = rep.rows[rep.rows.size() - 2];
    if (!std::isfinite(r1.vertex_residual) || !std::isfinite(r2.vertex_residual)) return kNaN;
    const double e1 = r1.epsilon, e2 = r2.epsilon;
    auto lin = [&](cplx a1, cplx a2) { return (e2 * a1 - e1 * a2) / (e2 - e1); };
    VertexData v0;
    v0.f_left = lin(r1.vertex.f_left, r2.vertex.f_left);
    v0.df_left = lin(r1.vertex.df_left, r2.vertex.df_left);
    v0.f_right = lin(r1.vertex.f_right, r2.vertex.f_right);
    v0.df_right = lin(r1.vertex.df_right, r2.vertex.df_right);
    return vertex_residual(rep.predicted, v0, std::abs(decaying_sqrt(rep.z))).max();
}

void assign_verdict(ConvergenceReport& rep) {
    std::vector<double> eps, err;
    for (const EpsilonRow& r : rep.rows) {
        eps.push_back(r.epsilon);
        err.push_back(r.error);
    }
    rep.fitted_exponent = fitted_exponent(eps, err);

    for (const EpsilonRow& r : rep.rows) {
        if (std::isfinite(r.error_refined) && std::abs(r.error - r.error_refined) > 0.1 * r.error_refined) {
            std::ostringstream os;
            os << "discretization not under control at eps=" << r.epsilon << " (e(h)=" << r.error
               << ", e(h/2)=" << r.error_refined << ")";
            rep.verdict = Verdict::inconclusive;
            rep.reason = os.str();
            return;
        }
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        if (!(rep.rows[i].error < rep.rows[i - 1].error)) decreasing = false;
    const bool small = !rep.rows.empty() && rep.rows.back().error < rep.threshold;
    std::ostringstream os;
    if (decreasing && small) {
        rep.verdict = Verdict::match;
        os << "errors strictly decreasing, final " << rep.rows.back().error << " < " << rep.threshold;
    } else {
        rep.verdict = Verdict::mismatch;
        if (!decreasing) os << "errors not strictly decreasing";
        if (!small) {
            if (!decreasing) os << "; ";
            os << "final error " << (rep.rows.empty() ? kNaN : rep.rows.back().error) << " >= " << rep.threshold;
        }
    }
    rep.reason = os.str();
}

}  // namespace wg
