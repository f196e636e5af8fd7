#include "wgraph/report.hpp"

#include <cmath>
#include <iomanip>
#include <locale>
#include <sstream>

#include "wgraph/errors.hpp"

namespace wg {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::match: return "match";
        case Verdict::mismatch: return "mismatch";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

double fitted_exponent(const std::vector<double>& eps, const std::vector<double>& err) {
    if (eps.size() != err.size()) throw DomainError("fitted_exponent: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !(err[i] > 0.0)) continue;
        const double x = std::log(eps[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return kNaN;
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? kNaN : (n * sxy - sx * sy) / den;
}

namespace {

// NaN and inf are not representable in JSON; they become null.
nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }
nlohmann::json num(cplx z) { return nlohmann::json::array({num(z.real()), num(z.imag())}); }

std::string csv_num(double x) {
    if (!std::isfinite(x)) return "nan";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(10) << x;
    return os.str();
}

}  // namespace

nlohmann::json to_json(const GraphOperatorSpec& spec) {
    nlohmann::json j;
    j["kind"] = to_string(spec.kind);
    j["c_minus"] = num(spec.c_minus);
    j["c_plus"] = num(spec.c_plus);
    j["b_hat"] = num(spec.b_hat);
    return j;
}

nlohmann::json to_json(const TransverseMode& m) {
    nlohmann::json j;
    j["index"] = m.index;
    j["branch"] = to_string(m.branch);
    j["wavenumber"] = num(m.wavenumber);
    j["eigenvalue"] = num(m.eigenvalue);
    j["parity"] = to_string(m.parity);
    j["alpha1"] = num(m.alpha1);
    j["alpha2"] = num(m.alpha2);
    j["d"] = num(m.d);
    j["residual"] = num(m.residual());
    return j;
}

nlohmann::json to_json(const ResonanceResult& r, bool include_trace) {
    nlohmann::json j;
    j["resonant"] = r.resonant;
    j["D"] = num(r.D);
    j["D_scaled"] = num(r.D_scaled);
    j["tol_D"] = num(r.tol_D);
    j["c_minus"] = num(r.c_minus);
    j["c_plus"] = num(r.c_plus);
    j["b_hat_per_b"] = num(r.b_hat_per_b);
    j["integral_warning"] = r.integral_warning;
    if (include_trace) {
        j["s"] = r.s;
        j["f_r"] = r.f_r;
        j["df_r"] = r.df_r;
    }
    return j;
}

nlohmann::json to_json(const ConvergenceReport& r) {
    nlohmann::json j;
    j["study"] = r.study;
    j["predicted"] = to_json(r.predicted);
    j["alternative"] = to_json(r.alternative);
    j["resonant"] = r.resonant;
    j["beta"] = num(r.beta);
    j["b"] = num(r.b);
    j["z"] = num(r.z);
    if (r.mode >= 0) j["mode"] = r.mode;
    j["delta_ratio"] = num(r.delta_ratio);
    j["threshold"] = num(r.threshold);
    j["fitted_exponent"] = num(r.fitted_exponent);
    j["predicted_transmission"] = num(r.predicted_transmission);
    j["extrapolated_vertex_residual"] = num(r.extrapolated_vertex_residual);
    j["verdict"] = to_string(r.verdict);
    j["reason"] = r.reason;
    j["notes"] = r.notes;
    nlohmann::json rows = nlohmann::json::array();
    for (const EpsilonRow& e : r.rows) {
        nlohmann::json x;
        x["epsilon"] = num(e.epsilon);
        x["h"] = num(e.h);
        x["nodes"] = e.nodes;
        x["error"] = num(e.error);
        x["error_full"] = num(e.error_full);
        x["error_refined"] = num(e.error_refined);
        x["error_alternative"] = num(e.error_alternative);
        x["leakage"] = num(e.leakage);
        x["transmission"] = num(e.transmission);
        x["vertex"] = {{"f_left", num(e.vertex.f_left)},
                       {"df_left", num(e.vertex.df_left)},
                       {"f_right", num(e.vertex.f_right)},
                       {"df_right", num(e.vertex.df_right)}};
        x["vertex_residual"] = num(e.vertex_residual);
        x["off_diagonal"] = num(e.off_diagonal);
        x["solver_residual"] = num(e.solver_residual);
        nlohmann::json pe = nlohmann::json::array();
        for (double v : e.probe_errors) pe.push_back(num(v));
        x["probe_errors"] = pe;
        rows.push_back(x);
    }
    j["rows"] = rows;
    return j;
}

std::string to_csv(const ConvergenceReport& r) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "epsilon,h,nodes,error,error_full,error_refined,error_alternative,leakage,"
          "transmission_re,transmission_im,vertex_residual,off_diagonal,solver_residual\n";
    for (const EpsilonRow& e : r.rows) {
        os << csv_num(e.epsilon) << ',' << csv_num(e.h) << ',' << e.nodes << ',' << csv_num(e.error) << ','
           << csv_num(e.error_full) << ',' << csv_num(e.error_refined) << ',' << csv_num(e.error_alternative) << ','
           << csv_num(e.leakage) << ',' << csv_num(e.transmission.real()) << ',' << csv_num(e.transmission.imag())
           << ',' << csv_num(e.vertex_residual) << ',' << csv_num(e.off_diagonal) << ','
           << csv_num(e.solver_residual) << '\n';
    }
    return os.str();
}

}  // namespace wg
