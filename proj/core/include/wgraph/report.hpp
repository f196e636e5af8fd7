#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgraph/graph_limit.hpp"
#include "wgraph/resonance.hpp"
#include "wgraph/transverse.hpp"

namespace wg {

enum class Verdict { match, mismatch, inconclusive };

std::string to_string(Verdict v);

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Everything measured at one epsilon. Errors are relative to ||f|| and are the
// max over the probe set.
struct EpsilonRow {
    double epsilon = 0.0;
    double h = 0.0;
    std::size_t nodes = 0;
    double error = kNaN;              // vs predicted limit, L2 on |s| > 1
    double error_full = kNaN;         // vs predicted limit, whole grid
    double error_refined = kNaN;      // `error` recomputed with h/2
    double error_alternative = kNaN;  // vs the competing limit
    double leakage = kNaN;            // ||g||_{L2(s > 1)} for left-supported probes
    cplx transmission{kNaN, kNaN};    // fitted C/A for a left probe
    VertexData vertex{};              // fitted one-sided vertex data (left probe)
    double vertex_residual = kNaN;    // predicted conditions on `vertex`
    double off_diagonal = kNaN;       // 2D: max ||r_mn f|| over m != n
    double solver_residual = kNaN;    // 2D: worst relative residual
    std::vector<double> probe_errors;
};

struct ConvergenceReport {
    std::string study;
    GraphOperatorSpec predicted;
    GraphOperatorSpec alternative;
    bool resonant = false;
    double beta = 0.0;
    double b = 0.0;
    cplx z{0.0, 1.0};
    int mode = -1;                 // 2D only
    double delta_ratio = kNaN;     // 2D only
    double threshold = 0.02;
    std::vector<EpsilonRow> rows;
    double fitted_exponent = kNaN;
    cplx predicted_transmission{kNaN, kNaN};
    double extrapolated_vertex_residual = kNaN;
    Verdict verdict = Verdict::inconclusive;
    std::string reason;
    std::vector<std::string> notes;
};

// Least-squares slope of log e against log eps.
double fitted_exponent(const std::vector<double>& eps, const std::vector<double>& err);

nlohmann::json to_json(const GraphOperatorSpec& spec);
nlohmann::json to_json(const TransverseMode& mode);
nlohmann::json to_json(const ResonanceResult& r, bool include_trace = true);
nlohmann::json to_json(const ConvergenceReport& r);

// One row per epsilon; header row first.
std::string to_csv(const ConvergenceReport& r);

}  // namespace wg
