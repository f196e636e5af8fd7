// wgraph: command-line driver for spectra, resonance scans and convergence studies.
//
// Exit codes: 0 success or verdict match, 1 computation failure, 2 usage or
// configuration error, 3 inconclusive, 4 mismatch.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <locale>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wgraph/config.hpp"
#include "wgraph/effective_1d.hpp"
#include "wgraph/errors.hpp"
#include "wgraph/resonance.hpp"
#include "wgraph/transverse.hpp"
#include "wgraph/version.hpp"
#include "wgraph/waveguide2d.hpp"

namespace fs = std::filesystem;
using namespace wg;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kInconclusive = 3, kMismatch = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr const char* kUnits =
    "lengths in units of the curvature support half-width; energies in inverse length squared";

struct Run {
    std::string command;
    Config config;
    fs::path out;
    std::string format;
    std::uint64_t seed = 0;

    std::string hash_hex() const {
        Config c = config;
        c.set("seed", std::to_string(seed));
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(c.hash()));
        return buf;
    }

    nlohmann::json metadata() const {
        return {{"tool", "wgraph"},       {"version", kVersion}, {"command", command},
                {"config_hash", hash_hex()}, {"seed", seed},      {"units", kUnits}};
    }

    std::string csv_header() const {
        return "# wgraph " + std::string(kVersion) + " command=" + command + " config_hash=" + hash_hex() +
               " seed=" + std::to_string(seed) + "\n# units: " + kUnits + "\n";
    }

    void write(const std::string& name, const std::string& body) const {
        fs::create_directories(out);
        std::ofstream f(out / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (out / name).string());
        f << body;
        std::cout << "wrote " << (out / name).string() << "\n";
    }

    void write_json(const std::string& stem, nlohmann::json j) const {
        j["metadata"] = metadata();
        write(stem + ".json", j.dump(2) + "\n");
    }
};

std::set<std::string> with(std::set<std::string> a, const std::set<std::string>& b) {
    a.insert(b.begin(), b.end());
    return a;
}

std::string num(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(12);
    os << x;
    return os.str();
}

// decoupled | free | scale_invariant:c_minus,c_plus | deformed:c_minus,c_plus,b_hat
std::optional<GraphOperatorSpec> parse_override(const Config& c) {
    if (!c.has("override")) return std::nullopt;
    const std::string v = c.text("override", "");
    const auto colon = v.find(':');
    const std::string kind = v.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
        Config tmp;
        tmp.set("args", v.substr(colon + 1));
        args = tmp.numbers("args", {});
    }
    if (kind == "decoupled" && args.empty()) return GraphOperatorSpec::decoupled();
    if (kind == "free" && args.empty()) return GraphOperatorSpec::free_line();
    if (kind == "scale_invariant" && args.size() == 2) return GraphOperatorSpec::scale_invariant(args[0], args[1]);
    if (kind == "deformed" && args.size() == 3) return GraphOperatorSpec::deformed(args[0], args[1], args[2]);
    throw UsageError("override must be decoupled, free, scale_invariant:c_minus,c_plus or deformed:c_minus,c_plus,b_hat");
}

// Extra bump probes with seeded centres and widths, alternating sides.
std::vector<Probe> probe_set(const Config& c, std::uint64_t seed) {
    std::vector<Probe> probes = default_probes();
    const int extra = c.integer("random_probes", 0);
    if (extra < 0) throw UsageError("random_probes must be non-negative");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> width(0.3, 1.0), offset(0.0, 3.0);
    for (int i = 0; i < extra; ++i) {
        const double w = width(rng), side = i % 2 == 0 ? -1.0 : 1.0;
        const double centre = side * (1.0 + w + offset(rng));
        Probe p;
        p.name = "random_" + std::to_string(i);
        p.side = static_cast<int>(side);
        p.reach = std::abs(centre) + w;
        p.f = [centre, w](double s) {
            const double t = (s - centre) / w;
            return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
        };
        probes.push_back(std::move(p));
    }
    return probes;
}

cplx shift(const Config& c) { return {c.number("z_re", 0.0), c.number("z_im", 1.0)}; }

// beta from, in order: explicit `beta`, (alpha, n) via the transverse problem,
// or `tuned = true` (resonant coupling of the profile in [beta_min, beta_max]).
double coupling(const Config& c, const CurvatureProfile& profile, std::string& source) {
    if (c.has("beta")) {
        source = "explicit";
        return c.number("beta", 0.0);
    }
    if (c.has("alpha") && c.has("n")) {
        source = "transverse";
        return perturbation_coefficients(c.number("alpha", 0.0), c.number("d", 1.0), c.integer("n", 0)).beta;
    }
    if (c.flag("tuned", false)) {
        const auto b = find_resonant_coupling(profile, c.number("beta_min", -20.0), c.number("beta_max", 0.0));
        if (!b) throw DomainError("no resonant coupling in [beta_min, beta_max]");
        source = "tuned";
        return *b;
    }
    throw UsageError("give beta, (alpha, n) or tuned = true");
}

int verdict_exit(Verdict v) {
    switch (v) {
    case Verdict::match: return kOk;
    case Verdict::inconclusive: return kInconclusive;
    case Verdict::mismatch: return kMismatch;
    }
    return kFailure;
}

int cmd_spectrum(const Run& run) {
    const Config& c = run.config;
    c.check_keys({"alpha_min", "alpha_max", "alpha_points", "alpha_grid", "d", "n_max", "bad_point_quota"});
    std::vector<double> grid;
    if (c.has("alpha_grid")) {
        grid = c.numbers("alpha_grid", {});
    } else {
        const int n = c.integer("alpha_points", 101);
        const double lo = c.number("alpha_min", -5.0), hi = c.number("alpha_max", 5.0);
        for (int i = 0; i < n; ++i) grid.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    }
    if (grid.empty()) throw UsageError("alpha grid is empty");
    const double d = c.number("d", 1.0);
    const int n_max = c.integer("n_max", 3);
    const int quota = c.integer("bad_point_quota", 0);
    const std::vector<BetaRow> rows = beta_table(grid, d, n_max);

    int bad = 0;
    for (const BetaRow& r : rows) bad += !r.ok;
    if (run.format == "json") {
        nlohmann::json mu = nlohmann::json::array(), beta = nlohmann::json::array();
        for (const BetaRow& r : rows) {
            mu.push_back({{"alpha", r.alpha}, {"n", r.n}, {"mu", r.mu}});
            beta.push_back({{"alpha", r.alpha},
                            {"n", r.n},
                            {"lambda2", std::isfinite(r.lambda2) ? nlohmann::json(r.lambda2) : nlohmann::json()},
                            {"beta", std::isfinite(r.beta) ? nlohmann::json(r.beta) : nlohmann::json()},
                            {"ok", r.ok},
                            {"note", r.note}});
        }
        run.write_json("mu_table", {{"d", d}, {"rows", mu}});
        run.write_json("beta_table", {{"d", d}, {"rows", beta}});
    } else {
        std::string mu = run.csv_header() + "alpha,n,mu\n", beta = run.csv_header() + "alpha,n,lambda2,beta,ok,note\n";
        for (const BetaRow& r : rows) {
            mu += num(r.alpha) + "," + std::to_string(r.n) + "," + num(r.mu) + "\n";
            beta += num(r.alpha) + "," + std::to_string(r.n) + "," + num(r.lambda2) + "," + num(r.beta) + "," +
                    (r.ok ? "1" : "0") + "," + r.note + "\n";
        }
        run.write("mu_table.csv", mu);
        run.write("beta_table.csv", beta);
    }
    if (bad > quota) {
        std::cerr << "error: " << bad << " failed points exceed the quota of " << quota << "\n";
        for (const BetaRow& r : rows)
            if (!r.ok) std::cerr << "  alpha=" << r.alpha << " n=" << r.n << ": " << r.note << "\n";
        return kFailure;
    }
    return kOk;
}

int cmd_resonance(const Run& run) {
    const Config& c = run.config;
    c.check_keys(with(profile_keys(), {"beta", "alpha", "n", "d", "tuned", "beta_min", "beta_max", "tol_D"}));
    const CurvatureProfile profile = profile_from_config(c);
    nlohmann::json j;
    double beta = 0.0;
    std::string source;
    if (!c.has("beta") && !(c.has("alpha") && c.has("n"))) {
        // scan for a resonant coupling; none found is a normal result
        const auto b = find_resonant_coupling(profile, c.number("beta_min", -20.0), c.number("beta_max", 0.0));
        j["scan"] = {{"beta_min", c.number("beta_min", -20.0)}, {"beta_max", c.number("beta_max", 0.0)},
                     {"found", b.has_value()}};
        if (!b) {
            j["resonant"] = false;
            if (run.format == "json") run.write_json("resonance", j);
            else run.write("resonance.csv", run.csv_header() + "found,resonant\n0,0\n");
            return kOk;
        }
        beta = *b;
        source = "scan";
    } else {
        beta = coupling(c, profile, source);
    }
    const ResonanceResult r = detect_resonance(Potential1D::from_profile(profile, beta), c.number("tol_D", 1e-9));
    j["beta"] = beta;
    j["beta_source"] = source;
    j["result"] = to_json(r, run.format == "json");
    j["limit"] = r.resonant ? "scale_invariant" : "decoupled";
    if (run.format == "json") {
        run.write_json("resonance", j);
    } else {
        run.write("resonance.csv", run.csv_header() + "beta,resonant,D,c_minus,c_plus,b_hat_per_b\n" + num(beta) + "," +
                                       (r.resonant ? "1" : "0") + "," + num(r.D) + "," + num(r.c_minus) + "," +
                                       num(r.c_plus) + "," + num(r.b_hat_per_b) + "\n");
    }
    return kOk;
}

void write_report(const Run& run, const ConvergenceReport& r) {
    if (run.format == "json") {
        run.write_json("report", to_json(r));
    } else {
        run.write("report.csv", run.csv_header() + "# study=" + r.study + " predicted=" + to_string(r.predicted.kind) +
                                    " verdict=" + to_string(r.verdict) + "\n" + to_csv(r));
    }
    std::cout << "verdict: " << to_string(r.verdict) << " (predicted " << to_string(r.predicted.kind) << "): " << r.reason
              << "\n";
}

int cmd_limit_check(const Run& run) {
    const Config& c = run.config;
    c.check_keys(with(profile_keys(), {"beta", "alpha", "n", "d", "tuned", "beta_min", "beta_max", "b", "z_re", "z_im",
                                       "eps_list", "threshold", "tol_D", "spacing_factor", "grid_check", "override",
                                       "random_probes"}));
    const CurvatureProfile profile = profile_from_config(c);
    std::string source;
    const double beta = coupling(c, profile, source);
    StudyOptions o;
    o.z = shift(c);
    o.eps_list = c.numbers("eps_list", o.eps_list);
    if (o.eps_list.empty()) throw UsageError("eps_list is empty");
    o.threshold = c.number("threshold", o.threshold);
    o.tol_D = c.number("tol_D", o.tol_D);
    o.spacing_factor = c.number("spacing_factor", o.spacing_factor);
    o.grid_check = c.flag("grid_check", o.grid_check);
    o.override_spec = parse_override(c);
    o.probes = probe_set(c, run.seed);
    ConvergenceReport r = convergence_study(profile, beta, c.number("b", 0.0), o);
    r.notes.push_back("beta source: " + source);
    write_report(run, r);
    return verdict_exit(r.verdict);
}

int cmd_waveguide_check(const Run& run) {
    const Config& c = run.config;
    c.check_keys(with(profile_keys(), {"d", "alpha", "n", "b", "z_re", "z_im", "eps_list", "delta_ratio", "n_u",
                                       "s_points_per_width", "threshold", "tol_D", "variant", "grid_check", "override",
                                       "random_probes"}));
    const CurvatureProfile profile = profile_from_config(c);
    WaveguideOptions o;
    o.z = shift(c);
    o.eps_list = c.numbers("eps_list", o.eps_list);
    if (o.eps_list.empty()) throw UsageError("eps_list is empty");
    o.delta_ratio = c.number("delta_ratio", o.delta_ratio);
    o.n_u = c.integer("n_u", o.n_u);
    o.s_points_per_width = c.number("s_points_per_width", o.s_points_per_width);
    o.threshold = c.number("threshold", o.threshold);
    o.tol_D = c.number("tol_D", o.tol_D);
    const std::string variant = c.text("variant", "full_H");
    if (variant == "full_H") o.variant = WaveguideVariant::full_H;
    else if (variant == "simplified_Hhat") o.variant = WaveguideVariant::simplified_Hhat;
    else throw UsageError("variant must be full_H or simplified_Hhat");
    o.grid_check = c.flag("grid_check", o.grid_check);
    o.override_spec = parse_override(c);
    o.probes = probe_set(c, run.seed);
    const ConvergenceReport r = theorem_check(profile, c.number("d", 1.0), c.number("alpha", 0.0), c.number("b", 0.0),
                                              c.integer("n", 0), o);
    write_report(run, r);
    return verdict_exit(r.verdict);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wgraph: thin curved waveguides and their quantum-graph limits"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::string config_path, out_dir = "wgraph_out", format = "csv", override_spec;
    std::uint64_t seed = 1;
    std::vector<std::string> sets;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
        sub->add_option("--seed", seed, "seed for randomized probe sets")->capture_default_str();
        sub->add_option("--set", sets, "override a configuration key (key=value), repeatable");
    };
    CLI::App* spectrum = app.add_subcommand("spectrum", "transverse eigenvalue and beta tables");
    CLI::App* resonance = app.add_subcommand("resonance", "zero-energy resonance analysis of beta gamma^2");
    CLI::App* limit = app.add_subcommand("limit-check", "1D convergence study against the predicted graph limit");
    CLI::App* guide = app.add_subcommand("waveguide-check", "2D reduced-resolvent check of one transverse mode");
    for (CLI::App* s : {spectrum, resonance, limit, guide}) add_common(s);
    for (CLI::App* s : {limit, guide})
        s->add_option("--override", override_spec,
                      "replace the predicted limit: decoupled | free | scale_invariant:cm,cp | deformed:cm,cp,b_hat");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    Run run;
    run.out = out_dir;
    run.format = format;
    run.seed = seed;
    try {
        if (!config_path.empty()) run.config = Config::load(config_path);
        for (const std::string& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
            run.config.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!override_spec.empty()) run.config.set("override", override_spec);

        run.command = app.get_subcommands().front()->get_name();
        if (spectrum->parsed()) return cmd_spectrum(run);
        if (resonance->parsed()) return cmd_resonance(run);
        if (limit->parsed()) return cmd_limit_check(run);
        return cmd_waveguide_check(run);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
