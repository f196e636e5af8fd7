#include "wgraph/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "wgraph/errors.hpp"

namespace wg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Locale-independent strict parse.
double parse_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw DomainError("config key '" + key + "': not a number: '" + raw + "'");
    return v;
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw DomainError("config line " + std::to_string(lineno) + ": empty key");
        if (c.values_.count(key)) throw DomainError("config key '" + key + "' given twice");
        c.values_[key] = value;
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) { values_[trim(key)] = trim(value); }

void Config::check_keys(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
        if (!allowed.count(k)) throw DomainError("unknown config key '" + k + "'");
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::number(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
}

int Config::integer(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    int v = 0;
    const std::string& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw DomainError("config key '" + key + "': not an integer: '" + s + "'");
    return v;
}

bool Config::flag(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw DomainError("config key '" + key + "': expected true or false");
}

std::vector<double> Config::numbers(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    if (trim(it->second).empty()) return out;
    std::istringstream in(it->second);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_double(key, item));
    return out;
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& [k, v] : values_) {
        for (char ch : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
    }
    return h;
}

const std::set<std::string>& profile_keys() {
    static const std::set<std::string> keys{"profile", "amplitude", "center", "half_width",
                                            "s_lo",    "s_hi",      "nodes",  "values"};
    return keys;
}

CurvatureProfile profile_from_config(const Config& c) {
    const ProfileKind kind = profile_kind_from_string(c.text("profile", "bump"));
    switch (kind) {
        case ProfileKind::smooth_bump:
            return CurvatureProfile::smooth_bump(c.number("amplitude", 1.0), c.number("center", 0.0),
                                                 c.number("half_width", 1.0));
        case ProfileKind::rectangular:
            return CurvatureProfile::rectangular(c.number("amplitude", 1.0), c.number("s_lo", 0.0),
                                                 c.number("s_hi", 1.0));
        case ProfileKind::tabulated:
            return CurvatureProfile::tabulated(c.numbers("nodes", {}), c.numbers("values", {}));
    }
    throw DomainError("unknown profile kind");
}

}  // namespace wg
