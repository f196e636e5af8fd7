#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wgraph/geometry.hpp"

namespace wg {

// Key-value text configuration:
//
//   # comment
//   key = value
//   eps_list = 0.4, 0.2, 0.1
//
// Keys are case-sensitive, duplicates are an error, and every key must be in
// the schema passed to `check_keys`.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    // Later assignment wins; used for command-line overrides.
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    // Throws DomainError naming the first key not in `allowed`.
    void check_keys(const std::set<std::string>& allowed) const;

    std::string text(const std::string& key, const std::string& fallback) const;
    double number(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

    // FNV-1a over the canonical "key=value\n" lines in key order.
    std::uint64_t hash() const;

private:
    std::map<std::string, std::string> values_;
};

// Keys describing a curvature profile:
//   profile = bump | rectangular | tabulated
//   amplitude, center, half_width      (bump)
//   amplitude, s_lo, s_hi              (rectangular)
//   nodes, values                      (tabulated, comma lists)
const std::set<std::string>& profile_keys();
CurvatureProfile profile_from_config(const Config& config);

}  // namespace wg
