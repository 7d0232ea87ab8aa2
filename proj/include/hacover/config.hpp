#pragma once

#include <map>
#include <string>
#include <vector>

#include "hacover/dataset.hpp"

namespace hacover {

// Minimal TOML-style config: `key = value` lines, # comments, values are
// numbers, booleans, "strings", or flat [a, b, c] arrays.
class ConfigFile {
  public:
    static ConfigFile parse(const std::string& text);
    static ConfigFile parse_file(const std::string& path);

    // Later values win key by key.
    void merge(const ConfigFile& overrides);

    bool has(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) const;
    std::vector<long long> get_int_list(const std::string& key, std::vector<long long> fallback) const;
    std::vector<std::string> get_string_list(const std::string& key,
                                             std::vector<std::string> fallback) const;

    const std::map<std::string, std::string>& raw() const { return scalars_; }
    const std::map<std::string, std::vector<std::string>>& raw_lists() const { return lists_; }

  private:
    std::map<std::string, std::string> scalars_;             // unquoted token per key
    std::map<std::string, std::vector<std::string>> lists_;  // unquoted tokens per key
};

// Conjunction of `field op value` clauses joined with '&'. Fields: age, sex,
// loss_type, weight; ops: ==, !=, <, <=, >, >=.
struct SubgroupPredicate {
    struct Clause {
        std::string field;
        std::string op;
        std::string value;
    };
    std::string text;
    std::vector<Clause> clauses;

    bool matches(const User& user) const;
};

SubgroupPredicate parse_predicate(const std::string& text);

}  // namespace hacover
