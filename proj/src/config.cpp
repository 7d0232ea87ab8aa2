#include "hacover/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "hacover/error.hpp"

namespace hacover {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::string unquote(const std::string& token, std::size_t line_no) {
    if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
        return token.substr(1, token.size() - 2);
    }
    if (!token.empty() && (token.front() == '"' || token.back() == '"')) {
        throw validation_error("config line " + std::to_string(line_no) + ": unbalanced quotes");
    }
    return token;
}

std::vector<std::string> split_list(const std::string& body, std::size_t line_no) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream stream(body);
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw validation_error("config line " + std::to_string(line_no) + ": empty list element");
        }
        items.push_back(unquote(item, line_no));
    }
    return items;
}

double parse_double_token(const std::string& key, const std::string& token) {
    try {
        std::size_t used = 0;
        const double value = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw validation_error("config key " + key + ": \"" + token + "\" is not a number");
    }
}

long long parse_int_token(const std::string& key, const std::string& token) {
    try {
        std::size_t used = 0;
        const long long value = std::stoll(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw validation_error("config key " + key + ": \"" + token + "\" is not an integer");
    }
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile config;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // Strip comments outside quotes.
        bool in_quotes = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quotes = !in_quotes;
            if (line[i] == '#' && !in_quotes) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw validation_error("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw validation_error("config line " + std::to_string(line_no) + ": expected key = value");
        }

        if (value.front() == '[') {
            if (value.back() != ']') {
                throw validation_error("config line " + std::to_string(line_no) + ": unterminated list");
            }
            const std::string body = trim(value.substr(1, value.size() - 2));
            config.lists_[key] = body.empty() ? std::vector<std::string>{} : split_list(body, line_no);
            config.scalars_.erase(key);
        } else {
            config.scalars_[key] = unquote(value, line_no);
            config.lists_.erase(key);
        }
    }
    return config;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

void ConfigFile::merge(const ConfigFile& overrides) {
    for (const auto& [key, value] : overrides.scalars_) {
        scalars_[key] = value;
        lists_.erase(key);
    }
    for (const auto& [key, value] : overrides.lists_) {
        lists_[key] = value;
        scalars_.erase(key);
    }
}

bool ConfigFile::has(const std::string& key) const {
    return scalars_.contains(key) || lists_.contains(key);
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    auto it = scalars_.find(key);
    if (it == scalars_.end()) {
        if (lists_.contains(key)) throw validation_error("config key " + key + ": expected a scalar");
        return fallback;
    }
    return parse_double_token(key, it->second);
}

long long ConfigFile::get_int(const std::string& key, long long fallback) const {
    auto it = scalars_.find(key);
    if (it == scalars_.end()) {
        if (lists_.contains(key)) throw validation_error("config key " + key + ": expected a scalar");
        return fallback;
    }
    return parse_int_token(key, it->second);
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    auto it = scalars_.find(key);
    if (it == scalars_.end()) {
        if (lists_.contains(key)) throw validation_error("config key " + key + ": expected a scalar");
        return fallback;
    }
    return it->second;
}

std::vector<double> ConfigFile::get_double_list(const std::string& key,
                                                std::vector<double> fallback) const {
    auto it = lists_.find(key);
    if (it == lists_.end()) {
        if (scalars_.contains(key)) throw validation_error("config key " + key + ": expected a list");
        return fallback;
    }
    std::vector<double> out;
    out.reserve(it->second.size());
    for (const std::string& token : it->second) out.push_back(parse_double_token(key, token));
    return out;
}

std::vector<long long> ConfigFile::get_int_list(const std::string& key,
                                                std::vector<long long> fallback) const {
    auto it = lists_.find(key);
    if (it == lists_.end()) {
        if (scalars_.contains(key)) throw validation_error("config key " + key + ": expected a list");
        return fallback;
    }
    std::vector<long long> out;
    out.reserve(it->second.size());
    for (const std::string& token : it->second) out.push_back(parse_int_token(key, token));
    return out;
}

std::vector<std::string> ConfigFile::get_string_list(const std::string& key,
                                                     std::vector<std::string> fallback) const {
    auto it = lists_.find(key);
    if (it == lists_.end()) {
        if (scalars_.contains(key)) throw validation_error("config key " + key + ": expected a list");
        return fallback;
    }
    return it->second;
}

namespace {

bool compare_double(double lhs, const std::string& op, double rhs) {
    if (op == "==") return lhs == rhs;
    if (op == "!=") return lhs != rhs;
    if (op == "<") return lhs < rhs;
    if (op == "<=") return lhs <= rhs;
    if (op == ">") return lhs > rhs;
    if (op == ">=") return lhs >= rhs;
    throw parameter_error("unknown operator: " + op);
}

bool compare_string(const std::string& lhs, const std::string& op, const std::string& rhs) {
    if (op == "==") return lhs == rhs;
    if (op == "!=") return lhs != rhs;
    throw parameter_error("operator " + op + " needs a numeric field");
}

}  // namespace

bool SubgroupPredicate::matches(const User& user) const {
    for (const Clause& clause : clauses) {
        bool ok = false;
        if (clause.field == "age") {
            ok = compare_double(user.age, clause.op, parse_double_token("age", clause.value));
        } else if (clause.field == "weight") {
            ok = compare_double(user.weight, clause.op, parse_double_token("weight", clause.value));
        } else if (clause.field == "sex") {
            ok = compare_string(to_string(user.sex), clause.op, clause.value);
        } else if (clause.field == "loss_type") {
            ok = compare_string(to_string(user.loss_type), clause.op, clause.value);
        } else {
            throw parameter_error("unknown predicate field: " + clause.field);
        }
        if (!ok) return false;
    }
    return true;
}

SubgroupPredicate parse_predicate(const std::string& text) {
    SubgroupPredicate predicate;
    predicate.text = text;

    std::istringstream stream(text);
    std::string part;
    while (std::getline(stream, part, '&')) {
        part = trim(part);
        if (part.empty()) throw parameter_error("empty clause in predicate: \"" + text + "\"");

        static const std::vector<std::string> ops = {"==", "!=", "<=", ">=", "<", ">"};
        SubgroupPredicate::Clause clause;
        std::size_t op_pos = std::string::npos;
        for (const std::string& op : ops) {
            op_pos = part.find(op);
            if (op_pos != std::string::npos) {
                clause.op = op;
                break;
            }
        }
        if (op_pos == std::string::npos) {
            throw parameter_error("no operator in predicate clause: \"" + part + "\"");
        }
        clause.field = trim(part.substr(0, op_pos));
        clause.value = trim(part.substr(op_pos + clause.op.size()));
        if (clause.field.empty() || clause.value.empty()) {
            throw parameter_error("malformed predicate clause: \"" + part + "\"");
        }
        predicate.clauses.push_back(std::move(clause));
    }
    if (predicate.clauses.empty()) throw parameter_error("empty predicate");

    // Validate fields and operators eagerly so bad predicates fail fast.
    User probe;
    probe.id = "probe";
    probe.weight = 1.0;
    probe.age = 0.0;
    predicate.matches(probe);
    return predicate;
}

}  // namespace hacover
