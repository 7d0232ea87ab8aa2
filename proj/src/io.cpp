#include "hacover/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "hacover/error.hpp"

namespace hacover {

namespace {

using nlohmann::json;

constexpr const char* kDatasetHeader =
    "user_id,weight,loss_type,fit_type,g500,g1000,g2000,g3000,g4000,g6000,age,sex";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double_field(const std::string& token, const std::string& context) {
    try {
        std::size_t used = 0;
        const double value = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
    } catch (const std::exception&) {
        throw validation_error(context + ": bad number \"" + token + "\"");
    }
}

json config_to_json(const Configuration& config) {
    json j;
    j["g500"] = config.gains[0];
    j["g1000"] = config.gains[1];
    j["g2000"] = config.gains[2];
    j["g3000"] = config.gains[3];
    j["g4000"] = config.gains[4];
    j["g6000"] = config.gains[5];
    return j;
}

Configuration config_from_json(const json& j, const std::string& context) {
    static const std::array<const char*, kNumFrequencies> keys = {"g500",  "g1000", "g2000",
                                                                  "g3000", "g4000", "g6000"};
    Configuration config;
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        if (!j.contains(keys[i]) || !j[keys[i]].is_number()) {
            throw validation_error(context + ": missing numeric field " + keys[i]);
        }
        config.gains[i] = j[keys[i]].get<double>();
    }
    return config;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw validation_error(path + ": " + e.what());
    }
}

void write_file_checked(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw io_error("write failed: " + path);
}

}  // namespace

std::string format_double(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

Dataset load_dataset(const std::string& path, std::string* warning) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open dataset: " + path);

    std::string line;
    if (!std::getline(in, line)) throw validation_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDatasetHeader) {
        throw validation_error(path + ": header must be exactly \"" + kDatasetHeader + "\"");
    }

    Dataset dataset;
    std::map<std::string, std::size_t> index_of;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string context = path + " line " + std::to_string(line_no);

        const auto fields = split_csv_line(line);
        if (fields.size() != 12) {
            throw validation_error(context + ": expected 12 fields, got " + std::to_string(fields.size()));
        }
        const std::string& id = fields[0];
        if (id.empty()) throw validation_error(context + ": empty user_id");
        const double weight = parse_double_field(fields[1], context);
        const LossType loss = loss_type_from_string(fields[2]);
        const FitType fit = fit_type_from_string(fields[3]);
        Configuration config;
        for (std::size_t i = 0; i < kNumFrequencies; ++i) {
            config.gains[i] = parse_double_field(fields[4 + i], context);
        }
        const double age = parse_double_field(fields[10], context);
        const Sex sex = sex_from_string(fields[11]);

        auto [it, inserted] = index_of.try_emplace(id, dataset.users.size());
        if (inserted) {
            User user;
            user.id = id;
            user.weight = weight;
            user.loss_type = loss;
            user.age = age;
            user.sex = sex;
            dataset.users.push_back(std::move(user));
        }
        User& user = dataset.users[it->second];
        if (user.weight != weight || user.loss_type != loss || user.age != age || user.sex != sex) {
            throw validation_error(context + ": user " + id + " has inconsistent attributes across rows");
        }
        if (!user.configs.emplace(fit, config).second) {
            throw validation_error(context + ": duplicate " + to_string(fit) + " row for user " + id);
        }
    }

    dataset.validate();
    double total = 0.0;
    for (const User& user : dataset.users) total += user.weight;
    if (warning && std::fabs(total - 1.0) > 1e-6) {
        *warning = "raw weights sum to " + format_double(total) + "; normalizing";
    }
    dataset.normalize_weights();
    return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ostringstream out;
    out << kDatasetHeader << "\n";
    for (const User& user : dataset.users) {
        for (FitType fit : kAllFitTypes) {
            auto it = user.configs.find(fit);
            if (it == user.configs.end()) continue;
            out << user.id << ',' << format_double(user.weight) << ',' << to_string(user.loss_type)
                << ',' << to_string(fit);
            for (double g : it->second.gains) out << ',' << format_double(g);
            out << ',' << format_double(user.age) << ',' << to_string(user.sex) << "\n";
        }
    }
    write_file_checked(path, out.str());
}

PresetSet load_presets(const std::string& path) {
    const json j = load_json_file(path);
    if (!j.is_array()) throw validation_error(path + ": expected a JSON array of presets");
    PresetSet presets;
    presets.presets.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        presets.presets.push_back(config_from_json(j[i], path + " preset " + std::to_string(i)));
    }
    return presets;
}

void save_presets(const PresetSet& presets, const std::string& path) {
    json j = json::array();
    for (const Configuration& preset : presets.presets) j.push_back(config_to_json(preset));
    write_file_checked(path, j.dump(2) + "\n");
}

void save_report(const CoverageReport& report, const std::string& path) {
    json j;
    j["population_coverage"] = report.population_coverage;
    j["params"]["radius"] = report.params.radius;
    j["params"]["gamma"] = report.params.gamma;
    json per_user = json::array();
    for (std::size_t u = 0; u < report.per_user.size(); ++u) {
        json entry;
        entry["user_id"] = report.user_ids[u];
        entry["covered"] = report.per_user[u].covered;
        json mass;
        for (const auto& [fit, value] : report.per_user[u].mass) mass[to_string(fit)] = value;
        entry["mass"] = mass;
        per_user.push_back(std::move(entry));
    }
    j["per_user"] = std::move(per_user);
    write_file_checked(path, j.dump(2) + "\n");
}

void save_selection(const SelectionResult& result, const std::string& path) {
    json j;
    j["method"] = result.method;
    j["N"] = result.presets.size();
    j["seed"] = result.seed;
    j["coverage"] = result.coverage;
    j["preset_indices"] = result.chosen_indices;
    json presets = json::array();
    for (const Configuration& preset : result.presets.presets) presets.push_back(config_to_json(preset));
    j["presets"] = std::move(presets);
    j["trace"] = result.trace;
    write_file_checked(path, j.dump(2) + "\n");
}

PcaModel load_pca(const std::string& path) {
    const json j = load_json_file(path);
    PcaModel model;
    if (!j.contains("mean") || !j["mean"].is_array() || j["mean"].size() != kNumFrequencies) {
        throw validation_error(path + ": mean must have 6 entries");
    }
    for (std::size_t i = 0; i < kNumFrequencies; ++i) model.mean.gains[i] = j["mean"][i].get<double>();
    if (!j.contains("components") || !j["components"].is_array() || j["components"].empty()) {
        throw validation_error(path + ": components must be a non-empty array");
    }
    for (const json& row : j["components"]) {
        if (!row.is_array() || row.size() != kNumFrequencies) {
            throw validation_error(path + ": each component must have 6 entries");
        }
        std::array<double, kNumFrequencies> component{};
        for (std::size_t i = 0; i < kNumFrequencies; ++i) component[i] = row[i].get<double>();
        model.components.push_back(component);
    }
    if (!j.contains("explained_variance_ratio") ||
        j["explained_variance_ratio"].size() != model.components.size()) {
        throw validation_error(path + ": explained_variance_ratio must match the component count");
    }
    for (const json& v : j["explained_variance_ratio"]) {
        model.explained_variance_ratio.push_back(v.get<double>());
    }
    return model;
}

void save_pca(const PcaModel& model, const std::string& path) {
    json j;
    j["mean"] = model.mean.gains;
    j["components"] = model.components;
    j["explained_variance_ratio"] = model.explained_variance_ratio;
    write_file_checked(path, j.dump(2) + "\n");
}

void save_grid(const CandidateGrid& grid, const std::string& path) {
    json j;
    j["box_min"] = {grid.box_min.x, grid.box_min.y};
    j["box_max"] = {grid.box_max.x, grid.box_max.y};
    j["steps_x"] = grid.steps_x;
    j["steps_y"] = grid.steps_y;
    json points = json::array();
    for (const Point2& p : grid.points) points.push_back({p.x, p.y});
    j["points"] = std::move(points);
    json lifted = json::array();
    for (const Configuration& config : grid.lifted) lifted.push_back(config_to_json(config));
    j["lifted"] = std::move(lifted);
    write_file_checked(path, j.dump(2) + "\n");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    write_file_checked(path, content);
}

}  // namespace hacover
