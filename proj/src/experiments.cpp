#include "hacover/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "json.hpp"

#include "hacover/error.hpp"
#include "hacover/io.hpp"
#include "hacover/slider.hpp"

namespace hacover {

namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream per (base seed, salt); salts are small structured ints.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    return splitmix64(base ^ splitmix64(salt));
}

void check_revalidation(double claimed, const Dataset& dataset, const PresetSet& presets,
                        const TransferFunctionBank& bank, const CoverageParams& params) {
    const double direct = population_coverage(dataset, presets, bank, params).population_coverage;
    if (direct != claimed) {
        throw error("coverage revalidation failed: selection reports " + format_double(claimed) +
                    ", direct recomputation gives " + format_double(direct));
    }
}

int method_rank(const std::string& method) {
    if (method == "greedy") return 0;
    if (method == "ga") return 1;
    if (method == "kmeans") return 2;
    if (method == "brute") return 3;
    throw parameter_error("unknown method: \"" + method + "\"");
}

SelectionResult run_method(const std::string& method, const CandidateGrid& grid,
                           const Dataset& dataset, const TransferFunctionBank& bank,
                           const CoverageParams& params, std::size_t n, std::uint64_t seed,
                           const GaParams& ga) {
    if (method == "greedy") return greedy_select(grid, dataset, bank, params, n);
    if (method == "ga") {
        GaParams seeded = ga;
        seeded.seed = seed;
        return ga_select(grid, dataset, bank, params, n, seeded);
    }
    if (method == "kmeans") {
        const auto variations = collect_variations(dataset, bank);
        return kmeans_presets(variations, dataset, bank, params, n, seed);
    }
    if (method == "brute") return brute_force_select(grid, dataset, bank, params, n);
    throw parameter_error("unknown method: \"" + method + "\"");
}

}  // namespace

std::vector<SweepRow> sweep(const Dataset& dataset, const TransferFunctionBank& bank,
                            const CoverageParams& params, const CandidateGrid& grid,
                            const std::vector<int>& ns, const std::vector<std::string>& methods,
                            std::uint64_t seed, const GaParams& ga) {
    if (methods.empty()) throw parameter_error("no methods requested");
    if (ns.empty()) throw parameter_error("no preset counts requested");
    for (int n : ns) {
        if (n < 1) throw parameter_error("preset counts must be at least 1");
    }
    for (const std::string& method : methods) method_rank(method);

    std::vector<SweepRow> rows;
    for (const std::string& method : methods) {
        for (int n : ns) {
            const std::uint64_t row_seed =
                derive_seed(seed, static_cast<std::uint64_t>(n) * 4 +
                                      static_cast<std::uint64_t>(method_rank(method)));
            const auto start = std::chrono::steady_clock::now();
            const SelectionResult result =
                run_method(method, grid, dataset, bank, params, static_cast<std::size_t>(n), row_seed, ga);
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            check_revalidation(result.coverage, dataset, result.presets, bank, params);

            SweepRow row;
            row.method = method;
            row.n = n;
            row.coverage = result.coverage;
            row.wall_time_s = elapsed.count();
            row.seed = method == "greedy" || method == "brute" ? 0 : row_seed;
            row.presets = result.presets;
            rows.push_back(std::move(row));
        }
    }
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.method != b.method) return a.method < b.method;
        return a.n < b.n;
    });
    return rows;
}

std::vector<SubgroupRow> subgroup_analysis(const Dataset& dataset,
                                           const std::vector<SubgroupPredicate>& predicates,
                                           const CandidateGrid& grid,
                                           const TransferFunctionBank& bank,
                                           const CoverageParams& params, const std::vector<int>& ns,
                                           const std::string& method, std::uint64_t seed,
                                           const GaParams& ga) {
    if (predicates.empty()) throw parameter_error("no subgroup predicates");
    if (ns.empty()) throw parameter_error("no preset counts requested");
    method_rank(method);

    // Global presets once per N, shared across subgroups.
    std::vector<SelectionResult> global;
    global.reserve(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        global.push_back(run_method(method, grid, dataset, bank, params,
                                    static_cast<std::size_t>(ns[i]), derive_seed(seed, i), ga));
        check_revalidation(global.back().coverage, dataset, global.back().presets, bank, params);
    }

    std::vector<SubgroupRow> rows;
    for (std::size_t p = 0; p < predicates.size(); ++p) {
        const SubgroupPredicate& predicate = predicates[p];
        std::vector<bool> keep(dataset.user_count());
        std::size_t matched = 0;
        double weight_share = 0.0;
        for (std::size_t u = 0; u < dataset.user_count(); ++u) {
            keep[u] = predicate.matches(dataset.users[u]);
            if (keep[u]) {
                ++matched;
                weight_share += dataset.users[u].weight;
            }
        }
        if (matched == 0) {
            throw validation_error("subgroup predicate matches no users: \"" + predicate.text + "\"");
        }
        const Dataset subgroup = subset_dataset(dataset, keep);

        for (std::size_t i = 0; i < ns.size(); ++i) {
            const double on_subgroup =
                population_coverage(subgroup, global[i].presets, bank, params).population_coverage;
            const SelectionResult own =
                run_method(method, grid, subgroup, bank, params, static_cast<std::size_t>(ns[i]),
                           derive_seed(seed, (p + 1) * 1000 + i), ga);
            check_revalidation(own.coverage, subgroup, own.presets, bank, params);

            SubgroupRow row;
            row.predicate = predicate.text;
            row.n = ns[i];
            row.user_count = matched;
            row.weight_share = weight_share;
            row.global_presets_coverage = on_subgroup;
            row.subgroup_presets_coverage = own.coverage;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

double BootstrapResult::mean(std::size_t n_index) const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const BootstrapReplicate& rep : replicates) {
        if (rep.skipped) continue;
        sum += rep.coverage.at(n_index);
        ++count;
    }
    if (count == 0) throw error("no completed bootstrap replicates");
    return sum / static_cast<double>(count);
}

double BootstrapResult::stddev(std::size_t n_index) const {
    const double m = mean(n_index);
    double ss = 0.0;
    std::size_t count = 0;
    for (const BootstrapReplicate& rep : replicates) {
        if (rep.skipped) continue;
        const double d = rep.coverage.at(n_index) - m;
        ss += d * d;
        ++count;
    }
    if (count < 2) return 0.0;
    return std::sqrt(ss / static_cast<double>(count - 1));
}

BootstrapResult bootstrap_coverage(const std::vector<std::pair<double, double>>& deviation_points,
                                   int samples, const CandidateGrid& grid, const Dataset& dataset,
                                   const TransferFunctionBank& base_bank,
                                   const CoverageParams& params, const std::vector<int>& ns,
                                   std::uint64_t seed) {
    if (deviation_points.size() < 2) throw parameter_error("need at least 2 deviation points");
    if (samples < 2) throw parameter_error("need at least 2 bootstrap samples");
    if (ns.empty()) throw parameter_error("no preset counts requested");
    params.validate();

    // Geometry does not depend on the likelihood weights, so one matrix
    // serves every replicate; only the weights are swapped.
    CoverageMatrix matrix = precompute_matrix(grid.lifted, dataset, base_bank, params);

    BootstrapResult result;
    result.ns = ns;
    for (int rep_index = 0; rep_index < samples; ++rep_index) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(rep_index)));
        std::uniform_int_distribution<std::size_t> pick(0, deviation_points.size() - 1);
        std::vector<std::pair<double, double>> resample;
        resample.reserve(deviation_points.size());
        for (std::size_t i = 0; i < deviation_points.size(); ++i) {
            resample.push_back(deviation_points[pick(rng)]);
        }

        BootstrapReplicate replicate;
        replicate.index = rep_index;
        try {
            const DeviationModel model = fit_deviation_model(resample);
            const TransferFunctionBank bank = variation_weights(base_bank, model);
            matrix.set_bank_weights(bank.weights);
            for (int n : ns) {
                SelectionResult selection = greedy_select_matrix(matrix, params, static_cast<std::size_t>(n));
                PresetSet presets;
                for (std::size_t c : selection.chosen_indices) presets.presets.push_back(grid.lifted[c]);
                check_revalidation(selection.coverage, dataset, presets, bank, params);
                replicate.coverage.push_back(selection.coverage);
            }
            ++result.completed;
        } catch (const fit_error& e) {
            replicate.skipped = true;
            replicate.reason = e.what();
            replicate.coverage.clear();
            ++result.skipped;
        }
        result.replicates.push_back(std::move(replicate));
    }
    return result;
}

std::vector<ScaleRow> variance_scaling(const std::vector<double>& scales,
                                       const DeviationModel& model,
                                       const TransferFunctionBank& base_bank,
                                       const CandidateGrid& grid, const Dataset& dataset,
                                       const CoverageParams& params, const std::vector<int>& ns) {
    if (scales.empty()) throw parameter_error("no scales requested");
    if (ns.empty()) throw parameter_error("no preset counts requested");
    for (double s : scales) {
        if (!(s > 0.0)) throw parameter_error("scales must be positive");
    }

    CoverageMatrix matrix = precompute_matrix(grid.lifted, dataset, base_bank, params);
    std::vector<ScaleRow> rows;
    for (double scale : scales) {
        const TransferFunctionBank bank = variation_weights(base_bank, model.with_scale(scale));
        matrix.set_bank_weights(bank.weights);
        for (int n : ns) {
            SelectionResult selection = greedy_select_matrix(matrix, params, static_cast<std::size_t>(n));
            PresetSet presets;
            for (std::size_t c : selection.chosen_indices) presets.presets.push_back(grid.lifted[c]);
            check_revalidation(selection.coverage, dataset, presets, bank, params);
            rows.push_back({scale, n, selection.coverage});
        }
    }
    return rows;
}

PlotKind plot_kind_from_string(const std::string& kind) {
    if (kind == "coverage_vs_n") return PlotKind::coverage_vs_n;
    if (kind == "pca_scatter") return PlotKind::pca_scatter;
    throw parameter_error("unknown plot kind: \"" + kind + "\"");
}

void write_coverage_vs_n_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << "method,N,coverage\n";
    for (const SweepRow& row : rows) {
        out << row.method << ',' << row.n << ',' << format_double(row.coverage) << "\n";
    }
    write_text_file(path, out.str());
}

void write_pca_scatter_csv(const PcaScatterInputs& inputs, const std::string& path) {
    if (!inputs.dataset || !inputs.model || !inputs.presets) {
        throw parameter_error("pca scatter needs a dataset, a reduction model, and presets");
    }
    if (inputs.include_variations && !inputs.bank) {
        throw parameter_error("pca scatter with variations needs a transfer bank");
    }
    inputs.params.validate();

    std::ostringstream out;
    out << "kind,x,y,covered,g500,g1000,g2000,g3000,g4000,g6000\n";
    const auto emit = [&](const char* kind, const Configuration& config) {
        const Point2 p = transform(*inputs.model, config);
        const bool covered = is_covered(config, *inputs.presets, inputs.params.radius);
        out << kind << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
            << (covered ? 1 : 0);
        for (double g : config.gains) out << ',' << format_double(g);
        out << "\n";
    };

    for (const PrescriptionRow& row : inputs.dataset->prescription_rows()) {
        emit("prescription", row.config);
    }
    if (inputs.include_variations) {
        for (const auto& [config, mass] : collect_variations(*inputs.dataset, *inputs.bank)) {
            emit("variation", config);
        }
    }
    for (const Configuration& preset : inputs.presets->presets) emit("preset", preset);
    write_text_file(path, out.str());
}

namespace {

bool parse_bool(const ConfigFile& config, const std::string& key, bool fallback) {
    const std::string raw = config.get_string(key, fallback ? "true" : "false");
    if (raw == "true") return true;
    if (raw == "false") return false;
    throw validation_error("config key " + key + ": expected true or false");
}

std::vector<int> to_int_vector(const std::vector<long long>& values, const std::string& key) {
    std::vector<int> out;
    out.reserve(values.size());
    for (long long v : values) {
        if (v < 1 || v > 1'000'000) throw validation_error("config key " + key + ": value out of range");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

}  // namespace

void run_experiment(const std::string& kind, const ConfigFile& config, const std::string& out_dir) {
    const std::string dataset_path = config.get_string("dataset", "");
    if (dataset_path.empty()) throw validation_error("experiment config needs a dataset path");

    CoverageParams params;
    params.radius = config.get_double("radius", params.radius);
    params.gamma = config.get_double("gamma", params.gamma);
    params.validate();

    const double tf_range = config.get_double("tf_range", 15.0);
    const double tf_step = config.get_double("tf_step", 3.75);
    const std::string deviations_path = config.get_string("deviations", "");
    const auto grid_x = static_cast<int>(config.get_int("grid_x", 10));
    const auto grid_y = static_cast<int>(config.get_int("grid_y", 10));
    const std::string bbox_source_name = config.get_string("bbox_source", "variations");
    const auto seed = static_cast<std::uint64_t>(config.get_int("seed", 0));
    const std::vector<int> ns = to_int_vector(
        config.get_int_list("ns", kind == "sweep"
                                      ? std::vector<long long>{5, 10, 15, 20, 25, 30, 35, 40}
                                      : std::vector<long long>{10}),
        "ns");

    GaParams ga;
    ga.population_size = static_cast<int>(config.get_int("ga_population", ga.population_size));
    ga.iterations = static_cast<int>(config.get_int("ga_iterations", ga.iterations));
    ga.elitism = static_cast<int>(config.get_int("ga_elitism", ga.elitism));
    ga.crossover_fraction = config.get_double("ga_crossover", ga.crossover_fraction);
    ga.local_improvement = parse_bool(config, "ga_local", ga.local_improvement);
    ga.validate();

    std::string warning;
    const Dataset dataset = load_dataset(dataset_path, &warning);

    DeviationModel deviation_model;  // synthetic default: mean 0, std 5 dB
    std::vector<std::pair<double, double>> deviation_points;
    bool synthetic_default_deviations = true;
    if (!deviations_path.empty()) {
        deviation_points = load_deviation_points(deviations_path);
        deviation_model = fit_deviation_model(deviation_points);
        synthetic_default_deviations = false;
    }
    const TransferFunctionBank base_bank = build_transfer_bank(tf_range, tf_step);
    const TransferFunctionBank bank = variation_weights(base_bank, deviation_model);

    std::vector<Configuration> row_configs;
    for (const PrescriptionRow& row : dataset.prescription_rows()) row_configs.push_back(row.config);
    const PcaModel model = fit_pca(row_configs, 2);
    const BboxSource bbox_source = bbox_source_from_string(bbox_source_name);
    const auto source_points = grid_source_points(model, dataset, bank, bbox_source);
    const CandidateGrid grid = build_grid(model, source_points, grid_x, grid_y);

    std::filesystem::create_directories(out_dir);
    const auto out_path = [&](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };

    json manifest;
    manifest["kind"] = kind;
    manifest["dataset"] = dataset_path;
    manifest["dataset_users"] = dataset.user_count();
    manifest["dataset_rows"] = dataset.prescription_row_count();
    manifest["deviations"] = synthetic_default_deviations ? "synthetic_default" : deviations_path;
    manifest["deviation_model"] = {{"mean", deviation_model.mean},
                                   {"std", deviation_model.std},
                                   {"scale", deviation_model.scale}};
    manifest["radius"] = params.radius;
    manifest["gamma"] = params.gamma;
    manifest["tf_range"] = tf_range;
    manifest["tf_step"] = tf_step;
    manifest["bank_size"] = bank.size();
    manifest["grid_x"] = grid_x;
    manifest["grid_y"] = grid_y;
    manifest["bbox_source"] = bbox_source_name;
    manifest["seed"] = seed;
    manifest["ns"] = ns;
    manifest["ga"] = {{"population_size", ga.population_size},
                      {"iterations", ga.iterations},
                      {"elitism", ga.elitism},
                      {"crossover_fraction", ga.crossover_fraction},
                      {"local_improvement", ga.local_improvement}};
    if (!warning.empty()) manifest["dataset_warning"] = warning;

    std::vector<std::string> outputs;
    if (kind == "sweep") {
        const std::vector<std::string> methods =
            config.get_string_list("methods", {"greedy", "ga", "kmeans"});
        manifest["methods"] = methods;
        const auto rows = sweep(dataset, bank, params, grid, ns, methods, seed, ga);

        std::ostringstream csv;
        csv << "method,N,coverage,wall_time_s,seed\n";
        for (const SweepRow& row : rows) {
            csv << row.method << ',' << row.n << ',' << format_double(row.coverage) << ','
                << format_double(row.wall_time_s) << ',' << row.seed << "\n";
        }
        write_text_file(out_path("sweep.csv"), csv.str());
        write_coverage_vs_n_csv(rows, out_path("coverage_vs_n.csv"));
        outputs = {"sweep.csv", "coverage_vs_n.csv"};
    } else if (kind == "bootstrap") {
        if (synthetic_default_deviations) {
            throw validation_error("bootstrap needs a deviations file to resample");
        }
        const auto samples = static_cast<int>(config.get_int("samples", 50));
        manifest["samples"] = samples;
        const BootstrapResult result =
            bootstrap_coverage(deviation_points, samples, grid, dataset, base_bank, params, ns, seed);

        std::ostringstream csv;
        csv << "replicate,status,reason,n,coverage\n";
        for (const BootstrapReplicate& rep : result.replicates) {
            if (rep.skipped) {
                csv << rep.index << ",skipped,\"" << rep.reason << "\",,\n";
            } else {
                for (std::size_t i = 0; i < ns.size(); ++i) {
                    csv << rep.index << ",ok,," << ns[i] << ',' << format_double(rep.coverage[i]) << "\n";
                }
            }
        }
        write_text_file(out_path("bootstrap.csv"), csv.str());

        std::ostringstream summary;
        summary << "n,mean,stddev,completed,skipped\n";
        for (std::size_t i = 0; i < ns.size(); ++i) {
            summary << ns[i] << ',' << format_double(result.mean(i)) << ','
                    << format_double(result.stddev(i)) << ',' << result.completed << ','
                    << result.skipped << "\n";
        }
        write_text_file(out_path("bootstrap_summary.csv"), summary.str());
        outputs = {"bootstrap.csv", "bootstrap_summary.csv"};
    } else if (kind == "variance_scale") {
        const std::vector<double> scales = config.get_double_list("scales", {0.5, 1.0, 1.5});
        manifest["scales"] = scales;
        const auto rows = variance_scaling(scales, deviation_model, base_bank, grid, dataset, params, ns);

        std::ostringstream csv;
        csv << "scale,n,coverage\n";
        for (const ScaleRow& row : rows) {
            csv << format_double(row.scale) << ',' << row.n << ',' << format_double(row.coverage) << "\n";
        }
        write_text_file(out_path("variance_scale.csv"), csv.str());
        outputs = {"variance_scale.csv"};
    } else if (kind == "subgroup") {
        const std::vector<std::string> predicate_texts = config.get_string_list(
            "predicates", {"sex == male & age <= 65", "sex == male & age > 65",
                           "sex == female & age <= 65", "sex == female & age > 65"});
        const std::string method = config.get_string("method", "ga");
        manifest["predicates"] = predicate_texts;
        manifest["method"] = method;

        std::vector<SubgroupPredicate> predicates;
        predicates.reserve(predicate_texts.size());
        for (const std::string& text : predicate_texts) predicates.push_back(parse_predicate(text));
        const auto rows = subgroup_analysis(dataset, predicates, grid, bank, params, ns, method, seed, ga);

        std::ostringstream csv;
        csv << "predicate,n,user_count,weight_share,global_coverage,subgroup_coverage\n";
        for (const SubgroupRow& row : rows) {
            csv << '"' << row.predicate << "\"," << row.n << ',' << row.user_count << ','
                << format_double(row.weight_share) << ',' << format_double(row.global_presets_coverage)
                << ',' << format_double(row.subgroup_presets_coverage) << "\n";
        }
        write_text_file(out_path("subgroup.csv"), csv.str());
        outputs = {"subgroup.csv"};
    } else {
        throw parameter_error("unknown experiment kind: \"" + kind + "\"");
    }

    manifest["outputs"] = outputs;
    write_text_file(out_path("manifest.json"), manifest.dump(2) + "\n");
}

}  // namespace hacover
