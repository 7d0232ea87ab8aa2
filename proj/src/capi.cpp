#include "hacover.h"

#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "hacover/config.hpp"
#include "hacover/coverage.hpp"
#include "hacover/dataset.hpp"
#include "hacover/error.hpp"
#include "hacover/experiments.hpp"
#include "hacover/io.hpp"
#include "hacover/optimize.hpp"
#include "hacover/pca.hpp"
#include "hacover/slider.hpp"
#include "hacover/synth.hpp"
#include "hacover/transfer.hpp"

struct hacover_dataset {
    hacover::Dataset value;
};
struct hacover_bank {
    hacover::TransferFunctionBank value;
};
struct hacover_pca {
    hacover::PcaModel value;
};
struct hacover_grid {
    hacover::CandidateGrid value;
    hacover::PcaModel model;  // kept so slider positions can be lifted later
};
struct hacover_presets {
    hacover::PresetSet value;
};
struct hacover_report {
    hacover::CoverageReport value;
};
struct hacover_selection {
    hacover::SelectionResult value;
};

namespace {

thread_local std::string g_last_error;

hacover_status fail(hacover_status status, const char* what) {
    g_last_error = what;
    return status;
}

// Runs `body`, translating the exception hierarchy onto status codes.
template <typename Body>
hacover_status guarded(Body&& body) {
    try {
        body();
        return HACOVER_OK;
    } catch (const hacover::parameter_error& e) {
        return fail(HACOVER_ERR_PARAMETER, e.what());
    } catch (const hacover::validation_error& e) {
        return fail(HACOVER_ERR_VALIDATION, e.what());
    } catch (const hacover::io_error& e) {
        return fail(HACOVER_ERR_IO, e.what());
    } catch (const hacover::fit_error& e) {
        return fail(HACOVER_ERR_VALIDATION, e.what());
    } catch (const std::exception& e) {
        return fail(HACOVER_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(HACOVER_ERR_INTERNAL, "unknown error");
    }
}

hacover_status require(bool ok, const char* message) {
    return ok ? HACOVER_OK : fail(HACOVER_ERR_PARAMETER, message);
}

hacover::CoverageParams to_params(const hacover_coverage_params* params) {
    hacover::CoverageParams out;
    if (params != nullptr) {
        out.radius = params->radius;
        out.gamma = params->gamma;
    }
    return out;
}

}  // namespace

extern "C" {

const char* hacover_version(void) { return "0.1.0"; }

const char* hacover_last_error(void) { return g_last_error.c_str(); }

void hacover_coverage_params_init(hacover_coverage_params* params) {
    if (params == nullptr) return;
    const hacover::CoverageParams defaults;
    params->radius = defaults.radius;
    params->gamma = defaults.gamma;
}

hacover_status hacover_dataset_load(const char* csv_path, hacover_dataset** out) {
    if (require(csv_path && out, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] { *out = new hacover_dataset{hacover::load_dataset(csv_path)}; });
}

hacover_status hacover_dataset_save(const hacover_dataset* dataset, const char* csv_path) {
    if (require(dataset && csv_path, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] { hacover::save_dataset(dataset->value, csv_path); });
}

size_t hacover_dataset_user_count(const hacover_dataset* dataset) {
    return dataset ? dataset->value.user_count() : 0;
}

size_t hacover_dataset_row_count(const hacover_dataset* dataset) {
    return dataset ? dataset->value.prescription_row_count() : 0;
}

void hacover_dataset_free(hacover_dataset* dataset) { delete dataset; }

void hacover_synth_spec_init(hacover_synth_spec* spec) {
    if (spec == nullptr) return;
    const hacover::SynthSpec defaults;
    spec->n_users = defaults.n_users;
    spec->bilateral_fraction = defaults.bilateral_fraction;
    spec->n_profiles = defaults.n_profiles;
    spec->profile_spread_db = defaults.profile_spread_db;
    spec->noise_std_db = defaults.noise_std_db;
    spec->off_plane_std_db = defaults.off_plane_std_db;
    spec->weight_concentration = defaults.weight_concentration;
    spec->male_fraction = defaults.male_fraction;
    spec->age_min = defaults.age_min;
    spec->age_max = defaults.age_max;
    spec->ear_offset_std_db = defaults.ear_offset_std_db;
    spec->seed = defaults.seed;
}

hacover_status hacover_dataset_synth(const hacover_synth_spec* spec, hacover_dataset** out) {
    if (require(spec && out, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] {
        hacover::SynthSpec s;
        s.n_users = spec->n_users;
        s.bilateral_fraction = spec->bilateral_fraction;
        s.n_profiles = spec->n_profiles;
        s.profile_spread_db = spec->profile_spread_db;
        s.noise_std_db = spec->noise_std_db;
        s.off_plane_std_db = spec->off_plane_std_db;
        s.weight_concentration = spec->weight_concentration;
        s.male_fraction = spec->male_fraction;
        s.age_min = spec->age_min;
        s.age_max = spec->age_max;
        s.ear_offset_std_db = spec->ear_offset_std_db;
        s.seed = spec->seed;
        *out = new hacover_dataset{hacover::synth_dataset(s)};
    });
}

hacover_status hacover_bank_build(double range_db, double step_db, hacover_bank** out) {
    if (require(out != nullptr, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] {
        auto bank = hacover::build_transfer_bank(range_db, step_db);
        // Start from the bundled default deviation model so a bank is usable
        // without an explicit weighting step.
        *out = new hacover_bank{hacover::variation_weights(bank, hacover::DeviationModel{})};
    });
}

size_t hacover_bank_size(const hacover_bank* bank) { return bank ? bank->value.size() : 0; }

hacover_status hacover_bank_weight(hacover_bank* bank, const char* deviations_csv, double scale) {
    if (require(bank != nullptr, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] {
        hacover::DeviationModel model;
        if (deviations_csv != nullptr && std::strlen(deviations_csv) > 0) {
            model = hacover::fit_deviation_model(hacover::load_deviation_points(deviations_csv));
        }
        bank->value = hacover::variation_weights(bank->value, model.with_scale(scale));
    });
}

void hacover_bank_free(hacover_bank* bank) { delete bank; }

hacover_status hacover_pca_fit(const hacover_dataset* dataset, int32_t components,
                               hacover_pca** out) {
    if (require(dataset && out, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] {
        std::vector<hacover::Configuration> configs;
        for (const auto& row : dataset->value.prescription_rows()) configs.push_back(row.config);
        *out = new hacover_pca{
            hacover::fit_pca(configs, static_cast<std::size_t>(components))};
    });
}

hacover_status hacover_pca_load(const char* json_path, hacover_pca** out) {
    if (require(json_path && out, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] { *out = new hacover_pca{hacover::load_pca(json_path)}; });
}

hacover_status hacover_pca_save(const hacover_pca* model, const char* json_path) {
    if (require(model && json_path, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] { hacover::save_pca(model->value, json_path); });
}

size_t hacover_pca_explained_variance(const hacover_pca* model, double* out, size_t capacity) {
    if (model == nullptr) return 0;
    const auto& ratios = model->value.explained_variance_ratio;
    if (out != nullptr) {
        for (size_t i = 0; i < ratios.size() && i < capacity; ++i) out[i] = ratios[i];
    }
    return ratios.size();
}

void hacover_pca_free(hacover_pca* model) { delete model; }

hacover_status hacover_grid_build(const hacover_pca* model, const hacover_dataset* dataset,
                                  const hacover_bank* bank, hacover_bbox_source source,
                                  int32_t steps_x, int32_t steps_y, hacover_grid** out) {
    if (require(model && dataset && bank && out, "null argument") != HACOVER_OK) {
        return HACOVER_ERR_PARAMETER;
    }
    return guarded([&] {
        const auto bbox = source == HACOVER_BBOX_PRESCRIPTIONS
                              ? hacover::BboxSource::prescriptions
                              : hacover::BboxSource::variations;
        const auto points =
            hacover::grid_source_points(model->value, dataset->value, bank->value, bbox);
        *out = new hacover_grid{hacover::build_grid(model->value, points, steps_x, steps_y),
                                model->value};
    });
}

size_t hacover_grid_size(const hacover_grid* grid) { return grid ? grid->value.size() : 0; }

hacover_status hacover_grid_save(const hacover_grid* grid, const char* json_path) {
    if (require(grid && json_path, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] { hacover::save_grid(grid->value, json_path); });
}

void hacover_grid_free(hacover_grid* grid) { delete grid; }

hacover_status hacover_presets_load(const char* json_path, hacover_presets** out) {
    if (require(json_path && out, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] { *out = new hacover_presets{hacover::load_presets(json_path)}; });
}

hacover_status hacover_presets_save(const hacover_presets* presets, const char* json_path) {
    if (require(presets && json_path, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] { hacover::save_presets(presets->value, json_path); });
}

size_t hacover_presets_size(const hacover_presets* presets) {
    return presets ? presets->value.size() : 0;
}

void hacover_presets_free(hacover_presets* presets) { delete presets; }

hacover_status hacover_population_coverage(const hacover_dataset* dataset,
                                           const hacover_presets* presets,
                                           const hacover_bank* bank,
                                           const hacover_coverage_params* params,
                                           hacover_report** out) {
    if (require(dataset && presets && bank && out, "null argument") != HACOVER_OK) {
        return HACOVER_ERR_PARAMETER;
    }
    return guarded([&] {
        *out = new hacover_report{hacover::population_coverage(dataset->value, presets->value,
                                                               bank->value, to_params(params))};
    });
}

double hacover_report_population_coverage(const hacover_report* report) {
    return report ? report->value.population_coverage : 0.0;
}

hacover_status hacover_report_save(const hacover_report* report, const char* json_path) {
    if (require(report && json_path, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] { hacover::save_report(report->value, json_path); });
}

void hacover_report_free(hacover_report* report) { delete report; }

void hacover_ga_params_init(hacover_ga_params* params) {
    if (params == nullptr) return;
    const hacover::GaParams defaults;
    params->population_size = defaults.population_size;
    params->iterations = defaults.iterations;
    params->elitism = defaults.elitism;
    params->crossover_fraction = defaults.crossover_fraction;
    params->local_improvement = defaults.local_improvement ? 1 : 0;
}

hacover_status hacover_optimize(hacover_method method, const hacover_grid* grid,
                                const hacover_dataset* dataset, const hacover_bank* bank,
                                const hacover_coverage_params* params, int32_t n, uint64_t seed,
                                const hacover_ga_params* ga, hacover_selection** out) {
    if (require(dataset && bank && out, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    if (method != HACOVER_METHOD_KMEANS &&
        require(grid != nullptr, "this method needs a candidate grid") != HACOVER_OK) {
        return HACOVER_ERR_PARAMETER;
    }
    return guarded([&] {
        const auto cov = to_params(params);
        const auto count = static_cast<std::size_t>(n);
        hacover::SelectionResult result;
        switch (method) {
            case HACOVER_METHOD_GREEDY:
                result = hacover::greedy_select(grid->value, dataset->value, bank->value, cov, count);
                break;
            case HACOVER_METHOD_GA: {
                hacover::GaParams ga_params;
                if (ga != nullptr) {
                    ga_params.population_size = ga->population_size;
                    ga_params.iterations = ga->iterations;
                    ga_params.elitism = ga->elitism;
                    ga_params.crossover_fraction = ga->crossover_fraction;
                    ga_params.local_improvement = ga->local_improvement != 0;
                }
                ga_params.seed = seed;
                result = hacover::ga_select(grid->value, dataset->value, bank->value, cov, count,
                                            ga_params);
                break;
            }
            case HACOVER_METHOD_KMEANS: {
                const auto variations = hacover::collect_variations(dataset->value, bank->value);
                result = hacover::kmeans_presets(variations, dataset->value, bank->value, cov, count,
                                                 seed);
                break;
            }
            case HACOVER_METHOD_BRUTE:
                result = hacover::brute_force_select(grid->value, dataset->value, bank->value, cov,
                                                     count);
                break;
            default:
                throw hacover::parameter_error("unknown optimization method");
        }
        *out = new hacover_selection{std::move(result)};
    });
}

double hacover_selection_coverage(const hacover_selection* selection) {
    return selection ? selection->value.coverage : 0.0;
}

hacover_status hacover_selection_save(const hacover_selection* selection, const char* json_path) {
    if (require(selection && json_path, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] { hacover::save_selection(selection->value, json_path); });
}

hacover_status hacover_selection_presets(const hacover_selection* selection, hacover_presets** out) {
    if (require(selection && out, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] { *out = new hacover_presets{selection->value.presets}; });
}

void hacover_selection_free(hacover_selection* selection) { delete selection; }

hacover_status hacover_slider_presets(const hacover_pca* model, const hacover_dataset* dataset,
                                      const hacover_bank* bank, hacover_bbox_source source,
                                      int32_t steps_x, int32_t steps_y, hacover_presets** out) {
    if (require(model && dataset && bank && out, "null argument") != HACOVER_OK) {
        return HACOVER_ERR_PARAMETER;
    }
    return guarded([&] {
        hacover::SliderSpec spec;
        spec.steps_x = steps_x;
        spec.steps_y = steps_y;
        spec.bbox_source = source == HACOVER_BBOX_PRESCRIPTIONS ? hacover::BboxSource::prescriptions
                                                                : hacover::BboxSource::variations;
        *out = new hacover_presets{
            hacover::slider_presets(model->value, spec, dataset->value, bank->value)};
    });
}

hacover_status hacover_experiment_run(const char* kind, const char* config_path,
                                      const char* overrides, const char* out_dir) {
    if (require(kind && out_dir, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] {
        hacover::ConfigFile config;
        if (config_path != nullptr && std::strlen(config_path) > 0) {
            config = hacover::ConfigFile::parse_file(config_path);
        }
        if (overrides != nullptr && std::strlen(overrides) > 0) {
            config.merge(hacover::ConfigFile::parse(overrides));
        }
        hacover::run_experiment(kind, config, out_dir);
    });
}

hacover_status hacover_plot_pca_scatter(const hacover_dataset* dataset, const hacover_bank* bank,
                                        const hacover_pca* model, const hacover_presets* presets,
                                        const hacover_coverage_params* params,
                                        int32_t include_variations, const char* out_csv) {
    if (require(dataset && model && presets && out_csv, "null argument") != HACOVER_OK) {
        return HACOVER_ERR_PARAMETER;
    }
    return guarded([&] {
        hacover::PcaScatterInputs inputs;
        inputs.dataset = &dataset->value;
        inputs.bank = bank ? &bank->value : nullptr;
        inputs.model = &model->value;
        inputs.presets = &presets->value;
        inputs.params = to_params(params);
        inputs.include_variations = include_variations != 0;
        hacover::write_pca_scatter_csv(inputs, out_csv);
    });
}

hacover_status hacover_plot_coverage_vs_n(const char* sweep_csv, const char* out_csv) {
    if (require(sweep_csv && out_csv, "null argument") != HACOVER_OK) return HACOVER_ERR_PARAMETER;
    return guarded([&] {
        const std::string text = hacover::read_text_file(sweep_csv);
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line)) throw hacover::validation_error("empty sweep file");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("method,N,coverage", 0) != 0) {
            throw hacover::validation_error("sweep file must start with method,N,coverage");
        }
        std::ostringstream out;
        out << "method,N,coverage\n";
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string method, n, coverage;
            if (!std::getline(row, method, ',') || !std::getline(row, n, ',') ||
                !std::getline(row, coverage, ',')) {
                throw hacover::validation_error("malformed sweep row: " + line);
            }
            out << method << ',' << n << ',' << coverage << "\n";
        }
        hacover::write_text_file(out_csv, out.str());
    });
}

}  // extern "C"
