// Command-line front end. Everything goes through the shared library's C API;
// this file only parses flags, wires files together, and echoes parameters
// into manifest.json files.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hacover.h"

namespace {

using nlohmann::json;

template <typename T, void (*Free)(T*)>
class Handle {
  public:
    Handle() = default;
    ~Handle() { Free(ptr_); }
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    T** out() {
        Free(ptr_);
        ptr_ = nullptr;
        return &ptr_;
    }
    T* get() const { return ptr_; }

  private:
    T* ptr_ = nullptr;
};

using DatasetHandle = Handle<hacover_dataset, hacover_dataset_free>;
using BankHandle = Handle<hacover_bank, hacover_bank_free>;
using PcaHandle = Handle<hacover_pca, hacover_pca_free>;
using GridHandle = Handle<hacover_grid, hacover_grid_free>;
using PresetsHandle = Handle<hacover_presets, hacover_presets_free>;
using ReportHandle = Handle<hacover_report, hacover_report_free>;
using SelectionHandle = Handle<hacover_selection, hacover_selection_free>;

int exit_code_for(hacover_status status) {
    return status == HACOVER_ERR_INTERNAL ? 2 : 1;
}

// Evaluates a C API call; on failure prints the error and returns the exit
// code from the enclosing function.
#define RUN(expr)                                                    \
    do {                                                             \
        const hacover_status run_status_ = (expr);                   \
        if (run_status_ != HACOVER_OK) {                             \
            std::fprintf(stderr, "error: %s\n", hacover_last_error()); \
            return exit_code_for(run_status_);                       \
        }                                                            \
    } while (0)

struct CommonOpts {
    double radius = 5.0;
    double gamma = 0.8;
    double tf_range = 15.0;
    double tf_step = 3.75;
    std::string deviations;

    hacover_coverage_params params() const { return {radius, gamma}; }

    void add_flags(CLI::App* app) {
        app->add_option("--radius", radius, "Chebyshev coverage radius in dB")
            ->capture_default_str();
        app->add_option("--gamma", gamma, "likelihood-mass threshold for a covered fit")
            ->capture_default_str();
        app->add_option("--tf-range", tf_range, "transfer anchor range in dB")
            ->capture_default_str();
        app->add_option("--tf-step", tf_step, "transfer anchor step in dB")->capture_default_str();
        app->add_option("--deviations", deviations,
                        "deviation evidence CSV (low_dev,high_dev); default is the built-in model");
    }

    json manifest_fragment() const {
        json j;
        j["radius"] = radius;
        j["gamma"] = gamma;
        j["tf_range"] = tf_range;
        j["tf_step"] = tf_step;
        j["deviations"] = deviations.empty() ? "synthetic_default" : deviations;
        return j;
    }
};

std::string default_manifest_path(const std::string& primary_out) {
    return (std::filesystem::path(primary_out).parent_path() / "manifest.json").string();
}

int write_manifest(const std::string& path, const json& manifest) {
    std::FILE* out = std::fopen(path.c_str(), "wb");
    if (out == nullptr) {
        std::fprintf(stderr, "error: cannot write manifest %s\n", path.c_str());
        return 1;
    }
    const std::string text = manifest.dump(2) + "\n";
    std::fwrite(text.data(), 1, text.size(), out);
    std::fclose(out);
    return 0;
}

int build_bank(const CommonOpts& common, double scale, BankHandle& bank) {
    RUN(hacover_bank_build(common.tf_range, common.tf_step, bank.out()));
    RUN(hacover_bank_weight(bank.get(), common.deviations.empty() ? nullptr : common.deviations.c_str(),
                            scale));
    return 0;
}

int load_or_fit_pca(const std::string& pca_path, const hacover_dataset* dataset, PcaHandle& pca) {
    if (!pca_path.empty()) {
        RUN(hacover_pca_load(pca_path.c_str(), pca.out()));
    } else {
        RUN(hacover_pca_fit(dataset, 2, pca.out()));
    }
    return 0;
}

hacover_bbox_source bbox_source_from(const std::string& name) {
    return name == "prescriptions" ? HACOVER_BBOX_PRESCRIPTIONS : HACOVER_BBOX_VARIATIONS;
}

// ---- subcommand options ----

struct SynthOpts {
    std::string out;
    std::string manifest;
    hacover_synth_spec spec{};
    long long seed = 0;
};

struct PcaOpts {
    std::string dataset;
    std::string out;
    std::string manifest;
    int components = 2;
};

struct GridOpts {
    std::string dataset;
    std::string pca;
    std::string out;
    std::string manifest;
    std::string bbox_source = "variations";
    int x_steps = 10;
    int y_steps = 10;
};

struct OptimizeOpts {
    std::string dataset;
    std::string pca;
    std::string out;
    std::string manifest;
    std::string method;
    std::string bbox_source = "variations";
    int x_steps = 10;
    int y_steps = 10;
    int n = 0;
    long long seed = 0;
    double scale = 1.0;
    hacover_ga_params ga{};
    bool ga_no_local = false;
};

struct CoverageOpts {
    std::string dataset;
    std::string presets;
    std::string out;
    std::string manifest;
};

struct SliderOpts {
    std::string dataset;
    std::string pca;
    std::string out;
    std::string presets_out;
    std::string manifest;
    std::string bbox_source = "variations";
    int x_steps = 10;
    int y_steps = 10;
};

struct ExperimentOpts {
    std::string config;
    std::string out_dir;
    std::string dataset;
    long long seed = 0;
    bool seed_given = false;
    std::vector<std::string> sets;
};

struct PlotOpts {
    std::string kind;
    std::string sweep;
    std::string dataset;
    std::string presets;
    std::string pca;
    std::string out;
    std::string manifest;
    bool no_variations = false;
};

// ---- subcommand handlers ----

int run_synth(const SynthOpts& opts) {
    hacover_synth_spec spec = opts.spec;
    spec.seed = static_cast<uint64_t>(opts.seed);
    DatasetHandle dataset;
    RUN(hacover_dataset_synth(&spec, dataset.out()));
    RUN(hacover_dataset_save(dataset.get(), opts.out.c_str()));
    std::printf("wrote %s (%zu users, %zu rows)\n", opts.out.c_str(),
                hacover_dataset_user_count(dataset.get()), hacover_dataset_row_count(dataset.get()));

    json manifest;
    manifest["command"] = "synth";
    manifest["out"] = opts.out;
    manifest["n_users"] = spec.n_users;
    manifest["bilateral_fraction"] = spec.bilateral_fraction;
    manifest["n_profiles"] = spec.n_profiles;
    manifest["profile_spread_db"] = spec.profile_spread_db;
    manifest["noise_std_db"] = spec.noise_std_db;
    manifest["off_plane_std_db"] = spec.off_plane_std_db;
    manifest["weight_concentration"] = spec.weight_concentration;
    manifest["male_fraction"] = spec.male_fraction;
    manifest["age_min"] = spec.age_min;
    manifest["age_max"] = spec.age_max;
    manifest["ear_offset_std_db"] = spec.ear_offset_std_db;
    manifest["seed"] = spec.seed;
    return write_manifest(opts.manifest.empty() ? default_manifest_path(opts.out) : opts.manifest,
                          manifest);
}

int run_pca(const PcaOpts& opts, const CommonOpts& common) {
    DatasetHandle dataset;
    RUN(hacover_dataset_load(opts.dataset.c_str(), dataset.out()));
    PcaHandle pca;
    RUN(hacover_pca_fit(dataset.get(), opts.components, pca.out()));
    RUN(hacover_pca_save(pca.get(), opts.out.c_str()));

    std::vector<double> ratios(static_cast<std::size_t>(opts.components));
    hacover_pca_explained_variance(pca.get(), ratios.data(), ratios.size());
    std::printf("explained variance ratios:");
    for (double r : ratios) std::printf(" %.6f", r);
    std::printf("\n");

    json manifest = common.manifest_fragment();
    manifest["command"] = "pca";
    manifest["dataset"] = opts.dataset;
    manifest["out"] = opts.out;
    manifest["components"] = opts.components;
    return write_manifest(opts.manifest.empty() ? default_manifest_path(opts.out) : opts.manifest,
                          manifest);
}

int run_grid(const GridOpts& opts, const CommonOpts& common) {
    DatasetHandle dataset;
    RUN(hacover_dataset_load(opts.dataset.c_str(), dataset.out()));
    BankHandle bank;
    if (int rc = build_bank(common, 1.0, bank)) return rc;
    PcaHandle pca;
    if (int rc = load_or_fit_pca(opts.pca, dataset.get(), pca)) return rc;
    GridHandle grid;
    RUN(hacover_grid_build(pca.get(), dataset.get(), bank.get(), bbox_source_from(opts.bbox_source),
                           opts.x_steps, opts.y_steps, grid.out()));
    RUN(hacover_grid_save(grid.get(), opts.out.c_str()));
    std::printf("wrote %s (%zu candidates)\n", opts.out.c_str(), hacover_grid_size(grid.get()));

    json manifest = common.manifest_fragment();
    manifest["command"] = "grid";
    manifest["dataset"] = opts.dataset;
    manifest["pca"] = opts.pca.empty() ? "fitted" : opts.pca;
    manifest["out"] = opts.out;
    manifest["bbox_source"] = opts.bbox_source;
    manifest["x_steps"] = opts.x_steps;
    manifest["y_steps"] = opts.y_steps;
    return write_manifest(opts.manifest.empty() ? default_manifest_path(opts.out) : opts.manifest,
                          manifest);
}

int run_optimize(const OptimizeOpts& opts, const CommonOpts& common) {
    hacover_method method;
    if (opts.method == "greedy") {
        method = HACOVER_METHOD_GREEDY;
    } else if (opts.method == "ga") {
        method = HACOVER_METHOD_GA;
    } else if (opts.method == "kmeans") {
        method = HACOVER_METHOD_KMEANS;
    } else if (opts.method == "brute") {
        method = HACOVER_METHOD_BRUTE;
    } else {
        std::fprintf(stderr, "error: unknown --method \"%s\"\n", opts.method.c_str());
        return 1;
    }

    DatasetHandle dataset;
    RUN(hacover_dataset_load(opts.dataset.c_str(), dataset.out()));
    BankHandle bank;
    if (int rc = build_bank(common, opts.scale, bank)) return rc;

    GridHandle grid;
    if (method != HACOVER_METHOD_KMEANS) {
        PcaHandle pca;
        if (int rc = load_or_fit_pca(opts.pca, dataset.get(), pca)) return rc;
        RUN(hacover_grid_build(pca.get(), dataset.get(), bank.get(),
                               bbox_source_from(opts.bbox_source), opts.x_steps, opts.y_steps,
                               grid.out()));
    }

    hacover_ga_params ga = opts.ga;
    ga.local_improvement = opts.ga_no_local ? 0 : 1;
    const hacover_coverage_params params = common.params();
    SelectionHandle selection;
    RUN(hacover_optimize(method, grid.get(), dataset.get(), bank.get(), &params, opts.n,
                         static_cast<uint64_t>(opts.seed), &ga, selection.out()));
    RUN(hacover_selection_save(selection.get(), opts.out.c_str()));
    std::printf("coverage %.6f\n", hacover_selection_coverage(selection.get()));

    json manifest = common.manifest_fragment();
    manifest["command"] = "optimize";
    manifest["dataset"] = opts.dataset;
    manifest["method"] = opts.method;
    manifest["n"] = opts.n;
    manifest["seed"] = opts.seed;
    manifest["scale"] = opts.scale;
    manifest["out"] = opts.out;
    if (method != HACOVER_METHOD_KMEANS) {
        manifest["pca"] = opts.pca.empty() ? "fitted" : opts.pca;
        manifest["bbox_source"] = opts.bbox_source;
        manifest["x_steps"] = opts.x_steps;
        manifest["y_steps"] = opts.y_steps;
    }
    if (method == HACOVER_METHOD_GA) {
        manifest["ga"] = {{"population_size", ga.population_size},
                          {"iterations", ga.iterations},
                          {"elitism", ga.elitism},
                          {"crossover_fraction", ga.crossover_fraction},
                          {"local_improvement", ga.local_improvement != 0}};
    }
    return write_manifest(opts.manifest.empty() ? default_manifest_path(opts.out) : opts.manifest,
                          manifest);
}

int run_coverage(const CoverageOpts& opts, const CommonOpts& common) {
    DatasetHandle dataset;
    RUN(hacover_dataset_load(opts.dataset.c_str(), dataset.out()));
    BankHandle bank;
    if (int rc = build_bank(common, 1.0, bank)) return rc;
    PresetsHandle presets;
    RUN(hacover_presets_load(opts.presets.c_str(), presets.out()));

    const hacover_coverage_params params = common.params();
    ReportHandle report;
    RUN(hacover_population_coverage(dataset.get(), presets.get(), bank.get(), &params, report.out()));
    std::printf("coverage %.6f\n", hacover_report_population_coverage(report.get()));
    if (!opts.out.empty()) RUN(hacover_report_save(report.get(), opts.out.c_str()));

    if (!opts.out.empty() || !opts.manifest.empty()) {
        json manifest = common.manifest_fragment();
        manifest["command"] = "coverage";
        manifest["dataset"] = opts.dataset;
        manifest["presets"] = opts.presets;
        if (!opts.out.empty()) manifest["out"] = opts.out;
        const std::string path =
            opts.manifest.empty() ? default_manifest_path(opts.out) : opts.manifest;
        return write_manifest(path, manifest);
    }
    return 0;
}

int run_slider(const SliderOpts& opts, const CommonOpts& common) {
    DatasetHandle dataset;
    RUN(hacover_dataset_load(opts.dataset.c_str(), dataset.out()));
    BankHandle bank;
    if (int rc = build_bank(common, 1.0, bank)) return rc;
    PcaHandle pca;
    if (int rc = load_or_fit_pca(opts.pca, dataset.get(), pca)) return rc;

    PresetsHandle presets;
    RUN(hacover_slider_presets(pca.get(), dataset.get(), bank.get(),
                               bbox_source_from(opts.bbox_source), opts.x_steps, opts.y_steps,
                               presets.out()));
    if (!opts.presets_out.empty()) RUN(hacover_presets_save(presets.get(), opts.presets_out.c_str()));

    const hacover_coverage_params params = common.params();
    ReportHandle report;
    RUN(hacover_population_coverage(dataset.get(), presets.get(), bank.get(), &params, report.out()));
    std::printf("coverage %.6f\n", hacover_report_population_coverage(report.get()));
    if (!opts.out.empty()) RUN(hacover_report_save(report.get(), opts.out.c_str()));

    if (!opts.out.empty() || !opts.manifest.empty()) {
        json manifest = common.manifest_fragment();
        manifest["command"] = "slider";
        manifest["dataset"] = opts.dataset;
        manifest["pca"] = opts.pca.empty() ? "fitted" : opts.pca;
        manifest["bbox_source"] = opts.bbox_source;
        manifest["x_steps"] = opts.x_steps;
        manifest["y_steps"] = opts.y_steps;
        if (!opts.out.empty()) manifest["out"] = opts.out;
        if (!opts.presets_out.empty()) manifest["presets_out"] = opts.presets_out;
        const std::string path =
            opts.manifest.empty() ? default_manifest_path(opts.out) : opts.manifest;
        return write_manifest(path, manifest);
    }
    return 0;
}

int run_experiment_cmd(const std::string& kind, const ExperimentOpts& opts,
                       const CommonOpts& common, const CLI::App* parent) {
    // Global flags and --set pairs become config overrides; later lines win.
    std::string overrides;
    const auto add = [&overrides](const std::string& key, const std::string& value) {
        overrides += key + " = " + value + "\n";
    };
    if (!opts.dataset.empty()) add("dataset", "\"" + opts.dataset + "\"");
    if (!common.deviations.empty()) add("deviations", "\"" + common.deviations + "\"");
    if (parent->count("--radius") > 0) add("radius", std::to_string(common.radius));
    if (parent->count("--gamma") > 0) add("gamma", std::to_string(common.gamma));
    if (parent->count("--tf-range") > 0) add("tf_range", std::to_string(common.tf_range));
    if (parent->count("--tf-step") > 0) add("tf_step", std::to_string(common.tf_step));
    if (opts.seed_given) add("seed", std::to_string(opts.seed));
    for (const std::string& expr : opts.sets) overrides += expr + "\n";

    RUN(hacover_experiment_run(kind.c_str(), opts.config.empty() ? nullptr : opts.config.c_str(),
                               overrides.empty() ? nullptr : overrides.c_str(),
                               opts.out_dir.c_str()));
    std::printf("wrote results to %s\n", opts.out_dir.c_str());
    return 0;
}

int run_plot(const PlotOpts& opts, const CommonOpts& common) {
    if (opts.kind == "coverage_vs_n") {
        if (opts.sweep.empty()) {
            std::fprintf(stderr, "error: --kind coverage_vs_n needs --sweep\n");
            return 1;
        }
        RUN(hacover_plot_coverage_vs_n(opts.sweep.c_str(), opts.out.c_str()));
    } else if (opts.kind == "pca_scatter") {
        if (opts.dataset.empty() || opts.presets.empty()) {
            std::fprintf(stderr, "error: --kind pca_scatter needs --dataset and --presets\n");
            return 1;
        }
        DatasetHandle dataset;
        RUN(hacover_dataset_load(opts.dataset.c_str(), dataset.out()));
        BankHandle bank;
        if (int rc = build_bank(common, 1.0, bank)) return rc;
        PcaHandle pca;
        if (int rc = load_or_fit_pca(opts.pca, dataset.get(), pca)) return rc;
        PresetsHandle presets;
        RUN(hacover_presets_load(opts.presets.c_str(), presets.out()));
        const hacover_coverage_params params = common.params();
        RUN(hacover_plot_pca_scatter(dataset.get(), bank.get(), pca.get(), presets.get(), &params,
                                     opts.no_variations ? 0 : 1, opts.out.c_str()));
    } else {
        std::fprintf(stderr, "error: unknown --kind \"%s\"\n", opts.kind.c_str());
        return 1;
    }
    std::printf("wrote %s\n", opts.out.c_str());

    json manifest = common.manifest_fragment();
    manifest["command"] = "plot-data";
    manifest["kind"] = opts.kind;
    if (!opts.sweep.empty()) manifest["sweep"] = opts.sweep;
    if (!opts.dataset.empty()) manifest["dataset"] = opts.dataset;
    if (!opts.presets.empty()) manifest["presets"] = opts.presets;
    manifest["out"] = opts.out;
    return write_manifest(opts.manifest.empty() ? default_manifest_path(opts.out) : opts.manifest,
                          manifest);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"population-coverage evaluation and preset optimization for hearing-aid gains"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts common;
    common.add_flags(&app);

    SynthOpts synth_opts;
    hacover_synth_spec_init(&synth_opts.spec);
    auto* synth = app.add_subcommand("synth", "generate a synthetic population CSV");
    synth->add_option("--out", synth_opts.out, "output dataset CSV")->required();
    synth->add_option("--users", synth_opts.spec.n_users, "user count")->capture_default_str();
    synth->add_option("--bilateral-fraction", synth_opts.spec.bilateral_fraction,
                      "fraction of bilateral users")
        ->capture_default_str();
    synth->add_option("--profiles", synth_opts.spec.n_profiles, "number of base profiles")
        ->capture_default_str();
    synth->add_option("--profile-spread", synth_opts.spec.profile_spread_db,
                      "in-plane spread of the base profiles, dB")
        ->capture_default_str();
    synth->add_option("--noise-std", synth_opts.spec.noise_std_db, "in-plane per-user noise, dB")
        ->capture_default_str();
    synth->add_option("--off-plane-std", synth_opts.spec.off_plane_std_db,
                      "off-plane jitter per band, dB")
        ->capture_default_str();
    synth->add_option("--weight-concentration", synth_opts.spec.weight_concentration,
                      "Gamma shape of the raw population weights")
        ->capture_default_str();
    synth->add_option("--male-fraction", synth_opts.spec.male_fraction, "fraction of male users")
        ->capture_default_str();
    synth->add_option("--age-min", synth_opts.spec.age_min, "minimum age")->capture_default_str();
    synth->add_option("--age-max", synth_opts.spec.age_max, "maximum age")->capture_default_str();
    synth->add_option("--ear-offset-std", synth_opts.spec.ear_offset_std_db,
                      "per-fit offset for bilateral users, dB")
        ->capture_default_str();
    synth->add_option("--seed", synth_opts.seed, "random seed")->capture_default_str();
    synth->add_option("--manifest", synth_opts.manifest, "manifest path (default: next to --out)");

    PcaOpts pca_opts;
    auto* pca = app.add_subcommand("pca", "fit the 2D reduction of the prescription rows");
    pca->add_option("--dataset", pca_opts.dataset, "dataset CSV")->required();
    pca->add_option("--out", pca_opts.out, "output model JSON")->required();
    pca->add_option("--components", pca_opts.components, "component count")->capture_default_str();
    pca->add_option("--manifest", pca_opts.manifest, "manifest path (default: next to --out)");

    GridOpts grid_opts;
    auto* grid = app.add_subcommand("grid", "build the candidate lattice in reduction space");
    grid->add_option("--dataset", grid_opts.dataset, "dataset CSV")->required();
    grid->add_option("--pca", grid_opts.pca, "reduction model JSON (default: fit from the dataset)");
    grid->add_option("--out", grid_opts.out, "output grid JSON")->required();
    grid->add_option("--x-steps", grid_opts.x_steps, "vertices along x")->capture_default_str();
    grid->add_option("--y-steps", grid_opts.y_steps, "vertices along y")->capture_default_str();
    grid->add_option("--bbox-source", grid_opts.bbox_source, "prescriptions or variations")
        ->capture_default_str();
    grid->add_option("--manifest", grid_opts.manifest, "manifest path (default: next to --out)");

    OptimizeOpts optimize_opts;
    hacover_ga_params_init(&optimize_opts.ga);
    auto* optimize = app.add_subcommand("optimize", "select presets maximizing population coverage");
    optimize->add_option("--dataset", optimize_opts.dataset, "dataset CSV")->required();
    optimize->add_option("--method", optimize_opts.method, "greedy, ga, kmeans, or brute")
        ->required();
    optimize->add_option("--n", optimize_opts.n, "number of presets")->required();
    optimize->add_option("--seed", optimize_opts.seed, "random seed")->capture_default_str();
    optimize->add_option("--out", optimize_opts.out, "output selection JSON")->required();
    optimize->add_option("--pca", optimize_opts.pca,
                         "reduction model JSON (default: fit from the dataset)");
    optimize->add_option("--x-steps", optimize_opts.x_steps, "grid vertices along x")
        ->capture_default_str();
    optimize->add_option("--y-steps", optimize_opts.y_steps, "grid vertices along y")
        ->capture_default_str();
    optimize->add_option("--bbox-source", optimize_opts.bbox_source, "prescriptions or variations")
        ->capture_default_str();
    optimize->add_option("--scale", optimize_opts.scale, "deviation std multiplier")
        ->capture_default_str();
    optimize->add_option("--ga-population", optimize_opts.ga.population_size, "GA population size")
        ->capture_default_str();
    optimize->add_option("--ga-iterations", optimize_opts.ga.iterations, "GA iterations")
        ->capture_default_str();
    optimize->add_option("--ga-elitism", optimize_opts.ga.elitism, "GA elite count")
        ->capture_default_str();
    optimize->add_option("--ga-crossover", optimize_opts.ga.crossover_fraction,
                         "fraction of offspring from crossover")
        ->capture_default_str();
    optimize->add_flag("--ga-no-local", optimize_opts.ga_no_local,
                       "disable the elite neighbour-swap pass");
    optimize->add_option("--manifest", optimize_opts.manifest,
                         "manifest path (default: next to --out)");

    CoverageOpts coverage_opts;
    auto* coverage = app.add_subcommand("coverage", "evaluate a preset file against a dataset");
    coverage->add_option("--dataset", coverage_opts.dataset, "dataset CSV")->required();
    coverage->add_option("--presets", coverage_opts.presets, "presets JSON")->required();
    coverage->add_option("--out", coverage_opts.out, "optional report JSON");
    coverage->add_option("--manifest", coverage_opts.manifest, "manifest path");

    SliderOpts slider_opts;
    auto* slider = app.add_subcommand("slider", "evaluate a two-slider lattice interface");
    slider->add_option("--dataset", slider_opts.dataset, "dataset CSV")->required();
    slider->add_option("--x-steps", slider_opts.x_steps, "slider positions along x")
        ->capture_default_str();
    slider->add_option("--y-steps", slider_opts.y_steps, "slider positions along y")
        ->capture_default_str();
    slider->add_option("--bbox-source", slider_opts.bbox_source, "prescriptions or variations")
        ->capture_default_str();
    slider->add_option("--pca", slider_opts.pca,
                       "reduction model JSON (default: fit from the dataset)");
    slider->add_option("--out", slider_opts.out, "optional report JSON");
    slider->add_option("--presets-out", slider_opts.presets_out, "optional presets JSON");
    slider->add_option("--manifest", slider_opts.manifest, "manifest path");

    ExperimentOpts sweep_opts, bootstrap_opts, scale_opts, subgroup_opts;
    const auto add_experiment_flags = [](CLI::App* cmd, ExperimentOpts& opts) {
        cmd->add_option("--config", opts.config, "experiment config file");
        cmd->add_option("--out-dir", opts.out_dir, "results directory")->required();
        cmd->add_option("--dataset", opts.dataset, "dataset CSV (overrides the config)");
        cmd->add_option("--seed", opts.seed, "random seed (overrides the config)");
        cmd->add_option("--set", opts.sets, "extra config override, e.g. --set \"grid_x = 8\"");
    };
    auto* sweep = app.add_subcommand("sweep", "coverage-vs-N tradeoff across methods");
    add_experiment_flags(sweep, sweep_opts);
    auto* bootstrap = app.add_subcommand("bootstrap", "bootstrap the deviation evidence");
    add_experiment_flags(bootstrap, bootstrap_opts);
    auto* variance_scale =
        app.add_subcommand("variance-scale", "coverage under scaled deviation spread");
    add_experiment_flags(variance_scale, scale_opts);
    auto* subgroup = app.add_subcommand("subgroup", "global vs subgroup-optimized presets");
    add_experiment_flags(subgroup, subgroup_opts);

    PlotOpts plot_opts;
    auto* plot = app.add_subcommand("plot-data", "emit figure-ready CSV data");
    plot->add_option("--kind", plot_opts.kind, "coverage_vs_n or pca_scatter")->required();
    plot->add_option("--sweep", plot_opts.sweep, "sweep.csv (coverage_vs_n)");
    plot->add_option("--dataset", plot_opts.dataset, "dataset CSV (pca_scatter)");
    plot->add_option("--presets", plot_opts.presets, "presets JSON (pca_scatter)");
    plot->add_option("--pca", plot_opts.pca, "reduction model JSON (default: fit)");
    plot->add_flag("--no-variations", plot_opts.no_variations, "omit variation rows");
    plot->add_option("--out", plot_opts.out, "output CSV")->required();
    plot->add_option("--manifest", plot_opts.manifest, "manifest path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    sweep_opts.seed_given = sweep->count("--seed") > 0;
    bootstrap_opts.seed_given = bootstrap->count("--seed") > 0;
    scale_opts.seed_given = variance_scale->count("--seed") > 0;
    subgroup_opts.seed_given = subgroup->count("--seed") > 0;

    if (synth->parsed()) return run_synth(synth_opts);
    if (pca->parsed()) return run_pca(pca_opts, common);
    if (grid->parsed()) return run_grid(grid_opts, common);
    if (optimize->parsed()) return run_optimize(optimize_opts, common);
    if (coverage->parsed()) return run_coverage(coverage_opts, common);
    if (slider->parsed()) return run_slider(slider_opts, common);
    if (sweep->parsed()) return run_experiment_cmd("sweep", sweep_opts, common, &app);
    if (bootstrap->parsed()) return run_experiment_cmd("bootstrap", bootstrap_opts, common, &app);
    if (variance_scale->parsed()) {
        return run_experiment_cmd("variance_scale", scale_opts, common, &app);
    }
    if (subgroup->parsed()) return run_experiment_cmd("subgroup", subgroup_opts, common, &app);
    if (plot->parsed()) return run_plot(plot_opts, common);
    std::fprintf(stderr, "error: no subcommand\n");
    return 1;
}
