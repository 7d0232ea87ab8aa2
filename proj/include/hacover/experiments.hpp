#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hacover/config.hpp"
#include "hacover/coverage.hpp"
#include "hacover/optimize.hpp"
#include "hacover/pca.hpp"

namespace hacover {

struct SweepRow {
    std::string method;
    int n = 0;
    double coverage = 0.0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
    PresetSet presets;  // what the method selected, for external revalidation
};

// One row per (method, n). Every coverage is revalidated against
// population_coverage on the returned presets before the row is recorded.
std::vector<SweepRow> sweep(const Dataset& dataset, const TransferFunctionBank& bank,
                            const CoverageParams& params, const CandidateGrid& grid,
                            const std::vector<int>& ns, const std::vector<std::string>& methods,
                            std::uint64_t seed, const GaParams& ga);

struct SubgroupRow {
    std::string predicate;
    int n = 0;
    std::size_t user_count = 0;
    double weight_share = 0.0;  // share of total population mass
    double global_presets_coverage = 0.0;
    double subgroup_presets_coverage = 0.0;
};

// Global presets are optimized on the full population, then re-evaluated on
// each subgroup (weights renormalized within the subgroup) and compared with
// presets optimized on the subgroup alone, over the same candidate grid.
std::vector<SubgroupRow> subgroup_analysis(const Dataset& dataset,
                                           const std::vector<SubgroupPredicate>& predicates,
                                           const CandidateGrid& grid,
                                           const TransferFunctionBank& bank,
                                           const CoverageParams& params, const std::vector<int>& ns,
                                           const std::string& method, std::uint64_t seed,
                                           const GaParams& ga);

struct BootstrapReplicate {
    int index = 0;
    bool skipped = false;
    std::string reason;
    std::vector<double> coverage;  // one entry per n, when not skipped
};

struct BootstrapResult {
    std::vector<int> ns;
    std::vector<BootstrapReplicate> replicates;
    int completed = 0;
    int skipped = 0;

    double mean(std::size_t n_index) const;
    double stddev(std::size_t n_index) const;
};

// Resamples the deviation evidence with replacement, refits the Gaussian,
// reweights the bank, and re-runs greedy selection per replicate. Replicates
// whose resample cannot be fitted are skipped and accounted for.
BootstrapResult bootstrap_coverage(const std::vector<std::pair<double, double>>& deviation_points,
                                   int samples, const CandidateGrid& grid, const Dataset& dataset,
                                   const TransferFunctionBank& base_bank,
                                   const CoverageParams& params, const std::vector<int>& ns,
                                   std::uint64_t seed);

struct ScaleRow {
    double scale = 0.0;
    int n = 0;
    double coverage = 0.0;
};

std::vector<ScaleRow> variance_scaling(const std::vector<double>& scales,
                                       const DeviationModel& model,
                                       const TransferFunctionBank& base_bank,
                                       const CandidateGrid& grid, const Dataset& dataset,
                                       const CoverageParams& params, const std::vector<int>& ns);

enum class PlotKind { coverage_vs_n, pca_scatter };
PlotKind plot_kind_from_string(const std::string& kind);

void write_coverage_vs_n_csv(const std::vector<SweepRow>& rows, const std::string& path);

struct PcaScatterInputs {
    const Dataset* dataset = nullptr;
    const TransferFunctionBank* bank = nullptr;  // null skips variation rows
    const PcaModel* model = nullptr;
    const PresetSet* presets = nullptr;
    CoverageParams params;
    bool include_variations = true;
};

// Rows: kind (prescription|variation|preset), 2D coordinates, covered flag,
// and the 6D gains for revalidation.
void write_pca_scatter_csv(const PcaScatterInputs& inputs, const std::string& path);

// Experiment orchestration from a config (see ConfigFile). Writes result CSVs
// plus a manifest.json with every resolved parameter into out_dir.
// Kinds: sweep, bootstrap, variance_scale, subgroup.
void run_experiment(const std::string& kind, const ConfigFile& config, const std::string& out_dir);

}  // namespace hacover
