#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "hacover/coverage.hpp"
#include "hacover/pca.hpp"

namespace hacover {

struct GaParams {
    int population_size = 250;
    int iterations = 500;
    int elitism = 1;
    double crossover_fraction = 0.5;  // share of non-elite offspring from crossover
    bool local_improvement = true;    // one neighbour-swap pass on the elite per generation
    std::uint64_t seed = 0;

    void validate() const;
};

struct SelectionResult {
    std::string method;
    PresetSet presets;
    std::vector<std::size_t> chosen_indices;  // grid candidate indices; empty for kmeans
    double coverage = 0.0;
    std::vector<double> trace;  // best fitness per iteration
    std::uint64_t seed = 0;
};

// Exact-marginal greedy selection; ties go to the lowest candidate index.
SelectionResult greedy_select(const CandidateGrid& grid, const Dataset& dataset,
                              const TransferFunctionBank& bank, const CoverageParams& params,
                              std::size_t n);

// Greedy on a prebuilt matrix, for callers that reweight and re-run (the
// geometry bits are reused). chosen_indices and trace are filled; presets are
// left for the caller to lift.
SelectionResult greedy_select_matrix(const CoverageMatrix& matrix, const CoverageParams& params,
                                     std::size_t n);

// Variant retained for comparison with the covered-point-removal shortcut,
// which misestimates marginals under the gamma threshold.
SelectionResult greedy_select_removal_shortcut(const CandidateGrid& grid, const Dataset& dataset,
                                               const TransferFunctionBank& bank,
                                               const CoverageParams& params, std::size_t n);

// Fixed-cardinality bitstring GA with elitism, one-point crossover with
// repair, and 1<->0 swap mutation.
SelectionResult ga_select(const CandidateGrid& grid, const Dataset& dataset,
                          const TransferFunctionBank& bank, const CoverageParams& params,
                          std::size_t n, const GaParams& ga);

// Mass-weighted Lloyd k-means over the variations, k-means++ seeding.
SelectionResult kmeans_presets(const std::vector<std::pair<Configuration, double>>& variations,
                               const Dataset& dataset, const TransferFunctionBank& bank,
                               const CoverageParams& params, std::size_t n, std::uint64_t seed);

inline constexpr std::uint64_t kDefaultCombinationLimit = 2'000'000;

// Exact optimum over all n-subsets of the grid; ties broken lexicographically
// by index tuple. Refuses when C(G, n) exceeds the limit.
SelectionResult brute_force_select(const CandidateGrid& grid, const Dataset& dataset,
                                   const TransferFunctionBank& bank, const CoverageParams& params,
                                   std::size_t n,
                                   std::uint64_t combination_limit = kDefaultCombinationLimit);

// C(g, n) clamped to the limit sentinel (limit + 1 on overflow).
std::uint64_t combination_count(std::size_t g, std::size_t n, std::uint64_t limit);

}  // namespace hacover
