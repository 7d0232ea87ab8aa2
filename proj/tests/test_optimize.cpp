#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <string>
#include <tuple>

#include "hacover/error.hpp"
#include "hacover/optimize.hpp"
#include "hacover/pca.hpp"
#include "hacover/synth.hpp"
#include "hacover/transfer.hpp"

using namespace hacover;

namespace {

struct Instance {
    Dataset dataset;
    TransferFunctionBank bank;
    PcaModel model;
    CandidateGrid grid;
    CoverageParams params;
};

// A compact instance with tight user clusters and a small grid, so the
// optimizers have something real to disagree about but stay fast.
Instance make_instance(std::uint64_t seed, int users = 24, int steps_x = 4, int steps_y = 3) {
    Instance inst;
    SynthSpec spec;
    spec.n_users = users;
    spec.n_profiles = 3;
    spec.profile_spread_db = 8.0;
    spec.noise_std_db = 1.5;
    spec.off_plane_std_db = 0.1;
    spec.ear_offset_std_db = 0.2;
    spec.seed = seed;
    inst.dataset = synth_dataset(spec);

    DeviationModel model;
    model.std = {1.2, 1.2};
    inst.bank = variation_weights(build_transfer_bank(), model);

    std::vector<Configuration> configs;
    for (const auto& row : inst.dataset.prescription_rows()) configs.push_back(row.config);
    inst.model = fit_pca(configs, 2);
    const auto points =
        grid_source_points(inst.model, inst.dataset, inst.bank, BboxSource::prescriptions);
    inst.grid = build_grid(inst.model, points, steps_x, steps_y);
    return inst;
}

GaParams small_ga(std::uint64_t seed) {
    GaParams ga;
    ga.population_size = 30;
    ga.iterations = 40;
    ga.elitism = 2;
    ga.crossover_fraction = 0.5;
    ga.seed = seed;
    return ga;
}

}  // namespace

TEST_CASE("greedy picks N distinct candidates with a non-decreasing trace") {
    const Instance inst = make_instance(11);
    const SelectionResult result = greedy_select(inst.grid, inst.dataset, inst.bank, inst.params, 5);

    CHECK(result.method == "greedy");
    REQUIRE(result.chosen_indices.size() == 5);
    REQUIRE(result.presets.size() == 5);
    CHECK(std::set<std::size_t>(result.chosen_indices.begin(), result.chosen_indices.end()).size() ==
          5);
    REQUIRE(result.trace.size() == 5);
    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        CHECK(result.trace[i] >= result.trace[i - 1]);
    }
    CHECK(result.trace.back() == result.coverage);

    // The reported coverage is the canonical one, bit for bit.
    const CoverageMatrix matrix =
        precompute_matrix(inst.grid.lifted, inst.dataset, inst.bank, inst.params);
    CHECK(result.coverage == incremental_pc(matrix, result.chosen_indices, inst.params));
    CHECK(result.coverage ==
          population_coverage(inst.dataset, result.presets, inst.bank, inst.params)
              .population_coverage);

    // Each preset is the lifted grid vertex it claims to be.
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(result.presets.presets[i] == inst.grid.lifted[result.chosen_indices[i]]);
    }
}

TEST_CASE("greedy resolves score ties toward the lowest candidate index") {
    // Hand-built: two users at flat 0 and flat 40 dB, candidates 0 and 1
    // identical at the first user. The first pick ties between them and must
    // take index 0; the second pick must then prefer the productive index 2
    // over the useless duplicate.
    Dataset dataset;
    for (auto [id, weight, level] : {std::tuple{"a", 0.6, 0.0}, std::tuple{"b", 0.4, 40.0}}) {
        User user;
        user.id = id;
        user.weight = weight;
        user.age = 70;
        Configuration c;
        c.gains.fill(level);
        user.configs[FitType::uni_left] = c;
        dataset.users.push_back(user);
    }
    DeviationModel narrow;
    narrow.std = {1.0, 1.0};
    const TransferFunctionBank bank = variation_weights(build_transfer_bank(), narrow);

    CandidateGrid grid;
    for (double level : {0.0, 0.0, 40.0}) {
        Configuration c;
        c.gains.fill(level);
        grid.lifted.push_back(c);
        grid.points.push_back({level, 0.0});
    }
    grid.steps_x = 3;
    grid.steps_y = 1;

    CoverageParams params;
    const SelectionResult result = greedy_select(grid, dataset, bank, params, 2);
    CHECK(result.chosen_indices == std::vector<std::size_t>{0, 2});
    CHECK(result.coverage == doctest::Approx(1.0));
}

TEST_CASE("greedy on a prebuilt matrix matches the grid entry point") {
    const Instance inst = make_instance(17);
    const CoverageMatrix matrix =
        precompute_matrix(inst.grid.lifted, inst.dataset, inst.bank, inst.params);
    const SelectionResult direct = greedy_select_matrix(matrix, inst.params, 4);
    const SelectionResult lifted = greedy_select(inst.grid, inst.dataset, inst.bank, inst.params, 4);
    CHECK(direct.chosen_indices == lifted.chosen_indices);
    CHECK(direct.coverage == lifted.coverage);
}

TEST_CASE("the removal-shortcut variant reports honestly thresholded coverage") {
    const Instance inst = make_instance(19);
    const SelectionResult shortcut =
        greedy_select_removal_shortcut(inst.grid, inst.dataset, inst.bank, inst.params, 4);
    CHECK(shortcut.method == "greedy_removal");
    REQUIRE(shortcut.chosen_indices.size() == 4);

    // Its score function ignores the gamma threshold, but the reported
    // coverage must still be the canonical thresholded value.
    CHECK(shortcut.coverage ==
          population_coverage(inst.dataset, shortcut.presets, inst.bank, inst.params)
              .population_coverage);

    // The thresholded greedy can only do at least as well.
    const SelectionResult canonical =
        greedy_select(inst.grid, inst.dataset, inst.bank, inst.params, 4);
    CHECK(canonical.coverage >= shortcut.coverage - 1e-12);
}

TEST_CASE("ga is deterministic per seed and honest about its coverage") {
    const Instance inst = make_instance(23);
    const SelectionResult a =
        ga_select(inst.grid, inst.dataset, inst.bank, inst.params, 3, small_ga(5));
    const SelectionResult b =
        ga_select(inst.grid, inst.dataset, inst.bank, inst.params, 3, small_ga(5));

    CHECK(a.method == "ga");
    CHECK(a.seed == 5);
    CHECK(a.chosen_indices == b.chosen_indices);
    CHECK(a.coverage == b.coverage);
    CHECK(a.trace == b.trace);
    REQUIRE(a.chosen_indices.size() == 3);

    CHECK(a.coverage ==
          population_coverage(inst.dataset, a.presets, inst.bank, inst.params).population_coverage);

    // Best-so-far trace never drops, one entry per iteration.
    REQUIRE(a.trace.size() == 40);
    for (std::size_t i = 1; i < a.trace.size(); ++i) CHECK(a.trace[i] >= a.trace[i - 1]);
    CHECK(a.coverage == a.trace.back());
}

TEST_CASE("ga parameter validation") {
    const Instance inst = make_instance(29);
    GaParams ga = small_ga(1);
    ga.population_size = 1;
    CHECK_THROWS_AS(ga_select(inst.grid, inst.dataset, inst.bank, inst.params, 2, ga),
                    parameter_error);
    ga = small_ga(1);
    ga.elitism = ga.population_size;
    CHECK_THROWS_AS(ga_select(inst.grid, inst.dataset, inst.bank, inst.params, 2, ga),
                    parameter_error);
    ga = small_ga(1);
    ga.crossover_fraction = 1.5;
    CHECK_THROWS_AS(ga_select(inst.grid, inst.dataset, inst.bank, inst.params, 2, ga),
                    parameter_error);
    ga = small_ga(1);
    ga.iterations = 0;
    CHECK_THROWS_AS(ga_select(inst.grid, inst.dataset, inst.bank, inst.params, 2, ga),
                    parameter_error);
}

TEST_CASE("brute force finds the grid optimum and beats the heuristics") {
    const Instance inst = make_instance(31);
    const std::size_t n = 3;
    const SelectionResult brute =
        brute_force_select(inst.grid, inst.dataset, inst.bank, inst.params, n);
    CHECK(brute.method == "brute");
    REQUIRE(brute.chosen_indices.size() == n);
    CHECK(std::is_sorted(brute.chosen_indices.begin(), brute.chosen_indices.end()));

    const SelectionResult greedy =
        greedy_select(inst.grid, inst.dataset, inst.bank, inst.params, n);
    const SelectionResult ga =
        ga_select(inst.grid, inst.dataset, inst.bank, inst.params, n, small_ga(2));
    CHECK(brute.coverage >= greedy.coverage);
    CHECK(brute.coverage >= ga.coverage);

    CHECK(brute.coverage ==
          population_coverage(inst.dataset, brute.presets, inst.bank, inst.params)
              .population_coverage);
}

TEST_CASE("brute force refuses combination counts over the limit") {
    const Instance inst = make_instance(37, 24, 6, 5);  // 30 candidates
    bool threw = false;
    try {
        brute_force_select(inst.grid, inst.dataset, inst.bank, inst.params, 15, 2'000'000);
    } catch (const parameter_error& e) {
        threw = true;
        // The refusal names the actual combination count.
        CHECK(std::string(e.what()).find("155117520") != std::string::npos);
    }
    CHECK(threw);

    CHECK(combination_count(12, 3, 2'000'000) == 220);
    CHECK(combination_count(30, 15, 2'000'000) == 2'000'001);  // clamped to limit+1
    CHECK(combination_count(300, 150, 2'000'000) == 2'000'001);  // overflows 64 bits inside
}

TEST_CASE("kmeans is deterministic, returns free centroids, and reseeds empty clusters") {
    const Instance inst = make_instance(41);
    const auto variations = collect_variations(inst.dataset, inst.bank);

    const SelectionResult a =
        kmeans_presets(variations, inst.dataset, inst.bank, inst.params, 4, 9);
    const SelectionResult b =
        kmeans_presets(variations, inst.dataset, inst.bank, inst.params, 4, 9);
    CHECK(a.method == "kmeans");
    CHECK(a.seed == 9);
    CHECK(a.chosen_indices.empty());  // centroids are not grid vertices
    REQUIRE(a.presets.size() == 4);
    CHECK(a.presets.presets == b.presets.presets);
    CHECK(a.coverage == b.coverage);
    CHECK(a.coverage ==
          population_coverage(inst.dataset, a.presets, inst.bank, inst.params).population_coverage);

    // Two distinct locations but three clusters: at least one cluster starts
    // or goes empty and must be reseeded; the call still has to converge.
    std::vector<std::pair<Configuration, double>> two_spots;
    Configuration lo, hi;
    lo.gains.fill(0.0);
    hi.gains.fill(20.0);
    for (int i = 0; i < 6; ++i) two_spots.emplace_back(i % 2 == 0 ? lo : hi, 1.0 / 6.0);
    Dataset tiny;
    for (int i = 0; i < 2; ++i) {
        User user;
        user.id = "u" + std::to_string(i);
        user.weight = 0.5;
        user.age = 70;
        user.configs[FitType::uni_left] = i == 0 ? lo : hi;
        tiny.users.push_back(user);
    }
    const SelectionResult reseeded =
        kmeans_presets(two_spots, tiny, inst.bank, inst.params, 3, 123);
    REQUIRE(reseeded.presets.size() == 3);

    CHECK_THROWS_AS(kmeans_presets(two_spots, tiny, inst.bank, inst.params, 7, 1),
                    parameter_error);  // more clusters than points
}

TEST_CASE("selection argument validation") {
    const Instance inst = make_instance(43);
    CHECK_THROWS_AS(greedy_select(inst.grid, inst.dataset, inst.bank, inst.params, 0),
                    parameter_error);
    CHECK_THROWS_AS(
        greedy_select(inst.grid, inst.dataset, inst.bank, inst.params, inst.grid.size() + 1),
        parameter_error);

    CandidateGrid empty;
    CHECK_THROWS_AS(greedy_select(empty, inst.dataset, inst.bank, inst.params, 1), parameter_error);
}
