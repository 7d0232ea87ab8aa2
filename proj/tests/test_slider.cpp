#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hacover/error.hpp"
#include "hacover/pca.hpp"
#include "hacover/slider.hpp"
#include "hacover/synth.hpp"
#include "hacover/transfer.hpp"

using namespace hacover;

namespace {

struct Setup {
    Dataset dataset;
    TransferFunctionBank bank;
    PcaModel model;
};

Setup make_setup(std::uint64_t seed) {
    Setup s;
    SynthSpec spec;
    spec.n_users = 30;
    spec.n_profiles = 4;
    spec.noise_std_db = 1.5;
    spec.seed = seed;
    s.dataset = synth_dataset(spec);

    DeviationModel model;
    model.std = {1.2, 1.2};
    s.bank = variation_weights(build_transfer_bank(), model);

    std::vector<Configuration> configs;
    for (const auto& row : s.dataset.prescription_rows()) configs.push_back(row.config);
    s.model = fit_pca(configs, 2);
    return s;
}

}  // namespace

TEST_CASE("slider presets are the full lifted lattice") {
    const Setup s = make_setup(7);
    SliderSpec spec;
    spec.steps_x = 4;
    spec.steps_y = 3;
    const PresetSet presets = slider_presets(s.model, spec, s.dataset, s.bank);
    CHECK(presets.size() == 12);
}

TEST_CASE("slider origin maps to the box corner") {
    const Setup s = make_setup(7);
    const auto points =
        grid_source_points(s.model, s.dataset, s.bank, BboxSource::variations);
    const CandidateGrid grid = build_grid(s.model, points, 5, 5);

    const Configuration origin = position_to_config(s.model, grid, 0, 0);
    const Configuration expected = inverse_transform(s.model, grid.box_min);
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        CHECK(origin[i] == doctest::Approx(expected[i]));
    }

    const Configuration far = position_to_config(s.model, grid, 4, 4);
    const Configuration far_expected = inverse_transform(s.model, grid.box_max);
    for (std::size_t i = 0; i < kNumFrequencies; ++i) {
        CHECK(far[i] == doctest::Approx(far_expected[i]));
    }

    CHECK_THROWS_AS(position_to_config(s.model, grid, 5, 0), parameter_error);
    CHECK_THROWS_AS(position_to_config(s.model, grid, 0, -1), parameter_error);
}

TEST_CASE("a coarse lattice is a subset of its refinement over the same box") {
    const Setup s = make_setup(21);
    SliderSpec coarse;
    coarse.steps_x = 3;
    coarse.steps_y = 3;
    SliderSpec fine;
    fine.steps_x = 5;
    fine.steps_y = 5;

    const PresetSet coarse_presets = slider_presets(s.model, coarse, s.dataset, s.bank);
    const PresetSet fine_presets = slider_presets(s.model, fine, s.dataset, s.bank);

    // Every 3x3 vertex sits at even fractions of the box, which the 5x5
    // lattice hits exactly.
    for (const Configuration& c : coarse_presets.presets) {
        bool found = false;
        for (const Configuration& f : fine_presets.presets) {
            if (chebyshev_distance(c, f) < 1e-9) found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("refining the lattice never loses coverage") {
    const Setup s = make_setup(33);
    CoverageParams params;
    SliderSpec coarse;
    coarse.steps_x = 3;
    coarse.steps_y = 3;
    SliderSpec fine;
    fine.steps_x = 5;
    fine.steps_y = 5;

    const double lo = slider_coverage(s.dataset, s.bank, params, s.model, coarse)
                          .population_coverage;
    const double hi = slider_coverage(s.dataset, s.bank, params, s.model, fine)
                          .population_coverage;
    CHECK(hi >= lo);
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
}

TEST_CASE("slider spec validation bounds the step counts") {
    SliderSpec spec;
    spec.steps_x = 1;
    CHECK_THROWS_AS(spec.validate(), parameter_error);
    spec.steps_x = 201;
    CHECK_THROWS_AS(spec.validate(), parameter_error);
    spec.steps_x = 2;
    spec.steps_y = 200;
    CHECK_NOTHROW(spec.validate());
}
