#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <filesystem>
#include <string>

#include "json.hpp"

#include "hacover/error.hpp"
#include "hacover/io.hpp"
#include "hacover/optimize.hpp"
#include "hacover/pca.hpp"
#include "hacover/synth.hpp"
#include "hacover/transfer.hpp"

using namespace hacover;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hacover_io_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }

    static int& counter() {
        static int value = 0;
        return value;
    }
};

const char* kHeader = "user_id,weight,loss_type,fit_type,g500,g1000,g2000,g3000,g4000,g6000,age,sex";

std::string one_row(const std::string& id, const std::string& fit, double weight = 1.0) {
    return id + "," + format_double(weight) + ",unilateral," + fit + ",10,11,12,13,14,15,70,female";
}

}  // namespace

TEST_CASE("format_double is the shortest round-trip form") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
}

TEST_CASE("dataset save and load round-trips field for field and byte for byte") {
    TempDir dir;
    SynthSpec spec;
    spec.n_users = 25;
    spec.seed = 1234;
    const Dataset original = synth_dataset(spec);

    const std::string first = dir.file("pop.csv");
    const std::string second = dir.file("pop2.csv");
    save_dataset(original, first);
    const Dataset loaded = load_dataset(first);
    save_dataset(loaded, second);

    CHECK(read_text_file(first) == read_text_file(second));

    REQUIRE(loaded.user_count() == original.user_count());
    for (std::size_t i = 0; i < loaded.user_count(); ++i) {
        const User& a = original.users[i];
        const User& b = loaded.users[i];
        CHECK(a.id == b.id);
        CHECK(a.loss_type == b.loss_type);
        CHECK(a.sex == b.sex);
        CHECK(a.age == b.age);
        CHECK(a.configs.size() == b.configs.size());
    }
}

TEST_CASE("loading rejects malformed datasets with a located message") {
    TempDir dir;
    const auto write_and_load = [&](const std::string& content) {
        const std::string path = dir.file("bad.csv");
        write_text_file(path, content);
        return load_dataset(path);
    };

    CHECK_THROWS_AS(write_and_load(""), validation_error);
    CHECK_THROWS_AS(write_and_load("user,weight\n"), validation_error);

    // Field count off by one.
    CHECK_THROWS_AS(
        write_and_load(std::string(kHeader) + "\nu1,1,unilateral,uni_left,10,11,12,13,14,70,female\n"),
        validation_error);

    // Unknown fit type token.
    CHECK_THROWS_AS(
        write_and_load(std::string(kHeader) + "\n" +
                       "u1,1,unilateral,left_ear,10,11,12,13,14,15,70,female\n"),
        validation_error);

    // Same user with two different weights.
    try {
        write_and_load(std::string(kHeader) + "\n" +
                       "u1,1,bilateral,uni_left,10,11,12,13,14,15,70,female\n" +
                       "u1,2,bilateral,uni_right,10,11,12,13,14,15,70,female\n");
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        CHECK(std::string(e.what()).find("u1") != std::string::npos);
        CHECK(std::string(e.what()).find("inconsistent") != std::string::npos);
    }

    // Duplicate fit row.
    CHECK_THROWS_AS(write_and_load(std::string(kHeader) + "\n" + one_row("u1", "uni_left") + "\n" +
                                   one_row("u1", "uni_left")),
                    validation_error);

    // Bilateral user missing fit types.
    CHECK_THROWS_AS(
        write_and_load(std::string(kHeader) + "\n" +
                       "u1,1,bilateral,uni_left,10,11,12,13,14,15,70,female\n"),
        validation_error);

    // Unreadable number.
    CHECK_THROWS_AS(
        write_and_load(std::string(kHeader) + "\n" +
                       "u1,1,unilateral,uni_left,ten,11,12,13,14,15,70,female\n"),
        validation_error);

    CHECK_THROWS_AS(load_dataset(dir.file("missing.csv")), io_error);
}

TEST_CASE("off-scale raw weights are normalized with a warning") {
    TempDir dir;
    const std::string path = dir.file("weights.csv");
    write_text_file(path, std::string(kHeader) + "\n" + one_row("u1", "uni_left", 3.0) + "\n" +
                              one_row("u2", "uni_left", 1.0) + "\n");

    std::string warning;
    const Dataset dataset = load_dataset(path, &warning);
    CHECK_FALSE(warning.empty());
    CHECK(dataset.users[0].weight == doctest::Approx(0.75));
    CHECK(dataset.users[1].weight == doctest::Approx(0.25));

    // An already-normalized file loads silently.
    save_dataset(dataset, path);
    warning.clear();
    load_dataset(path, &warning);
    CHECK(warning.empty());
}

TEST_CASE("presets round-trip through json") {
    TempDir dir;
    PresetSet presets;
    for (double level : {0.0, 12.5, -3.25}) {
        Configuration c;
        for (std::size_t i = 0; i < kNumFrequencies; ++i) c[i] = level + static_cast<double>(i);
        presets.presets.push_back(c);
    }
    const std::string path = dir.file("presets.json");
    save_presets(presets, path);
    const PresetSet loaded = load_presets(path);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded.presets == presets.presets);

    write_text_file(path, "{\"not\": \"an array\"}\n");
    CHECK_THROWS_AS(load_presets(path), validation_error);
    write_text_file(path, "[{\"g500\": 1}]\n");
    CHECK_THROWS_AS(load_presets(path), validation_error);  // missing bands
}

TEST_CASE("pca models round-trip through json") {
    TempDir dir;
    SynthSpec spec;
    spec.n_users = 20;
    spec.seed = 9;
    const Dataset dataset = synth_dataset(spec);
    std::vector<Configuration> configs;
    for (const auto& row : dataset.prescription_rows()) configs.push_back(row.config);
    const PcaModel model = fit_pca(configs, 2);

    const std::string path = dir.file("pca.json");
    save_pca(model, path);
    const PcaModel loaded = load_pca(path);
    CHECK(loaded.mean == model.mean);
    CHECK(loaded.components == model.components);
    CHECK(loaded.explained_variance_ratio == model.explained_variance_ratio);

    write_text_file(path, "{\"mean\": [1, 2, 3]}\n");
    CHECK_THROWS_AS(load_pca(path), validation_error);
}

TEST_CASE("selection json records the method, seed, picks, and trace") {
    TempDir dir;
    SelectionResult result;
    result.method = "greedy";
    result.coverage = 0.75;
    result.seed = 0;
    result.chosen_indices = {4, 7};
    result.trace = {0.5, 0.75};
    Configuration c;
    c.gains.fill(2.0);
    result.presets.presets = {c, c};

    const std::string path = dir.file("selection.json");
    save_selection(result, path);

    const auto j = nlohmann::json::parse(read_text_file(path));
    CHECK(j["method"] == "greedy");
    CHECK(j["N"] == 2);
    CHECK(j["coverage"] == 0.75);
    CHECK(j["preset_indices"] == std::vector<int>{4, 7});
    CHECK(j["trace"] == std::vector<double>{0.5, 0.75});
    REQUIRE(j["presets"].size() == 2);
    CHECK(j["presets"][0]["g500"] == 2.0);
    CHECK(j["presets"][1]["g6000"] == 2.0);
}

TEST_CASE("coverage reports serialize per-user detail") {
    TempDir dir;
    SynthSpec spec;
    spec.n_users = 8;
    spec.seed = 77;
    const Dataset dataset = synth_dataset(spec);
    DeviationModel dev;
    dev.std = {1.0, 1.0};
    const TransferFunctionBank bank = variation_weights(build_transfer_bank(), dev);
    CoverageParams params;
    PresetSet presets;
    presets.presets = {dataset.users[0].configs.begin()->second};

    const CoverageReport report = population_coverage(dataset, presets, bank, params);
    const std::string path = dir.file("report.json");
    save_report(report, path);

    const auto j = nlohmann::json::parse(read_text_file(path));
    CHECK(j["population_coverage"] == report.population_coverage);
    CHECK(j["params"]["radius"] == 5.0);
    CHECK(j["params"]["gamma"] == 0.8);
    REQUIRE(j["per_user"].size() == dataset.user_count());
    CHECK(j["per_user"][0]["user_id"] == dataset.users[0].id);
    CHECK(j["per_user"][0].contains("covered"));
    CHECK((j["per_user"][0]["mass"].contains("uni_left") ||
           j["per_user"][0]["mass"].contains("bi_left")));
}

TEST_CASE("grid json keeps the lattice layout") {
    TempDir dir;
    SynthSpec spec;
    spec.n_users = 15;
    spec.seed = 31;
    const Dataset dataset = synth_dataset(spec);
    DeviationModel dev;
    const TransferFunctionBank bank = variation_weights(build_transfer_bank(), dev);
    std::vector<Configuration> configs;
    for (const auto& row : dataset.prescription_rows()) configs.push_back(row.config);
    const PcaModel model = fit_pca(configs, 2);
    const auto points = grid_source_points(model, dataset, bank, BboxSource::variations);
    const CandidateGrid grid = build_grid(model, points, 4, 3);

    const std::string path = dir.file("grid.json");
    save_grid(grid, path);
    const auto j = nlohmann::json::parse(read_text_file(path));
    CHECK(j["steps_x"] == 4);
    CHECK(j["steps_y"] == 3);
    CHECK(j["points"].size() == 12);
    CHECK(j["lifted"].size() == 12);
    CHECK(j["box_min"].size() == 2);
}

TEST_CASE("deviation evidence files need the exact header and two columns") {
    TempDir dir;
    const std::string path = dir.file("dev.csv");
    write_text_file(path, "low_dev,high_dev\n-1.5,0.5\n2,1\n");
    const auto points = load_deviation_points(path);
    REQUIRE(points.size() == 2);
    CHECK(points[0].first == doctest::Approx(-1.5));
    CHECK(points[1].second == doctest::Approx(1.0));

    write_text_file(path, "low,high\n1,2\n");
    CHECK_THROWS_AS(load_deviation_points(path), validation_error);
    write_text_file(path, "low_dev,high_dev\n1\n");
    CHECK_THROWS_AS(load_deviation_points(path), validation_error);
    write_text_file(path, "low_dev,high_dev\n1,x\n");
    CHECK_THROWS_AS(load_deviation_points(path), validation_error);
    CHECK_THROWS_AS(load_deviation_points(dir.file("absent.csv")), io_error);
}
