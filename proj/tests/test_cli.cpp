#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("hacover_cli_test_" + std::to_string(::getpid()) + "_" +
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

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr combined
};

// Runs the installed binary with the given arguments, capturing output.
RunResult run_cli(const TempDir& dir, const std::string& args) {
    static int invocation = 0;
    const std::string capture = dir.file("cli_out_" + std::to_string(invocation++) + ".txt");
    const std::string command =
        std::string(HACOVER_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
    const int raw = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(capture, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    result.output = text.str();
    return result;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

}  // namespace

TEST_CASE("help exits cleanly and a missing subcommand does not") {
    TempDir dir;
    CHECK(run_cli(dir, "--help").exit_code == 0);
    CHECK(run_cli(dir, "synth --help").exit_code == 0);
    CHECK(run_cli(dir, "").exit_code == 1);
    CHECK(run_cli(dir, "transmogrify").exit_code == 1);
}

TEST_CASE("synth is seed-deterministic and writes a manifest") {
    TempDir dir;
    fs::create_directories(dir.path / "a");
    fs::create_directories(dir.path / "b");
    const std::string flags = "--users 25 --profiles 3 --noise-std 1.5 --seed 5";
    const auto first = run_cli(dir, "synth " + flags + " --out " + dir.file("a/pop.csv"));
    REQUIRE(first.exit_code == 0);
    CHECK(first.output.find("25 users") != std::string::npos);
    const auto second = run_cli(dir, "synth " + flags + " --out " + dir.file("b/pop.csv"));
    REQUIRE(second.exit_code == 0);

    CHECK(slurp(dir.file("a/pop.csv")) == slurp(dir.file("b/pop.csv")));

    const auto manifest = nlohmann::json::parse(slurp(dir.file("a/manifest.json")));
    CHECK(manifest["command"] == "synth");
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["n_users"] == 25);

    // A different seed actually changes the data.
    const auto third =
        run_cli(dir, "synth --users 25 --profiles 3 --noise-std 1.5 --seed 6 --out " +
                         dir.file("c.csv"));
    REQUIRE(third.exit_code == 0);
    CHECK(slurp(dir.file("a/pop.csv")) != slurp(dir.file("c.csv")));
}

TEST_CASE("the synth, pca, optimize, slider, and coverage commands compose") {
    TempDir dir;
    const std::string pop = dir.file("pop.csv");
    const std::string dev = dir.file("dev.csv");
    write_file(dev, "low_dev,high_dev\n-1,0.5\n0.5,-0.5\n1,1.2\n-0.5,-1\n1.2,0\n");
    REQUIRE(run_cli(dir, "synth --users 30 --profiles 3 --noise-std 1.5 --seed 41 --out " + pop)
                .exit_code == 0);

    const std::string pca = dir.file("pca.json");
    const auto pca_run = run_cli(dir, "pca --dataset " + pop + " --out " + pca);
    REQUIRE(pca_run.exit_code == 0);
    CHECK(pca_run.output.find("explained variance ratios:") != std::string::npos);

    const std::string selection = dir.file("selection.json");
    const auto opt = run_cli(dir, "optimize --dataset " + pop + " --deviations " + dev +
                                      " --method greedy --n 3 --pca " + pca +
                                      " --x-steps 4 --y-steps 3 --out " + selection);
    REQUIRE(opt.exit_code == 0);
    REQUIRE(opt.output.find("coverage ") != std::string::npos);

    const auto sel_json = nlohmann::json::parse(slurp(selection));
    CHECK(sel_json["method"] == "greedy");
    CHECK(sel_json["N"] == 3);
    CHECK(sel_json["preset_indices"].size() == 3);
    const double coverage = sel_json["coverage"].get<double>();
    CHECK(coverage >= 0.0);
    CHECK(coverage <= 1.0);

    // The slider command exports its lattice as a loadable preset file.
    const std::string presets = dir.file("presets.json");
    const auto slider = run_cli(dir, "slider --dataset " + pop + " --deviations " + dev +
                                         " --pca " + pca +
                                         " --x-steps 3 --y-steps 3 --presets-out " + presets);
    REQUIRE(slider.exit_code == 0);
    REQUIRE(slider.output.find("coverage ") != std::string::npos);

    const auto cov = run_cli(dir, "coverage --dataset " + pop + " --deviations " + dev +
                                      " --presets " + presets + " --out " + dir.file("report.json"));
    REQUIRE(cov.exit_code == 0);

    // Same presets, same weighting: both commands print the same coverage.
    const auto line_of = [](const std::string& text) {
        const auto at = text.find("coverage ");
        return text.substr(at, text.find('\n', at) - at);
    };
    CHECK(line_of(cov.output) == line_of(slider.output));

    const auto report = nlohmann::json::parse(slurp(dir.file("report.json")));
    CHECK(report["per_user"].size() == 30);

    // Plot data from the artifacts produced above.
    const std::string scatter = dir.file("scatter.csv");
    const auto plot = run_cli(dir, "plot-data --kind pca_scatter --dataset " + pop +
                                       " --deviations " + dev + " --presets " + presets +
                                       " --pca " + pca + " --no-variations --out " + scatter);
    REQUIRE(plot.exit_code == 0);
    CHECK(slurp(scatter).rfind("kind,x,y,covered,", 0) == 0);
}

TEST_CASE("sweep runs from flags alone and feeds plot-data") {
    TempDir dir;
    const std::string pop = dir.file("pop.csv");
    const std::string dev = dir.file("dev.csv");
    write_file(dev, "low_dev,high_dev\n-1,0.5\n0.5,-0.5\n1,1.2\n-0.5,-1\n");
    REQUIRE(run_cli(dir, "synth --users 16 --profiles 3 --noise-std 1.5 --seed 13 --out " + pop)
                .exit_code == 0);

    const std::string out_dir = dir.file("results");
    const auto sweep = run_cli(dir, "sweep --dataset " + pop + " --deviations " + dev +
                                        " --seed 3 --out-dir " + out_dir +
                                        " --set \"ns = [2, 3]\" --set \"methods = [\\\"greedy\\\"]\"");
    REQUIRE(sweep.exit_code == 0);
    REQUIRE(fs::exists(fs::path(out_dir) / "sweep.csv"));
    REQUIRE(fs::exists(fs::path(out_dir) / "manifest.json"));
    const auto manifest = nlohmann::json::parse(slurp((fs::path(out_dir) / "manifest.json").string()));
    CHECK(manifest["kind"] == "sweep");
    CHECK(manifest["seed"] == 3);

    const std::string plot = dir.file("coverage_vs_n.csv");
    REQUIRE(run_cli(dir, "plot-data --kind coverage_vs_n --sweep " +
                             (fs::path(out_dir) / "sweep.csv").string() + " --out " + plot)
                .exit_code == 0);
    CHECK(slurp(plot).rfind("method,N,coverage\n", 0) == 0);
}

TEST_CASE("bad invocations exit nonzero with a diagnostic") {
    TempDir dir;
    const auto missing_flag = run_cli(dir, "synth --users 10");
    CHECK(missing_flag.exit_code == 1);
    CHECK(missing_flag.output.find("--out") != std::string::npos);

    const std::string pop = dir.file("pop.csv");
    REQUIRE(run_cli(dir, "synth --users 10 --seed 1 --out " + pop).exit_code == 0);

    const auto bad_method = run_cli(dir, "optimize --dataset " + pop +
                                             " --method simplex --n 2 --out " + dir.file("s.json"));
    CHECK(bad_method.exit_code == 1);
    CHECK(bad_method.output.find("simplex") != std::string::npos);

    const auto missing_file =
        run_cli(dir, "pca --dataset /nonexistent/pop.csv --out " + dir.file("pca.json"));
    CHECK(missing_file.exit_code == 1);
    CHECK(missing_file.output.find("error") != std::string::npos);

    const auto bad_kind = run_cli(dir, "plot-data --kind histogram --out " + dir.file("h.csv"));
    CHECK(bad_kind.exit_code == 1);

    const auto no_sweep = run_cli(dir, "plot-data --kind coverage_vs_n --out " + dir.file("c.csv"));
    CHECK(no_sweep.exit_code == 1);
    CHECK(no_sweep.output.find("--sweep") != std::string::npos);
}
