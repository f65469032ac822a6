#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "trackgen/circuit.hpp"
#include "trackgen/config.hpp"
#include "trackgen/errors.hpp"
#include "trackgen/experiment.hpp"
#include "trackgen/svg.hpp"

using namespace trackgen;

namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        files[fs::relative(entry.path(), root).string()] = buf.str();
    }
    return files;
}

ExperimentConfig tiny_config(const std::string& out_dir) {
    ExperimentConfig cfg;
    SynthSpec spec = SynthSpec::defaults();
    spec.sessions_per_cluster = 4;
    spec.windows_per_session = 16;
    cfg.synth = spec;
    cfg.designers = {DesignerKind::Random, DesignerKind::Edrl};
    cfg.scenarios = {Scenario::Maximise};
    cfg.runs = 2;
    cfg.seeds = {1, 2};
    cfg.random.budget = 15;
    cfg.go.budget = 15;
    cfg.es.max_evaluations = 60;
    cfg.es.lambda = 10;
    cfg.es.mu = 3;
    cfg.es.generations = 4;
    cfg.out_dir = out_dir;
    return cfg;
}

} // namespace

TEST_CASE("run_experiment emits byte-identical artifacts for the same manifest") {
    const fs::path a = fs::temp_directory_path() / "trackgen_exp_a";
    const fs::path b = fs::temp_directory_path() / "trackgen_exp_b";
    fs::remove_all(a);
    fs::remove_all(b);

    const ResultsTable ta = run_experiment(tiny_config(a.string()));
    const ResultsTable tb = run_experiment(tiny_config(b.string()));
    CHECK(ta.to_csv() == tb.to_csv());
    CHECK(ta.runs_csv() == tb.runs_csv());

    const auto files_a = read_tree(a);
    const auto files_b = read_tree(b);
    REQUIRE(files_a.size() == files_b.size());
    CHECK(files_a.size() > 4);
    for (const auto& [name, content] : files_a) {
        REQUIRE(files_b.count(name));
        CHECK_MESSAGE(files_b.at(name) == content, "artifact differs: ", name);
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("results table covers every requested combination") {
    const fs::path dir = fs::temp_directory_path() / "trackgen_exp_grid";
    fs::remove_all(dir);
    ExperimentConfig cfg = tiny_config(dir.string());
    cfg.designers = {DesignerKind::Random, DesignerKind::Edpcg, DesignerKind::Edrl};
    cfg.scenarios = {Scenario::Maximise, Scenario::Minimise};
    const ResultsTable table = run_experiment(cfg);
    CHECK(table.entries.size() == 6); // 3 designers x 1 cluster x 2 scenarios
    CHECK(table.runs.size() == 12);   // x 2 seeds
    for (const TableEntry& e : table.entries) CHECK(e.error.empty());
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "runs.csv"));
    fs::remove_all(dir);
}

TEST_CASE("experiment config parser surfaces bad keys and values") {
    const fs::path dir = fs::temp_directory_path() / "trackgen_cfg";
    fs::remove_all(dir);
    fs::create_directories(dir);

    {
        std::ofstream out(dir / "bad_key.cfg");
        out << "designers = random\nsuprise_key = 1\n";
    }
    CHECK_THROWS_WITH_AS(experiment_config_from_file((dir / "bad_key.cfg").string()),
                         doctest::Contains("suprise_key"), ConfigError);
    {
        std::ofstream out(dir / "bad_value.cfg");
        out << "runs = many\n";
    }
    CHECK_THROWS_WITH_AS(experiment_config_from_file((dir / "bad_value.cfg").string()),
                         doctest::Contains("runs"), ConfigError);
    {
        std::ofstream out(dir / "ok.cfg");
        out << "# comment\ndesigners = random, edrl\nscenarios = max\nruns = 3\n"
            << "seeds = 4, 5, 6\nbudget = 25\nout_dir = " << (dir / "out").string() << "\n";
    }
    const ExperimentConfig cfg = experiment_config_from_file((dir / "ok.cfg").string());
    CHECK(cfg.designers.size() == 2);
    CHECK(cfg.runs == 3);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{4, 5, 6});
    CHECK(cfg.random.budget == 25);
    fs::remove_all(dir);
}

namespace {

// Fill colours of the data-piece rects, ignoring the legend.
std::vector<std::string> piece_fills(const std::string& svg) {
    std::vector<std::string> fills;
    std::size_t pos = 0;
    while ((pos = svg.find("data-piece=", pos)) != std::string::npos) {
        const auto fill = svg.find("fill=\"", pos);
        const auto end = svg.find('"', fill + 6);
        fills.push_back(svg.substr(fill + 6, end - fill - 6));
        pos = end;
    }
    return fills;
}

} // namespace

TEST_CASE("render_track_svg tints pieces by the trace") {
    // Track with start + 8 pieces of one cell each: 9 traversal units.
    Track t = close_circuit(decode(Genome(std::vector<TileKind>(4, TileKind::Straight)),
                                   GridConfig{}));
    REQUIRE(t.feasible);
    const std::size_t pieces = t.pieces.size() + 1;

    SUBCASE("constant high trace tints everything red") {
        const std::string svg =
            render_track_svg(t, std::vector<double>(4 * pieces, 1.0));
        for (const std::string& fill : piece_fills(svg)) CHECK(fill == "#f2938d");
    }
    SUBCASE("neutral trace uses white fills") {
        const std::string svg = render_track_svg(t, std::vector<double>(4 * pieces, 0.5));
        for (const std::string& fill : piece_fills(svg)) CHECK(fill == "#ffffff");
    }
    SUBCASE("fluctuating thirds colour by traversal position") {
        // One window per traversal unit: first/last thirds high, middle low.
        std::vector<double> trace;
        for (std::size_t i = 0; i < pieces; ++i) {
            const double t3 = (static_cast<double>(i) + 0.5) / static_cast<double>(pieces);
            trace.push_back(t3 < 1.0 / 3.0 || t3 >= 2.0 / 3.0 ? 1.0 : 0.0);
        }
        const std::string svg = render_track_svg(t, trace);
        // First piece (index 0) red, a middle piece blue.
        CHECK(svg.find("data-piece=\"0\"") != std::string::npos);
        const auto first_rect = svg.find("data-piece=\"0\"");
        const auto first_fill = svg.find("fill=", first_rect);
        CHECK(svg.substr(first_fill, 20).find("#f2938d") != std::string::npos);
        const std::size_t mid = pieces / 2;
        const auto mid_rect = svg.find("data-piece=\"" + std::to_string(mid) + "\"");
        REQUIRE(mid_rect != std::string::npos);
        const auto mid_fill = svg.find("fill=", mid_rect);
        CHECK(svg.substr(mid_fill, 20).find("#8db4f2") != std::string::npos);
    }
    SUBCASE("infeasible tracks are rejected") {
        Track open = decode(Genome(std::vector<TileKind>(3, TileKind::Straight)), GridConfig{});
        CHECK_THROWS_AS(render_track_svg(open, std::vector<double>(4, 0.5)),
                        EvaluationError);
    }
}

TEST_CASE("significance flags require non-overlapping intervals") {
    const fs::path dir = fs::temp_directory_path() / "trackgen_exp_sig";
    fs::remove_all(dir);
    ExperimentConfig cfg = tiny_config(dir.string());
    const ResultsTable table = run_experiment(cfg);
    for (const TableEntry& e : table.entries) {
        if (!e.significant) continue;
        for (const TableEntry& o : table.entries) {
            if (&o == &e || o.scenario != e.scenario || o.cluster != e.cluster) continue;
            CHECK(e.accuracy.mean > o.accuracy.mean);
            CHECK(std::abs(e.accuracy.mean - o.accuracy.mean) >
                  e.accuracy.half_width + o.accuracy.half_width);
        }
    }
    fs::remove_all(dir);
}
