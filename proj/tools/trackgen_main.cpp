#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "trackgen/circuit.hpp"
#include "trackgen/config.hpp"
#include "trackgen/errors.hpp"
#include "trackgen/experiment.hpp"
#include "trackgen/svg.hpp"
#include "trackgen/util.hpp"
#include "trackgen/version.hpp"

namespace fs = std::filesystem;
using namespace trackgen;
using ordered_json = nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SynthSpec synth_spec_from_file(const std::string& path) {
    KeyValueConfig kv = KeyValueConfig::parse_file(path);
    SynthSpec spec = SynthSpec::defaults();
    spec.sessions_per_cluster = static_cast<int>(kv.get_long("sessions_per_cluster", 10));
    spec.windows_per_session = static_cast<int>(kv.get_long("windows_per_session", 40));
    spec.noise = kv.get_double("noise", 0.05);
    spec.seed = static_cast<std::uint64_t>(kv.get_long("seed", 1));
    kv.reject_unknown_keys();
    return spec;
}

struct GenerateOptions {
    std::string designer = "edrl";
    std::string scenario = "max";
    std::string cluster = "all";
    std::uint64_t seed = 1;
    std::string corpus_dir;
    std::uint64_t corpus_seed = 1;
    int corpus_windows = 40;
    int knn_k = 5;
    int budget = 2500;
    int genome_length = 10;
    std::string out_dir = "out";
    bool json_output = false;
    bool svg = false;
};

int cmd_generate(const GenerateOptions& opt) {
    Corpus corpus;
    if (!opt.corpus_dir.empty()) {
        corpus = load_corpus(opt.corpus_dir);
    } else {
        SynthSpec spec = SynthSpec::defaults();
        spec.seed = opt.corpus_seed;
        spec.windows_per_session = opt.corpus_windows;
        corpus = synthesize_corpus(spec);
    }

    KnnBuildOptions knn_opts;
    knn_opts.k = opt.knn_k;
    if (opt.cluster != "all") {
        knn_opts.cluster_filter = static_cast<int>(parse_long(opt.cluster));
        knn_opts.cluster_assignments = cluster_annotators(corpus, 3);
    }
    const KnnModel model = KnnModel::build(corpus, knn_opts);

    const Scenario scenario = scenario_from_name(opt.scenario);
    SimConfig sim;
    sim.seed = opt.seed;
    const PipelineEvaluator evaluator(GridConfig{}, sim, model, scenario);
    const EvalFn eval = [&](const Genome& g) { return evaluator(g); };

    DesignerResult result;
    const DesignerKind kind = designer_from_name(opt.designer);
    switch (kind) {
    case DesignerKind::Random: {
        RandomDesignerConfig cfg;
        cfg.budget = opt.budget;
        cfg.seed = opt.seed;
        cfg.genome_length = opt.genome_length;
        result = random_designer(cfg, eval);
        break;
    }
    case DesignerKind::Edpcg: {
        EsConfig cfg;
        cfg.seed = opt.seed;
        cfg.max_evaluations = opt.budget;
        cfg.genome_length = opt.genome_length;
        result = evolve(cfg, eval);
        break;
    }
    case DesignerKind::Edrl: {
        GoExploreConfig cfg;
        cfg.seed = opt.seed;
        cfg.budget = opt.budget;
        cfg.max_actions = opt.genome_length;
        result = go_explore(cfg, eval);
        break;
    }
    }

    const fs::path out(opt.out_dir);
    const Individual& elite = result.best;
    if (elite.track) write_file(out / "track.json", track_to_json(*elite.track));
    {
        std::string csv = "window_index,arousal\n";
        for (std::size_t i = 0; i < elite.arousal.size(); ++i)
            csv += std::to_string(i) + ',' + format_double(elite.arousal[i]) + '\n';
        write_file(out / "arousal.csv", csv);
    }
    if (!result.history.empty()) {
        std::string csv = "generation,best,mean,feasible_fraction\n";
        for (std::size_t g = 0; g < result.history.size(); ++g)
            csv += std::to_string(g) + ',' + format_double(result.history[g].best) + ',' +
                   format_double(result.history[g].mean) + ',' +
                   format_double(result.history[g].feasible_fraction) + '\n';
        write_file(out / "history.csv", csv);
    }
    write_file(out / "model.json", model.summary_json());
    if (opt.svg && elite.track && elite.feasible)
        write_file(out / "track.svg", render_track_svg(*elite.track, elite.arousal));

    ordered_json summary;
    summary["designer"] = designer_name(kind);
    summary["scenario"] = scenario_name(scenario);
    summary["cluster"] = opt.cluster;
    summary["seed"] = opt.seed;
    summary["fitness"] = elite.fitness;
    summary["accuracy"] = elite.accuracy;
    summary["feasible"] = elite.feasible;
    summary["evaluations"] = result.evaluations;
    if (elite.track && elite.feasible) {
        const TileCounts c = tile_counts(*elite.track);
        summary["tiles"] = {{"straights", c.straights},
                            {"turns", c.turns},
                            {"loops", c.loops},
                            {"ramps", c.ramps},
                            {"closure", c.closure_length}};
    }
    write_file(out / "summary.json", summary.dump(2) + "\n");

    if (opt.json_output) {
        std::cout << summary.dump(2) << '\n';
    } else {
        std::cout << "designer:    " << designer_name(kind) << '\n'
                  << "scenario:    " << scenario_name(scenario) << '\n'
                  << "fitness:     " << format_double(elite.fitness) << '\n'
                  << "accuracy:    " << format_double(elite.accuracy) << "%\n"
                  << "evaluations: " << result.evaluations << '\n'
                  << "artifacts:   " << out.string() << '\n';
    }
    return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out_path, bool json_output) {
    KeyValueConfig kv = KeyValueConfig::parse_file(config_path);
    const int length = static_cast<int>(kv.get_long("genome_length", 4));
    std::vector<TileKind> alphabet;
    for (const std::string& name :
         kv.get_list("alphabet", {"Straight", "CurveLeft", "Loop"}))
        alphabet.push_back(tile_from_name(name));
    const std::string scenario_str = kv.get_string("scenario", "max");
    const std::uint64_t corpus_seed = static_cast<std::uint64_t>(kv.get_long("corpus_seed", 1));
    const std::uint64_t sim_seed = static_cast<std::uint64_t>(kv.get_long("sim_seed", 1));
    const int knn_k = static_cast<int>(kv.get_long("knn_k", 5));
    kv.reject_unknown_keys();

    SynthSpec spec = SynthSpec::defaults();
    spec.seed = corpus_seed;
    KnnBuildOptions opts;
    opts.k = knn_k;
    const KnnModel model = KnnModel::build(synthesize_corpus(spec), opts);
    SimConfig sim;
    sim.seed = sim_seed;
    const PipelineEvaluator eval(GridConfig{}, sim, model,
                                 scenario_from_name(scenario_str));

    // Exhaustive enumeration of the toy genome space.
    const std::size_t n = alphabet.size();
    std::vector<std::size_t> digits(static_cast<std::size_t>(length), 0);
    double best_fitness = -1e18;
    Genome best_genome;
    long count = 0;
    bool done = false;
    while (!done) {
        std::vector<TileKind> genes;
        for (std::size_t d : digits) genes.push_back(alphabet[d]);
        const Genome g(genes);
        const Individual ind = eval(g);
        ++count;
        if (ind.fitness > best_fitness) {
            best_fitness = ind.fitness;
            best_genome = g;
        }
        done = true;
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (++digits[i] < n) {
                done = false;
                break;
            }
            digits[i] = 0;
        }
        if (digits.empty()) break;
    }

    ordered_json j;
    j["genome_length"] = length;
    j["alphabet"] = ordered_json::array();
    for (TileKind k : alphabet) j["alphabet"].push_back(tile_name(k));
    j["scenario"] = scenario_str;
    j["evaluations"] = count;
    j["optimum_fitness"] = best_fitness;
    j["optimum_genome"] = ordered_json::array();
    for (TileKind k : best_genome) j["optimum_genome"].push_back(tile_name(k));
    if (!out_path.empty()) write_file(out_path, j.dump(2) + "\n");
    if (json_output || out_path.empty()) std::cout << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"trackgen: arousal-targeted racetrack generation toolkit"};
    app.set_version_flag("--version", std::string("trackgen ") + kVersion);
    app.require_subcommand(1);

    // synth-corpus
    auto* synth = app.add_subcommand("synth-corpus", "Generate a synthetic annotation corpus");
    std::string synth_spec_path;
    std::string synth_out = "corpus";
    synth->add_option("spec", synth_spec_path, "Key-value spec file (optional)");
    synth->add_option("-o,--out", synth_out, "Output directory");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Cluster corpus annotators");
    std::string cluster_corpus;
    int cluster_k = 3;
    bool cluster_json = false;
    cluster->add_option("corpus", cluster_corpus, "Corpus directory")->required();
    cluster->add_option("-k", cluster_k, "Cluster count");
    cluster->add_flag("--json", cluster_json, "Machine-readable output");

    // generate
    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "Run one designer and emit its elite track");
    generate->add_option("--designer", gen.designer, "random | edpcg | edrl");
    generate->add_option("--scenario", gen.scenario, "max | min | fluct");
    generate->add_option("--cluster", gen.cluster, "all or a cluster id");
    generate->add_option("--seed", gen.seed, "Run seed");
    generate->add_option("--corpus", gen.corpus_dir, "Corpus directory (default: synthetic)");
    generate->add_option("--corpus-seed", gen.corpus_seed, "Synthetic corpus seed");
    generate->add_option("--corpus-windows", gen.corpus_windows,
                         "Synthetic corpus windows per session");
    generate->add_option("--knn-k", gen.knn_k, "KNN neighbour count");
    generate->add_option("--budget", gen.budget, "Evaluation budget");
    generate->add_option("--genome-length", gen.genome_length, "Genome length");
    generate->add_option("-o,--out", gen.out_dir, "Artifact directory");
    generate->add_flag("--json", gen.json_output, "Machine-readable output");
    generate->add_flag("--svg", gen.svg, "Also render the elite track as SVG");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Run a full experiment grid");
    std::string experiment_cfg;
    bool experiment_json = false;
    experiment->add_option("config", experiment_cfg, "Experiment config file")->required();
    experiment->add_flag("--json", experiment_json, "Machine-readable output");

    // render
    auto* render = app.add_subcommand("render", "Render a track JSON + arousal CSV to SVG");
    std::string render_track, render_trace, render_out = "track.svg";
    render->add_option("track", render_track, "Track JSON file")->required();
    render->add_option("trace", render_trace, "Arousal trace CSV")->required();
    render->add_option("-o,--out", render_out, "Output SVG path");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Exhaustively enumerate a toy genome space");
    std::string oracle_cfg;
    std::string oracle_out;
    bool oracle_json = false;
    oracle->add_option("config", oracle_cfg, "Toy-space config file")->required();
    oracle->add_option("-o,--out", oracle_out, "Optimum JSON output path");
    oracle->add_flag("--json", oracle_json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            const SynthSpec spec = synth_spec_path.empty() ? SynthSpec::defaults()
                                                           : synth_spec_from_file(synth_spec_path);
            const Corpus corpus = synthesize_corpus(spec);
            save_corpus(corpus, synth_out);
            std::cout << "wrote " << corpus.sessions.size() << " sessions to " << synth_out
                      << '\n';
            return 0;
        }
        if (cluster->parsed()) {
            const Corpus corpus = load_corpus(cluster_corpus);
            const std::vector<int> labels = cluster_annotators(corpus, cluster_k);
            if (cluster_json) {
                ordered_json j;
                for (std::size_t i = 0; i < labels.size(); ++i)
                    j[corpus.sessions[i].annotator_id] = labels[i];
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << "annotator_id,cluster\n";
                for (std::size_t i = 0; i < labels.size(); ++i)
                    std::cout << corpus.sessions[i].annotator_id << ',' << labels[i] << '\n';
            }
            return 0;
        }
        if (generate->parsed()) return cmd_generate(gen);
        if (experiment->parsed()) {
            const ExperimentConfig cfg = experiment_config_from_file(experiment_cfg);
            const ResultsTable table = run_experiment(cfg);
            if (experiment_json) {
                ordered_json j;
                j["entries"] = ordered_json::array();
                for (const TableEntry& e : table.entries) {
                    j["entries"].push_back({{"designer", designer_name(e.designer)},
                                            {"cluster", e.cluster},
                                            {"scenario", scenario_name(e.scenario)},
                                            {"mean_accuracy", e.accuracy.mean},
                                            {"ci95", e.accuracy.half_width},
                                            {"significant", e.significant}});
                }
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << table.to_csv();
            }
            return 0;
        }
        if (render->parsed()) {
            const Track track = track_from_json(read_file(render_track));
            std::vector<double> arousal;
            const std::string csv = read_file(render_trace);
            bool header = true;
            for (const std::string& line : split(csv, '\n')) {
                if (trim(line).empty()) continue;
                if (header) {
                    header = false;
                    continue;
                }
                const auto cols = split(line, ',');
                arousal.push_back(parse_double(cols.back()));
            }
            write_file(render_out, render_track_svg(track, arousal));
            std::cout << "wrote " << render_out << '\n';
            return 0;
        }
        if (oracle->parsed()) return cmd_oracle(oracle_cfg, oracle_out, oracle_json);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const CorpusError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
