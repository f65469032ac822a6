#include "trackgen/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "trackgen/config.hpp"
#include "trackgen/errors.hpp"
#include "trackgen/svg.hpp"
#include "trackgen/util.hpp"

namespace trackgen {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string designer_name(DesignerKind d) {
    switch (d) {
    case DesignerKind::Random: return "random";
    case DesignerKind::Edpcg: return "edpcg";
    case DesignerKind::Edrl: return "edrl";
    }
    return "?";
}

DesignerKind designer_from_name(const std::string& name) {
    if (name == "random") return DesignerKind::Random;
    if (name == "edpcg" || name == "es") return DesignerKind::Edpcg;
    if (name == "edrl" || name == "go-explore" || name == "goexplore")
        return DesignerKind::Edrl;
    throw ConfigError("unknown designer: '" + name + "'");
}

namespace {

std::vector<TileKind> parse_alphabet(const std::vector<std::string>& names) {
    std::vector<TileKind> kinds;
    for (const std::string& n : names) kinds.push_back(tile_from_name(n));
    return kinds;
}

} // namespace

ExperimentConfig experiment_config_from_file(const std::string& path) {
    KeyValueConfig kv = KeyValueConfig::parse_file(path);
    ExperimentConfig cfg;

    if (kv.has("corpus")) cfg.corpus_path = kv.require_string("corpus");
    SynthSpec synth = SynthSpec::defaults();
    synth.sessions_per_cluster = static_cast<int>(kv.get_long("synth.sessions_per_cluster", 10));
    synth.windows_per_session = static_cast<int>(kv.get_long("synth.windows_per_session", 40));
    synth.noise = kv.get_double("synth.noise", 0.05);
    synth.seed = static_cast<std::uint64_t>(kv.get_long("synth.seed", 1));
    if (!cfg.corpus_path) cfg.synth = synth;

    cfg.designers.clear();
    for (const std::string& d : kv.get_list("designers", {"random", "edpcg", "edrl"}))
        cfg.designers.push_back(designer_from_name(d));
    cfg.scenarios.clear();
    for (const std::string& s : kv.get_list("scenarios", {"max", "min", "fluct"}))
        cfg.scenarios.push_back(scenario_from_name(s));
    cfg.clusters.clear();
    for (const std::string& c : kv.get_list("clusters", {"all"})) {
        if (c == "all")
            cfg.clusters.push_back(ClusterSelect{});
        else
            cfg.clusters.push_back(ClusterSelect{false, static_cast<int>(parse_long(c))});
    }

    cfg.runs = static_cast<int>(kv.get_long("runs", 10));
    if (kv.has("seeds")) {
        for (const std::string& s : kv.get_list("seeds", {}))
            cfg.seeds.push_back(static_cast<std::uint64_t>(parse_long(s)));
    }
    cfg.knn_k = static_cast<int>(kv.get_long("knn.k", 5));
    cfg.preference_threshold = kv.get_double("knn.threshold", kPreferenceThreshold);
    cfg.cluster_k = static_cast<int>(kv.get_long("cluster.k", 3));

    cfg.grid.width = static_cast<int>(kv.get_long("grid.width", 32));
    cfg.grid.height = static_cast<int>(kv.get_long("grid.height", 32));
    cfg.grid.origin.x = static_cast<int>(kv.get_long("grid.origin_x", cfg.grid.width / 2));
    cfg.grid.origin.y = static_cast<int>(kv.get_long("grid.origin_y", cfg.grid.height / 2));
    cfg.grid.initial_heading =
        heading_from_name(kv.get_string("grid.initial_heading", "East"));
    cfg.grid.allow_underpass = kv.get_bool("grid.underpass", true);

    cfg.sim.timestep_hz = static_cast<int>(kv.get_long("sim.timestep_hz", 30));
    cfg.sim.max_laps = static_cast<int>(kv.get_long("sim.max_laps", 3));
    cfg.sim.max_seconds = kv.get_double("sim.max_seconds", 120.0);
    cfg.sim.window_seconds = kv.get_double("sim.window_seconds", 3.0);
    cfg.sim.max_speed = kv.get_double("sim.max_speed", cfg.sim.max_speed);
    cfg.sim.acceleration = kv.get_double("sim.acceleration", cfg.sim.acceleration);
    cfg.sim.max_turn_rate_deg_per_s =
        kv.get_double("sim.max_turn_rate_deg_per_s", cfg.sim.max_turn_rate_deg_per_s);
    cfg.sim.off_track_speed_factor =
        kv.get_double("sim.off_track_speed_factor", cfg.sim.off_track_speed_factor);
    cfg.sim.loop_speed_factor = kv.get_double("sim.loop_speed_factor", cfg.sim.loop_speed_factor);
    cfg.sim.collision_penalty_seconds =
        kv.get_double("sim.collision_penalty_seconds", cfg.sim.collision_penalty_seconds);
    cfg.sim.collision_radius = kv.get_double("sim.collision_radius", cfg.sim.collision_radius);

    const int genome_length = static_cast<int>(kv.get_long("genome_length", 10));
    std::vector<TileKind> alphabet;
    if (kv.has("alphabet")) alphabet = parse_alphabet(kv.get_list("alphabet", {}));

    cfg.es.mu = static_cast<int>(kv.get_long("es.mu", 10));
    cfg.es.lambda = static_cast<int>(kv.get_long("es.lambda", 50));
    cfg.es.mutation_rate = kv.get_double("es.mutation_rate", 0.10);
    cfg.es.generations = static_cast<int>(kv.get_long("es.generations", 50));
    cfg.es.elitism = kv.get_bool("es.elitism", true);
    cfg.es.uniqueness = kv.get_bool("es.uniqueness", true);
    cfg.es.max_evaluations = static_cast<int>(kv.get_long("budget", 2500));
    cfg.es.genome_length = genome_length;
    cfg.es.alphabet = alphabet;

    cfg.go.budget = static_cast<int>(kv.get_long("budget", 2500));
    cfg.go.max_actions = genome_length;
    cfg.go.alphabet = alphabet;
    const std::string sel = kv.get_string("go.selection", "inverse_visits");
    if (sel == "inverse_visits")
        cfg.go.selection = CellSelection::InverseVisits;
    else if (sel == "uniform")
        cfg.go.selection = CellSelection::Uniform;
    else
        throw ConfigError("go.selection must be inverse_visits or uniform");

    cfg.random.budget = static_cast<int>(kv.get_long("budget", 2500));
    cfg.random.genome_length = genome_length;
    cfg.random.alphabet = alphabet;

    cfg.out_dir = kv.get_string("out_dir", "out");
    cfg.write_svg = kv.get_bool("write_svg", false);

    kv.reject_unknown_keys();
    return cfg;
}

namespace {

std::string combo_name(DesignerKind d, const ClusterSelect& c, Scenario s) {
    return designer_name(d) + "_" + c.label() + "_" + scenario_name(s);
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    out << content;
}

ordered_json config_manifest(const ExperimentConfig& cfg, const Corpus& corpus,
                             const std::vector<std::uint64_t>& seeds) {
    ordered_json j;
    j["corpus_hash"] = hex64(corpus_hash(corpus));
    if (cfg.corpus_path) j["corpus"] = *cfg.corpus_path;
    if (cfg.synth) {
        j["synth"] = {{"sessions_per_cluster", cfg.synth->sessions_per_cluster},
                      {"windows_per_session", cfg.synth->windows_per_session},
                      {"noise", cfg.synth->noise},
                      {"seed", cfg.synth->seed}};
    }
    j["designers"] = ordered_json::array();
    for (DesignerKind d : cfg.designers) j["designers"].push_back(designer_name(d));
    j["scenarios"] = ordered_json::array();
    for (Scenario s : cfg.scenarios) j["scenarios"].push_back(scenario_name(s));
    j["clusters"] = ordered_json::array();
    for (const ClusterSelect& c : cfg.clusters) j["clusters"].push_back(c.label());
    j["seeds"] = seeds;
    j["knn_k"] = cfg.knn_k;
    j["preference_threshold"] = cfg.preference_threshold;
    j["cluster_k"] = cfg.cluster_k;
    j["grid"] = {{"width", cfg.grid.width},
                 {"height", cfg.grid.height},
                 {"origin", {cfg.grid.origin.x, cfg.grid.origin.y}},
                 {"initial_heading", heading_name(cfg.grid.initial_heading)},
                 {"underpass", cfg.grid.allow_underpass}};
    j["sim"] = {{"timestep_hz", cfg.sim.timestep_hz},
                {"max_laps", cfg.sim.max_laps},
                {"max_seconds", cfg.sim.max_seconds},
                {"window_seconds", cfg.sim.window_seconds},
                {"max_speed", cfg.sim.max_speed},
                {"acceleration", cfg.sim.acceleration},
                {"max_turn_rate_deg_per_s", cfg.sim.max_turn_rate_deg_per_s},
                {"off_track_speed_factor", cfg.sim.off_track_speed_factor},
                {"loop_speed_factor", cfg.sim.loop_speed_factor},
                {"collision_penalty_seconds", cfg.sim.collision_penalty_seconds},
                {"collision_radius", cfg.sim.collision_radius}};
    j["es"] = {{"mu", cfg.es.mu},
               {"lambda", cfg.es.lambda},
               {"mutation_rate", cfg.es.mutation_rate},
               {"generations", cfg.es.generations},
               {"elitism", cfg.es.elitism},
               {"uniqueness", cfg.es.uniqueness},
               {"max_evaluations", cfg.es.max_evaluations},
               {"genome_length", cfg.es.genome_length}};
    j["go"] = {{"budget", cfg.go.budget},
               {"max_actions", cfg.go.max_actions},
               {"selection",
                cfg.go.selection == CellSelection::InverseVisits ? "inverse_visits"
                                                                 : "uniform"}};
    j["random"] = {{"budget", cfg.random.budget},
                   {"genome_length", cfg.random.genome_length}};
    return j;
}

// The protocol picks the reported individual by accuracy over the designer's
// final candidates; fitness breaks ties, then pool order.
const Individual* pick_by_accuracy(const DesignerResult& result) {
    const Individual* best = &result.best;
    for (const Individual& c : result.candidates) {
        if (!c.feasible) continue;
        if (c.accuracy > best->accuracy ||
            (c.accuracy == best->accuracy && c.fitness > best->fitness))
            best = &c;
    }
    return best;
}

std::string history_csv(const DesignerResult& result) {
    std::string out = "generation,best,mean,feasible_fraction\n";
    for (std::size_t g = 0; g < result.history.size(); ++g) {
        const GenerationStats& s = result.history[g];
        out += std::to_string(g) + ',' + format_double(s.best) + ',' +
               format_double(s.mean) + ',' + format_double(s.feasible_fraction) + '\n';
    }
    return out;
}

std::string archive_csv(const DesignerResult& result) {
    std::string out = "straights,turns,loops,ramps,closure,reward,accuracy,visits,trajectory\n";
    for (const ArchiveCell& cell : result.archive_cells) {
        for (int v : cell.key) out += std::to_string(v) + ',';
        out += format_double(cell.reward) + ',' + format_double(cell.accuracy) + ',' +
               std::to_string(cell.visits) + ',';
        for (TileKind k : cell.trajectory) out += tile_name(k)[0] == 'C'
                ? (k == TileKind::CurveLeft ? "L" : "R")
                : std::string(1, tile_name(k)[0]);
        out += '\n';
    }
    return out;
}

std::string arousal_csv(const ArousalTrace& trace) {
    std::string out = "window_index,arousal\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        out += std::to_string(i) + ',' + format_double(trace[i]) + '\n';
    return out;
}

} // namespace

std::string ResultsTable::runs_csv() const {
    std::string out = "designer,cluster,scenario,seed,accuracy,fitness,feasible,"
                      "evaluations,straights,turns,loops,ramps,closure\n";
    for (const RunRecord& r : runs) {
        out += designer_name(r.designer) + ',' + r.cluster + ',' + scenario_name(r.scenario) +
               ',' + std::to_string(r.seed) + ',' + format_double(r.accuracy) + ',' +
               format_double(r.fitness) + ',' + (r.feasible ? "1" : "0") + ',' +
               std::to_string(r.evaluations) + ',' + std::to_string(r.counts.straights) +
               ',' + std::to_string(r.counts.turns) + ',' + std::to_string(r.counts.loops) +
               ',' + std::to_string(r.counts.ramps) + ',' +
               std::to_string(r.counts.closure_length) + '\n';
    }
    return out;
}

std::string ResultsTable::to_csv() const {
    std::string out = "designer,cluster,scenario,mean_accuracy,ci95,significant,error\n";
    for (const TableEntry& e : entries) {
        out += designer_name(e.designer) + ',' + e.cluster + ',' + scenario_name(e.scenario) +
               ',' + format_double(e.accuracy.mean) + ',' +
               format_double(e.accuracy.half_width) + ',' + (e.significant ? "1" : "0") +
               ',' + e.error + '\n';
    }
    return out;
}

ResultsTable run_experiment(const ExperimentConfig& config) {
    if (config.corpus_path && config.synth)
        throw ConfigError("experiment: corpus path and synthetic spec are exclusive");

    Corpus corpus;
    if (config.corpus_path)
        corpus = load_corpus(*config.corpus_path);
    else if (config.synth)
        corpus = synthesize_corpus(*config.synth);
    else
        throw ConfigError("experiment: no corpus source configured");

    std::vector<std::uint64_t> seeds = config.seeds;
    if (seeds.empty())
        for (int i = 1; i <= config.runs; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
    if (static_cast<int>(seeds.size()) != config.runs)
        throw ConfigError("experiment: runs must equal the number of seeds");

    // Cluster assignments are needed when any selection is cluster-filtered.
    std::vector<int> assignments;
    const bool needs_clusters =
        std::any_of(config.clusters.begin(), config.clusters.end(),
                    [](const ClusterSelect& c) { return !c.all; });
    if (needs_clusters) assignments = cluster_annotators(corpus, config.cluster_k);

    const fs::path out_root(config.out_dir);
    fs::create_directories(out_root);
    write_file(out_root / "manifest.json",
               config_manifest(config, corpus, seeds).dump(2) + "\n");

    ResultsTable table;
    std::map<Scenario, std::vector<TileCounts>> expressive;

    for (const ClusterSelect& cluster : config.clusters) {
        KnnBuildOptions knn_opts;
        knn_opts.k = config.knn_k;
        knn_opts.threshold = config.preference_threshold;
        if (!cluster.all) {
            knn_opts.cluster_filter = cluster.id;
            knn_opts.cluster_assignments = assignments;
        }
        const KnnModel model = KnnModel::build(corpus, knn_opts);

        for (Scenario scenario : config.scenarios) {
            for (DesignerKind designer : config.designers) {
                std::vector<double> accuracies;
                std::string error;
                for (std::uint64_t seed : seeds) {
                    SimConfig sim = config.sim;
                    sim.seed = seed;
                    const PipelineEvaluator evaluator(config.grid, sim, model, scenario);
                    const EvalFn eval = [&](const Genome& g) { return evaluator(g); };

                    try {
                        DesignerResult result;
                        switch (designer) {
                        case DesignerKind::Random: {
                            RandomDesignerConfig rc = config.random;
                            rc.seed = seed;
                            result = random_designer(rc, eval);
                            break;
                        }
                        case DesignerKind::Edpcg: {
                            EsConfig ec = config.es;
                            ec.seed = seed;
                            result = evolve(ec, eval);
                            break;
                        }
                        case DesignerKind::Edrl: {
                            GoExploreConfig gc = config.go;
                            gc.seed = seed;
                            result = go_explore(gc, eval);
                            break;
                        }
                        }

                        const Individual* picked = pick_by_accuracy(result);
                        // Re-materialize if the accuracy pick is a stripped
                        // candidate rather than the fitness elite.
                        Individual elite;
                        if (picked == &result.best)
                            elite = result.best;
                        else
                            elite = eval(picked->genome);

                        RunRecord rec;
                        rec.designer = designer;
                        rec.cluster = cluster.label();
                        rec.scenario = scenario;
                        rec.seed = seed;
                        rec.accuracy = elite.accuracy;
                        rec.fitness = elite.fitness;
                        rec.feasible = elite.feasible;
                        rec.evaluations = result.evaluations;
                        if (elite.track) rec.counts = tile_counts(*elite.track);
                        table.runs.push_back(rec);
                        accuracies.push_back(elite.accuracy);
                        if (elite.feasible) expressive[scenario].push_back(rec.counts);

                        const std::string base =
                            combo_name(designer, cluster, scenario) + "_seed" +
                            std::to_string(seed);
                        if (elite.track)
                            write_file(out_root / "tracks" / (base + ".json"),
                                       track_to_json(*elite.track));
                        write_file(out_root / "traces" / (base + ".csv"),
                                   arousal_csv(elite.arousal));
                        if (!result.history.empty())
                            write_file(out_root / "history" / (base + ".csv"),
                                       history_csv(result));
                        if (!result.archive_cells.empty())
                            write_file(out_root / "archives" / (base + ".csv"),
                                       archive_csv(result));
                        if (config.write_svg && elite.track && elite.feasible)
                            write_file(out_root / "renders" / (base + ".svg"),
                                       render_track_svg(*elite.track, elite.arousal));
                    } catch (const std::exception& e) {
                        error = e.what();
                        RunRecord rec;
                        rec.designer = designer;
                        rec.cluster = cluster.label();
                        rec.scenario = scenario;
                        rec.seed = seed;
                        table.runs.push_back(rec);
                        accuracies.push_back(0.0);
                    }
                }

                TableEntry entry;
                entry.designer = designer;
                entry.cluster = cluster.label();
                entry.scenario = scenario;
                entry.error = error;
                if (accuracies.size() >= 2)
                    entry.accuracy = confidence_interval_95(accuracies);
                else if (accuracies.size() == 1)
                    entry.accuracy = MeanCi{accuracies[0], 0.0};
                table.entries.push_back(entry);
            }
        }
    }

    // Significance: best mean in its (cluster, scenario) group whose CI does
    // not overlap any other designer's CI.
    for (TableEntry& e : table.entries) {
        bool best = true;
        bool overlap = false;
        for (const TableEntry& o : table.entries) {
            if (&o == &e || o.cluster != e.cluster || o.scenario != e.scenario) continue;
            if (o.accuracy.mean >= e.accuracy.mean) best = false;
            const double gap = std::abs(e.accuracy.mean - o.accuracy.mean);
            if (gap <= e.accuracy.half_width + o.accuracy.half_width) overlap = true;
        }
        e.significant = best && !overlap && config.designers.size() > 1;
    }

    write_file(out_root / "runs.csv", table.runs_csv());
    write_file(out_root / "results.csv", table.to_csv());
    if (!expressive.empty()) {
        std::map<Scenario, std::vector<TileCounts>> usable;
        for (auto& [scenario, counts] : expressive)
            if (counts.size() >= 2) usable[scenario] = counts;
        if (!usable.empty())
            write_file(out_root / "expressive.csv",
                       expressive_range_csv(expressive_range(usable)));
    }
    return table;
}

} // namespace trackgen
