#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trackgen/corpus.hpp"
#include "trackgen/designers.hpp"
#include "trackgen/evaluation.hpp"

namespace trackgen {

enum class DesignerKind { Random, Edpcg, Edrl };

std::string designer_name(DesignerKind d);
DesignerKind designer_from_name(const std::string& name);

// Cluster selection: all sessions, or one cluster id.
struct ClusterSelect {
    bool all = true;
    int id = -1;

    std::string label() const { return all ? "all" : "c" + std::to_string(id); }
};

struct ExperimentConfig {
    // Exactly one corpus source: a directory in the ingestion format, or a
    // synthetic spec.
    std::optional<std::string> corpus_path;
    std::optional<SynthSpec> synth;

    std::vector<DesignerKind> designers = {DesignerKind::Random, DesignerKind::Edpcg,
                                           DesignerKind::Edrl};
    std::vector<Scenario> scenarios = {Scenario::Maximise, Scenario::Minimise,
                                       Scenario::Fluctuating};
    std::vector<ClusterSelect> clusters = {ClusterSelect{}};

    int runs = 10;
    std::vector<std::uint64_t> seeds; // empty -> 1..runs
    int knn_k = 5;
    double preference_threshold = kPreferenceThreshold;
    int cluster_k = 3;

    GridConfig grid;
    SimConfig sim;
    EsConfig es;
    GoExploreConfig go;
    RandomDesignerConfig random;

    std::string out_dir = "out";
    bool write_svg = false;
};

ExperimentConfig experiment_config_from_file(const std::string& path);

struct RunRecord {
    DesignerKind designer;
    std::string cluster;
    Scenario scenario;
    std::uint64_t seed = 0;
    double accuracy = 0;   // of the reported (accuracy-picked) elite
    double fitness = 0;    // of the same elite
    bool feasible = false;
    int evaluations = 0;
    TileCounts counts;
};

struct TableEntry {
    DesignerKind designer;
    std::string cluster;
    Scenario scenario;
    MeanCi accuracy;
    bool significant = false; // best mean in its (cluster, scenario) group
                              // with no CI overlap against any other designer
    std::string error;        // non-empty when this combination failed
};

struct ResultsTable {
    std::vector<TableEntry> entries;
    std::vector<RunRecord> runs;

    std::string to_csv() const;
    std::string runs_csv() const;
};

// Runs the full grid (designers x clusters x scenarios x seeds), writes all
// artifacts under config.out_dir and returns the aggregated table. Artifacts
// are a function of the manifest alone: same config + seeds => byte-identical
// output.
ResultsTable run_experiment(const ExperimentConfig& config);

} // namespace trackgen
