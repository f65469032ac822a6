#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trackgen/circuit.hpp"
#include "trackgen/evaluation.hpp"
#include "trackgen/knn.hpp"
#include "trackgen/rng.hpp"
#include "trackgen/simulate.hpp"
#include "trackgen/track.hpp"

namespace trackgen {

// One evaluated genome. Infeasible individuals carry the -1000 penalty and
// accuracy 0 with feasible = false.
struct Individual {
    Genome genome;
    double fitness = kInfeasibleReward;
    double accuracy = 0.0;
    bool feasible = false;
    InfeasibleReason reason = InfeasibleReason::None;
    std::optional<Track> track;
    ArousalTrace arousal;

    // Drops the heavy phenotype data; keeps genome/fitness/accuracy.
    void strip() {
        track.reset();
        arousal.clear();
        arousal.shrink_to_fit();
    }
};

using EvalFn = std::function<Individual(const Genome&)>;

// decode -> close_circuit -> simulate -> arousal_trace -> reward/accuracy.
// Any infeasibility folds into fitness -1000.
class PipelineEvaluator {
public:
    PipelineEvaluator(GridConfig grid, SimConfig sim, KnnModel model, Scenario scenario)
        : grid_(grid), sim_(sim), model_(std::move(model)), scenario_(scenario) {}

    Individual operator()(const Genome& genome) const;

    const KnnModel& model() const { return model_; }
    Scenario scenario() const { return scenario_; }

private:
    GridConfig grid_;
    SimConfig sim_;
    KnnModel model_;
    Scenario scenario_;
};

struct GenerationStats {
    double best = kInfeasibleReward;      // best-so-far fitness after this generation
    double mean = kInfeasibleReward;      // mean fitness of the generation's population
    double feasible_fraction = 0.0;
};

struct ArchiveCell {
    std::array<int, 5> key{}; // straights, turns, loops, ramps, closure (-1 unclosable)
    std::vector<TileKind> trajectory;
    double reward = kInfeasibleReward;
    double accuracy = 0.0;
    int visits = 0;
};

struct ArchiveStats {
    int cells = 0;
    int replacements = 0;
    int discarded_infeasible = 0;
    bool no_full_length_cell = false;
};

struct DesignerResult {
    Individual best;                     // by fitness (EDRL: best full-length cell)
    std::vector<Individual> candidates;  // stripped; pool for accuracy-based picks
    std::vector<GenerationStats> history;
    int evaluations = 0;
    ArchiveStats archive;                // EDRL only
    std::vector<ArchiveCell> archive_cells; // EDRL only
};

struct RandomDesignerConfig {
    int budget = 2500;
    std::uint64_t seed = 0;
    int genome_length = 10;
    std::vector<TileKind> alphabet; // empty -> genome_alphabet()
    // The random baseline's output is its single best-of-budget individual;
    // a larger pool would hand it an accuracy-ranking advantage the other
    // designers earn through their terminal populations/archives.
    int candidate_pool = 1;
};

struct EsConfig {
    int mu = 10;
    int lambda = 50;
    double mutation_rate = 0.10;
    int generations = 50;
    bool elitism = true;
    bool uniqueness = true;
    std::uint64_t seed = 0;
    int genome_length = 10;
    std::vector<TileKind> alphabet;
    int max_evaluations = 2500;
    int uniqueness_retries = 20;
};

enum class CellSelection { InverseVisits, Uniform };

struct GoExploreConfig {
    int budget = 2500;
    std::uint64_t seed = 0;
    int max_actions = 10;
    std::vector<TileKind> alphabet;
    CellSelection selection = CellSelection::InverseVisits;
};

// Uniform-random genomes; returns the best feasible individual found within
// the budget. Throws EvaluationError when nothing feasible turns up.
DesignerResult random_designer(const RandomDesignerConfig& config, const EvalFn& eval);

// (mu, lambda) evolution strategy with one-point crossover, per-gene uniform
// mutation, offspring uniqueness and elitism. Repeated genomes are served
// from a memo so the evaluation count stays within the budget.
DesignerResult evolve(const EsConfig& config, const EvalFn& eval);

// Go-Explore archive search over trajectories of tile placements. Cells are
// keyed by (straights, turns, loops, ramps, closure length); a cell is
// replaced only by a strictly better reward. The elite is the best cell with
// max_actions actions; if none exists the best available cell is returned
// with archive.no_full_length_cell set.
DesignerResult go_explore(const GoExploreConfig& config, const EvalFn& eval);

namespace detail {

Genome random_genome(Rng& rng, int length, const std::vector<TileKind>& alphabet);
Genome crossover_one_point(Rng& rng, const Genome& a, const Genome& b);
Genome mutate(Rng& rng, const Genome& g, double rate, const std::vector<TileKind>& alphabet);

} // namespace detail

} // namespace trackgen
