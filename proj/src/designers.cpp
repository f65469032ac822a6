#include "trackgen/designers.hpp"

#include <algorithm>
#include <unordered_set>

#include "trackgen/errors.hpp"

namespace trackgen {

Individual PipelineEvaluator::operator()(const Genome& genome) const {
    Individual ind;
    ind.genome = genome;

    Track open = decode(genome, grid_);
    if (!open.feasible) {
        ind.reason = open.reason;
        ind.track = std::move(open);
        return ind;
    }
    Track track = close_circuit(open);
    if (!track.feasible) {
        ind.reason = track.reason;
        ind.track = std::move(track);
        return ind;
    }

    const StateTrace trace = simulate(track, sim_);
    ind.arousal = model_.arousal_trace(trace);
    const std::vector<double> target = make_target(scenario_, static_cast<int>(ind.arousal.size()));
    ind.fitness = reward(ind.arousal, target, true);
    ind.accuracy = accuracy_pct(ind.arousal, target);
    ind.feasible = true;
    ind.track = std::move(track);
    return ind;
}

namespace detail {

Genome random_genome(Rng& rng, int length, const std::vector<TileKind>& alphabet) {
    std::vector<TileKind> genes;
    genes.reserve(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i)
        genes.push_back(alphabet[static_cast<std::size_t>(rng.uniform_int(
            static_cast<int>(alphabet.size())))]);
    return Genome(std::move(genes));
}

Genome crossover_one_point(Rng& rng, const Genome& a, const Genome& b) {
    const std::size_t len = std::min(a.size(), b.size());
    if (len < 2) return a;
    const std::size_t point =
        1 + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(len - 1)));
    std::vector<TileKind> genes;
    genes.reserve(len);
    for (std::size_t i = 0; i < point; ++i) genes.push_back(a[i]);
    for (std::size_t i = point; i < len; ++i) genes.push_back(b[i]);
    return Genome(std::move(genes));
}

Genome mutate(Rng& rng, const Genome& g, double rate, const std::vector<TileKind>& alphabet) {
    std::vector<TileKind> genes = g.genes();
    for (TileKind& gene : genes) {
        if (rng.uniform() < rate)
            gene = alphabet[static_cast<std::size_t>(
                rng.uniform_int(static_cast<int>(alphabet.size())))];
    }
    return Genome(std::move(genes));
}

} // namespace detail

namespace {

const std::vector<TileKind>& alphabet_or_default(const std::vector<TileKind>& a) {
    return a.empty() ? genome_alphabet() : a;
}

bool better_fitness(const Individual& a, const Individual& b) {
    return a.fitness > b.fitness; // ties keep the earlier individual
}

} // namespace

DesignerResult random_designer(const RandomDesignerConfig& config, const EvalFn& eval) {
    const auto& alphabet = alphabet_or_default(config.alphabet);
    Rng rng(config.seed);
    DesignerResult result;
    std::optional<Individual> best;

    for (int i = 0; i < config.budget; ++i) {
        Genome genome = detail::random_genome(rng, config.genome_length, alphabet);
        Individual ind = eval(genome);
        ++result.evaluations;
        if (!ind.feasible) continue;
        Individual stripped = ind;
        stripped.strip();
        // Keep a small pool of the best individuals for accuracy-based picks.
        auto pos = std::upper_bound(result.candidates.begin(), result.candidates.end(),
                                    stripped, better_fitness);
        result.candidates.insert(pos, stripped);
        if (static_cast<int>(result.candidates.size()) > config.candidate_pool)
            result.candidates.pop_back();
        if (!best || ind.fitness > best->fitness) best = std::move(ind);
    }
    if (!best)
        throw EvaluationError("NoFeasibleFound: random designer exhausted its budget");
    result.best = std::move(*best);
    return result;
}

DesignerResult evolve(const EsConfig& config, const EvalFn& eval) {
    const auto& alphabet = alphabet_or_default(config.alphabet);
    if (config.mu < 1 || config.lambda < config.mu)
        throw EvaluationError("evolve: need 1 <= mu <= lambda");
    Rng rng(config.seed);
    DesignerResult result;

    // Repeated genomes (the injected elite in particular) are served from a
    // memo so they do not consume budget. The best individual seen so far is
    // kept un-stripped; a strict improvement can only come from a fresh
    // evaluation, so the memo never hides a better elite.
    std::optional<Individual> elite_full;
    std::unordered_map<std::string, Individual> memo;
    auto evaluate = [&](const Genome& g) -> const Individual& {
        auto it = memo.find(g.key());
        if (it != memo.end()) return it->second;
        Individual ind = eval(g);
        ++result.evaluations;
        if (!elite_full || ind.fitness > elite_full->fitness) elite_full = ind;
        ind.strip();
        return memo.emplace(g.key(), std::move(ind)).first->second;
    };

    auto make_unique_population = [&](std::vector<Genome>& population,
                                      const std::function<Genome()>& gen) {
        std::unordered_set<std::string> seen;
        for (const Genome& g : population) seen.insert(g.key());
        while (static_cast<int>(population.size()) < config.lambda) {
            Genome g = gen();
            if (config.uniqueness) {
                int retries = 0;
                while (seen.count(g.key()) && retries < config.uniqueness_retries) {
                    g = gen();
                    ++retries;
                }
            }
            seen.insert(g.key());
            population.push_back(std::move(g));
        }
    };

    std::vector<Genome> population;
    make_unique_population(population, [&] {
        return detail::random_genome(rng, config.genome_length, alphabet);
    });

    std::optional<Individual> elite;
    bool out_of_budget = false;
    for (int gen = 0; gen <= config.generations && !out_of_budget; ++gen) {
        std::vector<const Individual*> evaluated;
        evaluated.reserve(population.size());
        for (const Genome& g : population) {
            if (result.evaluations >= config.max_evaluations && !memo.count(g.key())) {
                out_of_budget = true;
                break;
            }
            evaluated.push_back(&evaluate(g));
        }
        if (evaluated.empty()) break;

        double mean = 0.0;
        double feasible = 0.0;
        for (const Individual* ind : evaluated) {
            mean += ind->fitness;
            feasible += ind->feasible ? 1.0 : 0.0;
            if (!elite || ind->fitness > elite->fitness) elite = *ind;
        }
        GenerationStats stats;
        stats.best = elite->fitness;
        stats.mean = mean / static_cast<double>(evaluated.size());
        stats.feasible_fraction = feasible / static_cast<double>(evaluated.size());
        result.history.push_back(stats);

        if (gen == config.generations || out_of_budget) {
            for (const Individual* ind : evaluated) result.candidates.push_back(*ind);
            break;
        }

        // Selection: mu best, ties by insertion order (stable sort).
        std::vector<std::size_t> order(evaluated.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return evaluated[a]->fitness > evaluated[b]->fitness;
        });
        const int mu = std::min<int>(config.mu, static_cast<int>(order.size()));
        std::vector<Genome> parents;
        parents.reserve(static_cast<std::size_t>(mu));
        for (int i = 0; i < mu; ++i) parents.push_back(population[order[static_cast<std::size_t>(i)]]);

        std::vector<Genome> offspring;
        offspring.reserve(static_cast<std::size_t>(config.lambda));
        make_unique_population(offspring, [&] {
            const Genome& pa = parents[static_cast<std::size_t>(rng.uniform_int(mu))];
            const Genome& pb = parents[static_cast<std::size_t>(rng.uniform_int(mu))];
            return detail::mutate(rng, detail::crossover_one_point(rng, pa, pb),
                                  config.mutation_rate, alphabet);
        });

        if (config.elitism && elite) {
            bool present = false;
            for (const Genome& g : offspring)
                if (g == elite->genome) {
                    present = true;
                    break;
                }
            if (!present) offspring.back() = elite->genome;
        }
        population = std::move(offspring);
    }

    if (!elite_full) throw EvaluationError("evolve: nothing evaluated");
    result.best = std::move(*elite_full);
    return result;
}

namespace {

std::array<int, 5> cell_key(const Individual& ind) {
    const TileCounts counts = tile_counts(*ind.track);
    const bool closed = ind.track->closed && ind.track->feasible;
    return {counts.straights, counts.turns, counts.loops, counts.ramps,
            closed ? counts.closure_length : -1};
}

struct KeyHash {
    std::size_t operator()(const std::array<int, 5>& k) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (int v : k) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace

DesignerResult go_explore(const GoExploreConfig& config, const EvalFn& eval) {
    const auto& alphabet = alphabet_or_default(config.alphabet);
    Rng rng(config.seed);
    DesignerResult result;

    std::vector<ArchiveCell> cells;
    std::unordered_map<std::array<int, 5>, std::size_t, KeyHash> index;

    auto upsert = [&](const Individual& ind, const std::vector<TileKind>& traj) {
        if (!ind.track || ind.track->reason == InfeasibleReason::Collision ||
            ind.track->reason == InfeasibleReason::OutOfBounds) {
            // A colliding prefix can never become feasible; don't archive it.
            ++result.archive.discarded_infeasible;
            return;
        }
        const std::array<int, 5> key = cell_key(ind);
        auto it = index.find(key);
        if (it == index.end()) {
            ArchiveCell cell;
            cell.key = key;
            cell.trajectory = traj;
            cell.reward = ind.fitness;
            cell.accuracy = ind.accuracy;
            index.emplace(key, cells.size());
            cells.push_back(std::move(cell));
        } else if (ind.fitness > cells[it->second].reward) {
            ArchiveCell& cell = cells[it->second];
            cell.trajectory = traj;
            cell.reward = ind.fitness;
            cell.accuracy = ind.accuracy;
            ++result.archive.replacements;
        }
    };

    // Best full-length individual, kept un-stripped for the result. Keys
    // encode the trajectory length, so the best full-length evaluation is
    // always the best full-length cell in the archive.
    std::optional<Individual> best_full;
    auto run_eval = [&](const Genome& g) {
        Individual ind = eval(g);
        ++result.evaluations;
        if (static_cast<int>(g.size()) == config.max_actions &&
            (!best_full || ind.fitness > best_full->fitness))
            best_full = ind;
        return ind;
    };

    // Seed the archive with the empty trajectory (setup; not budgeted).
    upsert(run_eval(Genome(std::vector<TileKind>{})), {});

    for (int step = 0; step < config.budget && !cells.empty(); ++step) {
        // Sample an expandable cell; full-length cells cannot be explored.
        std::vector<std::size_t> eligible;
        eligible.reserve(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (static_cast<int>(cells[i].trajectory.size()) < config.max_actions)
                eligible.push_back(i);
        if (eligible.empty()) break;

        std::size_t chosen = eligible.front();
        if (config.selection == CellSelection::Uniform) {
            chosen = eligible[static_cast<std::size_t>(
                rng.uniform_int(static_cast<int>(eligible.size())))];
        } else {
            double total = 0.0;
            for (std::size_t i : eligible) total += 1.0 / (1.0 + cells[i].visits);
            double r = rng.uniform() * total;
            for (std::size_t i : eligible) {
                r -= 1.0 / (1.0 + cells[i].visits);
                chosen = i;
                if (r <= 0.0) break;
            }
        }
        cells[chosen].visits += 1;

        std::vector<TileKind> traj = cells[chosen].trajectory;
        traj.push_back(alphabet[static_cast<std::size_t>(
            rng.uniform_int(static_cast<int>(alphabet.size())))]);

        upsert(run_eval(Genome(traj)), traj);
    }

    // Elite: best full-length cell by reward. Without any feasible
    // full-length cell, fall back to the best available with a warning.
    if (best_full && best_full->feasible) {
        result.best = std::move(*best_full);
    } else {
        result.archive.no_full_length_cell = true;
        const ArchiveCell* fallback = nullptr;
        for (const ArchiveCell& cell : cells)
            if (!fallback || cell.reward > fallback->reward) fallback = &cell;
        if (!fallback) throw EvaluationError("go_explore: archive is empty");
        result.best = eval(Genome(fallback->trajectory));
        ++result.evaluations;
    }

    for (const ArchiveCell& cell : cells) {
        if (static_cast<int>(cell.trajectory.size()) != config.max_actions) continue;
        Individual ind;
        ind.genome = Genome(cell.trajectory);
        ind.fitness = cell.reward;
        ind.accuracy = cell.accuracy;
        ind.feasible = cell.reward > kInfeasibleReward;
        result.candidates.push_back(std::move(ind));
    }
    result.archive.cells = static_cast<int>(cells.size());
    result.archive_cells = std::move(cells);
    return result;
}

} // namespace trackgen
