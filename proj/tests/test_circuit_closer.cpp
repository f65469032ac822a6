#include "doctest.h"

#include <map>
#include <set>

#include "trackgen/circuit.hpp"
#include "trackgen/rng.hpp"

using namespace trackgen;

namespace {

constexpr TileKind S = TileKind::Straight;
constexpr TileKind L = TileKind::CurveLeft;
constexpr TileKind R = TileKind::CurveRight;

Genome make_genome(std::initializer_list<TileKind> kinds) {
    return Genome(std::vector<TileKind>(kinds));
}

// Exhaustive oracle: shortest valid closing tile sequence by depth-limited
// enumeration over {S, L, R}, honouring occupancy, bounds and the
// no-cell-reuse constraint. Independent of the production search.
struct OracleState {
    Vec2i cell;
    Heading heading;
};

bool oracle_dfs(const Track& track, OracleState state, Vec2i goal_cell, Heading goal_heading,
                std::set<std::pair<int, int>>& used, int remaining) {
    if (state.cell == goal_cell && state.heading == goal_heading) return true;
    if (remaining == 0) return false;
    if (!track.grid.in_bounds(state.cell)) return false;
    if (track.grid.ground(state.cell).occupied()) return false;
    if (used.count({state.cell.x, state.cell.y})) return false;
    const Occupant& above = track.grid.elevated(state.cell);

    for (TileKind kind : {S, L, R}) {
        if (above.occupied()) {
            const bool ok = track.config.allow_underpass && kind == S &&
                            perpendicular(state.heading, above.heading);
            if (!ok) continue;
        }
        const Heading exit = exit_heading_of(kind, state.heading);
        used.insert({state.cell.x, state.cell.y});
        const OracleState next{state.cell + heading_delta(exit), exit};
        const bool found = oracle_dfs(track, next, goal_cell, goal_heading, used, remaining - 1);
        used.erase({state.cell.x, state.cell.y});
        if (found) return true;
    }
    return false;
}

// Minimum closure length within the cap, or -1 when none exists.
int oracle_min_closure(const Track& open_track, int cap) {
    const PlacedPiece& last =
        open_track.pieces.empty() ? open_track.start : open_track.pieces.back();
    const OracleState source{last.exit_cell(), last.exit_heading};
    const Vec2i goal_cell = open_track.start.entry_cell();
    const Heading goal_heading = open_track.start.entry_heading;
    for (int len = 0; len <= cap; ++len) {
        std::set<std::pair<int, int>> used;
        if (oracle_dfs(open_track, source, goal_cell, goal_heading, used, len)) return len;
    }
    return -1;
}

} // namespace

TEST_CASE("close_circuit fills a straight corridor") {
    // Start faces West; the genome loops around clockwise and leaves a
    // three-cell gap along the start row.
    GridConfig cfg;
    cfg.initial_heading = Heading::West;
    Track open = decode(make_genome({R, R, S, S, S, S, R, R}), cfg);
    REQUIRE(open.feasible);
    CHECK(open.pieces.back().exit_cell() == Vec2i{19, 16});
    CHECK(open.pieces.back().exit_heading == Heading::West);

    Track closed = close_circuit(open);
    REQUIRE(closed.feasible);
    CHECK(closed.closed);
    CHECK(closed.closure_length() == 3);
    for (int i = closed.genome_piece_count; i < static_cast<int>(closed.pieces.size()); ++i)
        CHECK(closed.pieces[static_cast<std::size_t>(i)].kind == S);
    CHECK(path_length(closed) == 3);
}

TEST_CASE("close_circuit: already-aligned exit needs zero tiles") {
    // Ring that returns exactly to the start entry: genome [L, L, S, L, L].
    Track open = decode(make_genome({L, L, S, L, L}), GridConfig{});
    REQUIRE(open.feasible);
    Track closed = close_circuit(open);
    REQUIRE(closed.feasible);
    CHECK(closed.closure_length() == 0);
    CHECK(path_length(closed) == 0);
}

TEST_CASE("close_circuit: blocked start yields NoPath") {
    // Three left curves end on the start cell with the wrong heading; the
    // goal cell is occupied, so nothing can be placed and no path exists.
    Track open = decode(make_genome({L, L, L}), GridConfig{});
    REQUIRE(open.feasible);
    Track closed = close_circuit(open);
    CHECK_FALSE(closed.feasible);
    CHECK(closed.reason == InfeasibleReason::NoPath);
}

TEST_CASE("close_circuit is a no-op on closed tracks") {
    Track closed = close_circuit(decode(Genome(std::vector<TileKind>(4, S)), GridConfig{}));
    REQUIRE(closed.feasible);
    Track again = close_circuit(closed);
    CHECK(track_to_json(again) == track_to_json(closed));
}

TEST_CASE("closure uses only simple tiles and placeable cells") {
    Rng rng(3);
    const auto& alphabet = genome_alphabet();
    int closed_count = 0;
    for (int trial = 0; trial < 200 && closed_count < 50; ++trial) {
        std::vector<TileKind> genes;
        for (int i = 0; i < 10; ++i)
            genes.push_back(alphabet[static_cast<std::size_t>(rng.uniform_int(5))]);
        Track t = close_circuit(decode(Genome(genes), GridConfig{}));
        if (!t.feasible) continue;
        ++closed_count;
        for (int i = t.genome_piece_count; i < static_cast<int>(t.pieces.size()); ++i) {
            const TileKind k = t.pieces[static_cast<std::size_t>(i)].kind;
            CHECK((k == S || k == L || k == R));
        }
        CHECK(path_length(t) == t.closure_length());
        // The circuit actually closes: the last exit is the start entry.
        const PlacedPiece& last = t.pieces.empty() ? t.start : t.pieces.back();
        CHECK(last.exit_cell() == t.start.entry_cell());
        CHECK(last.exit_heading == t.start.entry_heading);
    }
    CHECK(closed_count >= 30);
}

TEST_CASE("closure optimality matches exhaustive search on a small grid") {
    GridConfig cfg;
    cfg.width = 12;
    cfg.height = 12;
    cfg.origin = {6, 6};

    // All genomes of length <= 2 over the simple tiles here; the full
    // length-3 sweep runs in the acceptance suite.
    std::vector<std::vector<TileKind>> genomes = {{}};
    for (TileKind a : {S, L, R}) {
        genomes.push_back({a});
        for (TileKind b : {S, L, R}) genomes.push_back({a, b});
    }
    for (const auto& genes : genomes) {
        Track open = decode(Genome(genes), cfg);
        REQUIRE(open.feasible);
        Track closed = close_circuit(open);
        const int expected = oracle_min_closure(open, 14);
        if (expected < 0) {
            CHECK_FALSE(closed.feasible);
        } else {
            REQUIRE(closed.feasible);
            CHECK(closed.closure_length() == expected);
        }
    }
}

TEST_CASE("checkpoints of a closed track are pairwise distinct and ordered") {
    Track t = close_circuit(
        decode(make_genome({S, TileKind::Loop, L, S, TileKind::Ramp, R}), GridConfig{}));
    REQUIRE(t.feasible);
    const auto cps = t.checkpoint_cells();
    std::set<std::pair<int, int>> seen;
    for (Vec2i c : cps) CHECK(seen.insert({c.x, c.y}).second);
    CHECK(cps.size() == t.pieces.size() + 1);
    CHECK(cps.back() == t.start.checkpoint);
}
