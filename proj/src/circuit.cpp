#include "trackgen/circuit.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <vector>

namespace trackgen {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

struct SearchState {
    Vec2i cell;
    Heading heading;

    friend bool operator==(const SearchState&, const SearchState&) = default;
};

// Candidate closure moves from a state, in the fixed tie-break order:
// straight first, then the two turn options sorted by resulting heading
// (North < East < South < West).
struct Move {
    TileKind kind;
    Heading exit;
};

std::array<Move, 3> moves_from(Heading h) {
    Move left{TileKind::CurveLeft, rotate_left(h)};
    Move right{TileKind::CurveRight, rotate_right(h)};
    if (static_cast<int>(left.exit) > static_cast<int>(right.exit)) std::swap(left, right);
    return {Move{TileKind::Straight, h}, left, right};
}

class ClosureSearch {
public:
    ClosureSearch(const TrackGrid& grid, SearchState source, SearchState goal)
        : grid_(grid), source_(source), goal_(goal),
          dist_to_goal_(static_cast<std::size_t>(grid.width()) * grid.height() * 4, kInf),
          used_(static_cast<std::size_t>(grid.width()) * grid.height(), 0) {}

    // Returns the tile kinds of an optimal closure, or nullopt when no valid
    // closing sequence exists.
    std::optional<std::vector<TileKind>> run() {
        if (source_ == goal_) return std::vector<TileKind>{};
        if (!grid_.in_bounds(source_.cell)) return std::nullopt;

        compute_heuristic();
        int bound = dist_to_goal_[state_index(source_)];
        if (bound >= kInf) return std::nullopt;

        // Iterative deepening keeps the path cell-disjoint while the
        // backward distances keep the search near-beeline. A simple path
        // can never exceed the number of free cells.
        const int cap = grid_.width() * grid_.height();
        while (bound <= cap) {
            next_bound_ = kInf;
            path_.clear();
            nodes_ = 0;
            if (dfs(source_, 0, bound)) return path_;
            if (next_bound_ >= kInf || nodes_ >= kNodeBudget) return std::nullopt;
            bound = next_bound_;
        }
        return std::nullopt;
    }

private:
    static constexpr long kNodeBudget = 4'000'000;

    std::size_t state_index(SearchState s) const {
        return (static_cast<std::size_t>(s.cell.y) * grid_.width() + s.cell.x) * 4 +
               static_cast<std::size_t>(s.heading);
    }

    std::size_t cell_index(Vec2i c) const {
        return static_cast<std::size_t>(c.y) * grid_.width() + c.x;
    }

    bool can_place(Vec2i cell, TileKind kind, Heading tile_heading) const {
        if (!grid_.in_bounds(cell)) return false;
        if (grid_.ground(cell).occupied()) return false;
        const Occupant& above = grid_.elevated(cell);
        if (above.occupied()) {
            return grid_.allow_underpass() && kind == TileKind::Straight &&
                   perpendicular(tile_heading, above.heading);
        }
        return true;
    }

    // Unit-cost Dijkstra from the goal over reversed moves; exact remaining
    // distance ignoring the path's own footprint (admissible).
    void compute_heuristic() {
        std::deque<SearchState> queue;
        dist_to_goal_[state_index(goal_)] = 0;
        queue.push_back(goal_);
        while (!queue.empty()) {
            const SearchState t = queue.front();
            queue.pop_front();
            const int dt = dist_to_goal_[state_index(t)];
            // A predecessor placed a tile at c = t.cell - delta(t.heading)
            // entered with heading h such that exit(h, kind) == t.heading.
            const Vec2i c = t.cell - heading_delta(t.heading);
            if (!grid_.in_bounds(c)) continue;
            const Heading exits = t.heading;
            const struct {
                TileKind kind;
                Heading entry;
            } preds[3] = {
                {TileKind::Straight, exits},
                {TileKind::CurveLeft, rotate_right(exits)},
                {TileKind::CurveRight, rotate_left(exits)},
            };
            for (const auto& p : preds) {
                if (!can_place(c, p.kind, p.entry)) continue;
                const SearchState s{c, p.entry};
                if (dist_to_goal_[state_index(s)] <= dt + 1) continue;
                dist_to_goal_[state_index(s)] = dt + 1;
                queue.push_back(s);
            }
        }
    }

    bool dfs(SearchState state, int g, int bound) {
        if (state == goal_) return true;
        if (!grid_.in_bounds(state.cell)) return false;
        const int remaining = dist_to_goal_[state_index(state)];
        if (remaining >= kInf) return false;
        const int f = g + remaining;
        if (f > bound) {
            next_bound_ = std::min(next_bound_, f);
            return false;
        }
        if (++nodes_ >= kNodeBudget) return false;
        if (used_[cell_index(state.cell)]) return false;

        for (const Move& m : moves_from(state.heading)) {
            // Straight tiles keep the entry heading; that heading drives the
            // underpass perpendicularity check.
            if (!can_place(state.cell, m.kind, state.heading)) continue;
            const SearchState next{state.cell + heading_delta(m.exit), m.exit};
            if (next != goal_ && !grid_.in_bounds(next.cell)) continue;
            used_[cell_index(state.cell)] = 1;
            path_.push_back(m.kind);
            if (dfs(next, g + 1, bound)) return true;
            path_.pop_back();
            used_[cell_index(state.cell)] = 0;
        }
        return false;
    }

    const TrackGrid& grid_;
    SearchState source_;
    SearchState goal_;
    std::vector<int> dist_to_goal_;
    std::vector<std::uint8_t> used_;
    std::vector<TileKind> path_;
    int next_bound_ = kInf;
    long nodes_ = 0;
};

} // namespace

Track close_circuit(const Track& open_track) {
    if (open_track.closed || !open_track.feasible) return open_track;

    Track track = open_track;
    const PlacedPiece& last =
        track.pieces.empty() ? track.start : track.pieces.back();
    const SearchState source{last.exit_cell(), last.exit_heading};
    const SearchState goal{track.start.entry_cell(), track.start.entry_heading};

    ClosureSearch search(track.grid, source, goal);
    auto closure = search.run();
    if (!closure) {
        track.feasible = false;
        track.reason = InfeasibleReason::NoPath;
        return track;
    }

    Vec2i cursor = source.cell;
    Heading heading = source.heading;
    for (TileKind kind : *closure) {
        PlacedPiece piece = make_piece(kind, cursor, heading);
        track.grid.place(piece, static_cast<int>(track.pieces.size()) + 1);
        cursor = piece.exit_cell();
        heading = piece.exit_heading;
        track.pieces.push_back(std::move(piece));
    }
    track.closed = true;
    return track;
}

int path_length(const Track& track) { return track.closure_length(); }

} // namespace trackgen
