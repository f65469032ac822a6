#include "trackgen/track.hpp"

#include <nlohmann/json.hpp>

#include "trackgen/errors.hpp"

namespace trackgen {

using ordered_json = nlohmann::ordered_json;

std::string infeasible_reason_name(InfeasibleReason r) {
    switch (r) {
    case InfeasibleReason::None: return "None";
    case InfeasibleReason::Collision: return "Collision";
    case InfeasibleReason::OutOfBounds: return "OutOfBounds";
    case InfeasibleReason::NoPath: return "NoPath";
    }
    return "?";
}

void TrackGrid::place(const PlacedPiece& piece, int piece_id) {
    for (std::size_t i = 0; i < piece.cells.size(); ++i) {
        Occupant occ{piece_id, piece.kind, piece.entry_heading};
        if (static_cast<int>(i) == piece.elevated_index)
            elevated_[index(piece.cells[i])] = occ;
        else
            ground_[index(piece.cells[i])] = occ;
    }
}

int TrackGrid::occupied_ground_cells() const {
    int n = 0;
    for (const Occupant& o : ground_)
        if (o.occupied()) ++n;
    return n;
}

std::vector<Vec2i> Track::checkpoint_cells() const {
    std::vector<Vec2i> out;
    out.reserve(pieces.size() + 1);
    for (const PlacedPiece& p : pieces) out.push_back(p.checkpoint);
    out.push_back(start.checkpoint);
    return out;
}

PlacedPiece make_piece(TileKind kind, Vec2i entry_cell, Heading entry_heading) {
    PlacedPiece p;
    p.kind = kind;
    p.entry_heading = entry_heading;
    p.exit_heading = exit_heading_of(kind, entry_heading);
    const Vec2i d = heading_delta(entry_heading);
    p.cells.push_back(entry_cell);
    for (int i = 1; i < footprint(kind); ++i)
        p.cells.push_back(p.cells.back() + d);
    if (kind == TileKind::Ramp) p.elevated_index = 1;
    p.checkpoint = p.cells.back();
    return p;
}

bool collision_check(const TrackGrid& grid, const PlacedPiece& piece) {
    for (std::size_t i = 0; i < piece.cells.size(); ++i) {
        const Vec2i c = piece.cells[i];
        const bool piece_elevated = static_cast<int>(i) == piece.elevated_index;
        if (piece_elevated) {
            // Ramp middle: needs the whole cell free.
            if (grid.elevated(c).occupied() || grid.ground(c).occupied()) return true;
        } else {
            if (grid.ground(c).occupied()) return true;
            const Occupant& above = grid.elevated(c);
            if (above.occupied()) {
                const bool underpass_ok = grid.allow_underpass() &&
                                          piece.kind == TileKind::Straight &&
                                          perpendicular(piece.entry_heading, above.heading);
                if (!underpass_ok) return true;
            }
        }
    }
    return false;
}

Track decode(const Genome& genome, const GridConfig& config) {
    Track track;
    track.config = config;
    track.genome = genome;
    track.grid = TrackGrid(config.width, config.height, config.allow_underpass);

    track.start = make_piece(TileKind::StartFinish, config.origin, config.initial_heading);
    if (!track.grid.in_bounds(config.origin)) {
        track.feasible = false;
        track.reason = InfeasibleReason::OutOfBounds;
        return track;
    }
    track.grid.place(track.start, 0);

    Vec2i cursor = track.start.exit_cell();
    Heading heading = track.start.exit_heading;
    for (TileKind kind : genome) {
        PlacedPiece piece = make_piece(kind, cursor, heading);
        for (Vec2i c : piece.cells) {
            if (!track.grid.in_bounds(c)) {
                track.feasible = false;
                track.reason = InfeasibleReason::OutOfBounds;
                return track;
            }
        }
        if (collision_check(track.grid, piece)) {
            track.feasible = false;
            track.reason = InfeasibleReason::Collision;
            return track;
        }
        track.grid.place(piece, static_cast<int>(track.pieces.size()) + 1);
        cursor = piece.exit_cell();
        heading = piece.exit_heading;
        track.pieces.push_back(std::move(piece));
    }
    track.genome_piece_count = static_cast<int>(track.pieces.size());
    track.feasible = true;
    return track;
}

TileCounts tile_counts(const Track& track) {
    TileCounts counts;
    for (int i = 0; i < track.genome_piece_count; ++i) {
        switch (track.pieces[static_cast<std::size_t>(i)].kind) {
        case TileKind::Straight: ++counts.straights; break;
        case TileKind::CurveLeft:
        case TileKind::CurveRight: ++counts.turns; break;
        case TileKind::Loop: ++counts.loops; break;
        case TileKind::Ramp: ++counts.ramps; break;
        default: break;
        }
    }
    counts.closure_length = track.closure_length();
    return counts;
}

std::string track_to_json(const Track& track) {
    ordered_json j;
    j["grid_size"] = {track.config.width, track.config.height};
    j["origin"] = {track.config.origin.x, track.config.origin.y};
    j["initial_heading"] = heading_name(track.config.initial_heading);
    j["underpass"] = track.config.allow_underpass;
    j["genome"] = ordered_json::array();
    for (TileKind k : track.genome) j["genome"].push_back(tile_name(k));
    j["closure"] = ordered_json::array();
    for (std::size_t i = static_cast<std::size_t>(track.genome_piece_count);
         i < track.pieces.size(); ++i)
        j["closure"].push_back(tile_name(track.pieces[i].kind));
    j["feasible"] = track.feasible && track.closed;
    return j.dump(2) + "\n";
}

Track track_from_json(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("track JSON parse error: ") + e.what());
    }

    GridConfig config;
    config.width = j.at("grid_size").at(0).get<int>();
    config.height = j.at("grid_size").at(1).get<int>();
    config.origin = {j.at("origin").at(0).get<int>(), j.at("origin").at(1).get<int>()};
    config.initial_heading = heading_from_name(j.at("initial_heading").get<std::string>());
    if (j.contains("underpass")) config.allow_underpass = j.at("underpass").get<bool>();

    std::vector<TileKind> genes;
    for (const auto& g : j.at("genome")) genes.push_back(tile_from_name(g.get<std::string>()));

    Track track = decode(Genome(std::move(genes)), config);
    if (!track.feasible) return track;

    // Replay the recorded closure on top of the decoded genome.
    Vec2i cursor = track.pieces.empty() ? track.start.exit_cell()
                                        : track.pieces.back().exit_cell();
    Heading heading = track.pieces.empty() ? track.start.exit_heading
                                           : track.pieces.back().exit_heading;
    for (const auto& c : j.at("closure")) {
        const TileKind kind = tile_from_name(c.get<std::string>());
        if (!is_simple(kind) || kind == TileKind::StartFinish)
            throw ConfigError("closure may only contain Straight/CurveLeft/CurveRight");
        PlacedPiece piece = make_piece(kind, cursor, heading);
        for (Vec2i cell : piece.cells)
            if (!track.grid.in_bounds(cell))
                throw ConfigError("closure piece out of bounds in track JSON");
        if (collision_check(track.grid, piece))
            throw ConfigError("closure piece collides in track JSON");
        track.grid.place(piece, static_cast<int>(track.pieces.size()) + 1);
        cursor = piece.exit_cell();
        heading = piece.exit_heading;
        track.pieces.push_back(std::move(piece));
    }

    const bool recorded_feasible = j.at("feasible").get<bool>();
    if (recorded_feasible) {
        const bool circuit_closed = cursor == track.start.entry_cell() &&
                                    heading == track.start.entry_heading;
        if (!circuit_closed)
            throw ConfigError("track JSON marked feasible but closure does not reach the start");
        track.closed = true;
    }
    return track;
}

} // namespace trackgen
