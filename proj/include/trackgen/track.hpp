#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trackgen/geometry.hpp"
#include "trackgen/tiles.hpp"

namespace trackgen {

struct GridConfig {
    int width = 32;
    int height = 32;
    Vec2i origin{16, 16};
    Heading initial_heading = Heading::East;
    // When true a Straight may pass under a Ramp's elevated middle cell if
    // their headings are perpendicular. When false any overlap collides.
    bool allow_underpass = true;
};

enum class InfeasibleReason : std::uint8_t { None, Collision, OutOfBounds, NoPath };

std::string infeasible_reason_name(InfeasibleReason r);

// One placed tile. `cells` runs from entry to exit along the entry heading;
// the checkpoint sits on the final cell.
struct PlacedPiece {
    TileKind kind = TileKind::Straight;
    Heading entry_heading = Heading::East;
    Heading exit_heading = Heading::East;
    std::vector<Vec2i> cells;
    Vec2i checkpoint;
    int elevated_index = -1; // index into cells occupying the elevated layer (Ramp middle)

    Vec2i entry_cell() const { return cells.front(); }
    Vec2i last_cell() const { return cells.back(); }
    // Cell the next piece would occupy.
    Vec2i exit_cell() const { return last_cell() + heading_delta(exit_heading); }
};

struct Occupant {
    int piece = -1; // -1 empty, 0 StartFinish, i+1 = Track::pieces[i]
    TileKind kind = TileKind::Straight;
    Heading heading = Heading::East;

    bool occupied() const { return piece >= 0; }
};

// Two-layer occupancy grid (ground + elevated).
class TrackGrid {
public:
    TrackGrid() = default;
    TrackGrid(int width, int height, bool allow_underpass)
        : width_(width), height_(height), allow_underpass_(allow_underpass),
          ground_(static_cast<std::size_t>(width) * height),
          elevated_(static_cast<std::size_t>(width) * height) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool allow_underpass() const { return allow_underpass_; }

    bool in_bounds(Vec2i c) const {
        return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
    }

    const Occupant& ground(Vec2i c) const { return ground_[index(c)]; }
    const Occupant& elevated(Vec2i c) const { return elevated_[index(c)]; }

    void place(const PlacedPiece& piece, int piece_id);

    int occupied_ground_cells() const;

private:
    std::size_t index(Vec2i c) const {
        return static_cast<std::size_t>(c.y) * width_ + c.x;
    }

    int width_ = 0;
    int height_ = 0;
    bool allow_underpass_ = true;
    std::vector<Occupant> ground_;
    std::vector<Occupant> elevated_;
};

// Genome-derived piece counts plus the closure length.
struct TileCounts {
    int straights = 0;
    int turns = 0;
    int loops = 0;
    int ramps = 0;
    int closure_length = 0;

    friend bool operator==(const TileCounts&, const TileCounts&) = default;
};

struct Track {
    GridConfig config;
    Genome genome;
    PlacedPiece start;
    std::vector<PlacedPiece> pieces; // genome pieces followed by closure pieces
    int genome_piece_count = 0;
    TrackGrid grid;
    bool feasible = false; // decode (and closure, once closed) succeeded
    bool closed = false;   // circuit closure has run successfully
    InfeasibleReason reason = InfeasibleReason::None;

    int closure_length() const {
        return static_cast<int>(pieces.size()) - genome_piece_count;
    }

    // Checkpoint cells in traversal order: each piece's endpoint, then the
    // StartFinish cell (the lap line) last.
    std::vector<Vec2i> checkpoint_cells() const;
};

// Computes a piece's footprint from its entry cell and heading. Pure; does
// not consult any grid.
PlacedPiece make_piece(TileKind kind, Vec2i entry_cell, Heading entry_heading);

// True iff placing `piece` on `grid` would violate the occupancy rules.
// The only permitted overlap is a Straight on the ground layer under an
// existing Ramp middle cell with perpendicular headings (underpass mode).
bool collision_check(const TrackGrid& grid, const PlacedPiece& piece);

// Genotype -> open phenotype. Places StartFinish at the origin, then the
// genome pieces in order. On collision or out-of-bounds the returned track
// carries feasible = false and the reason.
Track decode(const Genome& genome, const GridConfig& config);

TileCounts tile_counts(const Track& track);

// JSON serialization (stable field names: grid_size, origin, initial_heading,
// underpass, genome, closure, feasible).
std::string track_to_json(const Track& track);
Track track_from_json(const std::string& json_text);

} // namespace trackgen
