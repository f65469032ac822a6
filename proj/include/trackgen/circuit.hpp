#pragma once

#include "trackgen/track.hpp"

namespace trackgen {

// Closes an open decoded track into a circuit by filling the shortest path
// from the last piece's exit to the StartFinish entry with simple tiles
// (Straight / CurveLeft / CurveRight). Search runs over the directed state
// space (cell, heading) with unit cost per tile; ties break on a fixed
// expansion order (straight before turns, turns by resulting heading in
// North, East, South, West order) so results are reproducible. The fill
// never reuses a cell, so closed tracks keep one ground occupant per cell.
//
// Returns the track with closure pieces appended and closed = true, or with
// feasible = false and reason = NoPath when no closing sequence exists.
// Calling it on an already-closed track is a no-op.
Track close_circuit(const Track& open_track);

// Number of closure tiles placed by close_circuit.
int path_length(const Track& track);

} // namespace trackgen
