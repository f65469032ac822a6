#pragma once

#include <span>
#include <string>

#include "trackgen/track.hpp"

namespace trackgen {

// Top-down tile drawing of a closed feasible track. Each piece is tinted by
// the mean arousal change of the trace windows that map onto it, treating
// the trace as one pass around the circuit weighted by piece cell counts:
// below 0.33 blue, above 0.66 red, neutral otherwise. Includes a start
// marker and legend. Throws EvaluationError for infeasible tracks.
std::string render_track_svg(const Track& track, std::span<const double> arousal);

} // namespace trackgen
