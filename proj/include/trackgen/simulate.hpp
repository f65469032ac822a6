#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trackgen/track.hpp"

namespace trackgen {

struct SimConfig {
    int timestep_hz = 30;
    int max_laps = 3;
    double max_seconds = 120.0;
    double window_seconds = 3.0;

    double max_speed = 2.0;              // cell units / s
    double acceleration = 2.0;           // cell units / s^2
    double max_turn_rate_deg_per_s = 240.0;
    double off_track_speed_factor = 0.55;
    double loop_speed_factor = 0.5;      // applies on Loop and Ramp cells
    double collision_penalty_seconds = 0.6;
    double collision_radius = 0.3;       // cars closer than this slow each other
    double checkpoint_radius = 0.55;
    double score_increment = 1.0;
    std::uint64_t seed = 0;

    int window_steps() const { return static_cast<int>(window_seconds * timestep_hz + 0.5); }
    int max_steps() const { return static_cast<int>(max_seconds * timestep_hz + 0.5); }
};

// Names of per-window features, in export order.
using FeatureSchema = std::vector<std::string>;

const FeatureSchema& default_schema();
std::uint64_t schema_hash(const FeatureSchema& schema);

// Instantaneous evaluator-centric values sampled once per timestep.
struct StepState {
    double speed = 0;
    double accel = 0;
    double heading_rate = 0;
    double score = 0;
    double lap_fraction = 0;
    double dist_next_cp = 0;
    double dist_opp_1 = 0;
    double dist_opp_2 = 0;
    double dist_opp_3 = 0;
    double rank = 1;
    double off_track = 0;
    double collisions = 0;
    double on_straight = 0;
    double on_curve = 0;
    double on_loop = 0;
    double on_ramp = 0;
    double on_start = 0;

    double value(const std::string& feature) const;
};

struct TelemetryWindow {
    std::vector<double> features; // per-feature mean over the window, schema order
    int window_index = 0;
};

struct StateTrace {
    FeatureSchema schema;
    std::vector<TelemetryWindow> windows;
    int total_steps = 0;
    int evaluator_laps = 0;
    double race_seconds = 0;
};

struct CarState {
    double x = 0;
    double y = 0;
    double velocity = 0;
    double heading_angle = 0;
    int next_checkpoint_index = 0;
    double score = 0;
    int lap = 0;
    bool off_track = false;
    int collision_count = 0;
    double slow_until = -1; // seconds; collision slowdown active while t < slow_until
    double speed_multiplier = 1.0;
};

// Per-feature mean over one window of step states, in schema order.
// Throws SchemaMismatch for unknown feature names.
TelemetryWindow extract_features(std::span<const StepState> steps,
                                 const FeatureSchema& schema, int window_index);

// Fixed-timestep race: a checkpoint-following evaluator plus three opponents
// on the same controller with staggered starts. Runs until the evaluator
// finishes max_laps or max_seconds elapse, and always long enough to emit at
// least two telemetry windows. Deterministic for a fixed (track, config).
// Throws SimulationError for tracks with fewer than two checkpoints.
StateTrace simulate(const Track& track, const SimConfig& config);

// Columnar CSV: header = schema names + window_index, one row per window.
std::string trace_to_csv(const StateTrace& trace);

} // namespace trackgen
