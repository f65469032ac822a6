#include "trackgen/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "trackgen/errors.hpp"
#include "trackgen/rng.hpp"
#include "trackgen/util.hpp"

namespace trackgen {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
    while (a > kPi) a -= 2.0 * kPi;
    while (a < -kPi) a += 2.0 * kPi;
    return a;
}

struct CellInfo {
    bool on_track = false;
    TileKind kind = TileKind::Straight;
};

CellInfo cell_info(const Track& track, double x, double y) {
    const Vec2i cell{static_cast<int>(std::floor(x)), static_cast<int>(std::floor(y))};
    if (!track.grid.in_bounds(cell)) return {};
    const Occupant& g = track.grid.ground(cell);
    if (g.occupied()) return {true, g.kind};
    const Occupant& e = track.grid.elevated(cell);
    if (e.occupied()) return {true, e.kind};
    return {};
}

double distance(const CarState& a, const CarState& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

double dist_to(const CarState& car, std::pair<double, double> target) {
    const double dx = target.first - car.x;
    const double dy = target.second - car.y;
    return std::sqrt(dx * dx + dy * dy);
}

} // namespace

const FeatureSchema& default_schema() {
    static const FeatureSchema schema = {
        "speed",        "accel",      "heading_rate", "score",      "lap_fraction",
        "dist_next_cp", "dist_opp_1", "dist_opp_2",   "dist_opp_3", "rank",
        "off_track",    "collisions", "on_straight",  "on_curve",   "on_loop",
        "on_ramp",      "on_start",
    };
    return schema;
}

std::uint64_t schema_hash(const FeatureSchema& schema) {
    std::string joined;
    for (const auto& name : schema) {
        joined += name;
        joined += '\n';
    }
    return fnv1a(joined);
}

double StepState::value(const std::string& feature) const {
    if (feature == "speed") return speed;
    if (feature == "accel") return accel;
    if (feature == "heading_rate") return heading_rate;
    if (feature == "score") return score;
    if (feature == "lap_fraction") return lap_fraction;
    if (feature == "dist_next_cp") return dist_next_cp;
    if (feature == "dist_opp_1") return dist_opp_1;
    if (feature == "dist_opp_2") return dist_opp_2;
    if (feature == "dist_opp_3") return dist_opp_3;
    if (feature == "rank") return rank;
    if (feature == "off_track") return off_track;
    if (feature == "collisions") return collisions;
    if (feature == "on_straight") return on_straight;
    if (feature == "on_curve") return on_curve;
    if (feature == "on_loop") return on_loop;
    if (feature == "on_ramp") return on_ramp;
    if (feature == "on_start") return on_start;
    throw SchemaMismatch("unknown feature: '" + feature + "'");
}

TelemetryWindow extract_features(std::span<const StepState> steps,
                                 const FeatureSchema& schema, int window_index) {
    if (steps.empty()) throw SimulationError("extract_features: empty window");
    TelemetryWindow w;
    w.window_index = window_index;
    w.features.reserve(schema.size());
    for (const auto& name : schema) {
        double acc = 0.0;
        for (const StepState& s : steps) acc += s.value(name);
        w.features.push_back(acc / static_cast<double>(steps.size()));
    }
    return w;
}

StateTrace simulate(const Track& track, const SimConfig& config) {
    if (!track.feasible || !track.closed)
        throw SimulationError("simulate: track is not a closed feasible circuit");

    const std::vector<Vec2i> cp_cells = track.checkpoint_cells();
    if (cp_cells.size() < 2) throw SimulationError("DegenerateTrack: fewer than 2 checkpoints");

    std::vector<std::pair<double, double>> checkpoints;
    checkpoints.reserve(cp_cells.size());
    for (Vec2i c : cp_cells) checkpoints.emplace_back(c.x + 0.5, c.y + 0.5);
    const int n_cp = static_cast<int>(checkpoints.size());
    const int lap_cp_index = n_cp - 1; // StartFinish cell closes the lap

    const double dt = 1.0 / config.timestep_hz;
    const double max_turn = config.max_turn_rate_deg_per_s * kPi / 180.0;
    const double start_x = track.start.cells[0].x + 0.5;
    const double start_y = track.start.cells[0].y + 0.5;
    const double fwd = heading_angle(track.config.initial_heading);

    // Staggered grid start: evaluator on the line, opponents offset with a
    // small seed-dependent jitter.
    Rng rng(config.seed);
    std::array<CarState, 4> cars; // cars[0] is the evaluator
    const double px = std::cos(fwd + kPi / 2.0);
    const double py = std::sin(fwd + kPi / 2.0);
    const double lateral_off[4] = {0.0, 0.4, -0.4, 0.0};
    const double back_off[4] = {0.0, 0.0, 0.0, -0.4};
    const double multipliers[4] = {1.0, 0.95, 1.0, 1.05};
    for (int i = 0; i < 4; ++i) {
        const double lateral = lateral_off[i] + (i == 0 ? 0.0 : rng.uniform(-0.05, 0.05));
        const double back = back_off[i] + (i == 0 ? 0.0 : rng.uniform(-0.05, 0.05));
        cars[i].x = start_x + px * lateral + std::cos(fwd) * back;
        cars[i].y = start_y + py * lateral + std::sin(fwd) * back;
        cars[i].heading_angle = fwd;
        cars[i].speed_multiplier = multipliers[i];
    }

    const int window_steps = config.window_steps();
    const int max_steps = config.max_steps();
    const int min_steps = std::min(max_steps, 2 * window_steps);
    const double total_cp = static_cast<double>(config.max_laps) * n_cp;

    StateTrace trace;
    trace.schema = default_schema();
    std::vector<StepState> window_buf;
    window_buf.reserve(static_cast<std::size_t>(window_steps));
    bool overlapped[4][4] = {};
    int step = 0;
    double prev_eval_heading = cars[0].heading_angle;
    double prev_eval_speed = 0.0;

    while (step < max_steps && (cars[0].lap < config.max_laps || step < min_steps)) {
        const double now = step * dt;

        // Collision slowdowns; each overlap counts once on entry.
        int eval_new_collisions = 0;
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                const bool close = distance(cars[i], cars[j]) < config.collision_radius;
                if (close && !overlapped[i][j]) {
                    cars[i].collision_count += 1;
                    cars[j].collision_count += 1;
                    cars[i].slow_until = now + config.collision_penalty_seconds;
                    cars[j].slow_until = now + config.collision_penalty_seconds;
                    if (i == 0) ++eval_new_collisions;
                }
                overlapped[i][j] = close;
            }
        }

        for (CarState& car : cars) {
            const auto target = checkpoints[static_cast<std::size_t>(car.next_checkpoint_index)];
            const double desired = std::atan2(target.second - car.y, target.first - car.x);
            const double diff = wrap_angle(desired - car.heading_angle);
            const double turn = std::clamp(diff, -max_turn * dt, max_turn * dt);
            car.heading_angle = wrap_angle(car.heading_angle + turn);

            const CellInfo info = cell_info(track, car.x, car.y);
            car.off_track = !info.on_track;
            double cap = config.max_speed * car.speed_multiplier;
            if (car.off_track) cap *= config.off_track_speed_factor;
            if (info.on_track && is_event(info.kind)) cap *= config.loop_speed_factor;
            if (now < car.slow_until) cap *= 0.5;
            // Brake into corners: misaligned heading caps speed so the
            // turning circle stays inside the checkpoint radius.
            const double misalign = std::abs(wrap_angle(desired - car.heading_angle));
            cap = std::min(cap, std::max(1.0, config.max_speed *
                                                  (1.0 - misalign / (kPi / 2.0))));

            car.velocity = std::min(car.velocity + config.acceleration * dt, cap);
            car.x += std::cos(car.heading_angle) * car.velocity * dt;
            car.y += std::sin(car.heading_angle) * car.velocity * dt;

            if (dist_to(car, target) < config.checkpoint_radius) {
                car.score += config.score_increment;
                if (car.next_checkpoint_index == lap_cp_index) car.lap += 1;
                car.next_checkpoint_index = (car.next_checkpoint_index + 1) % n_cp;
            }
        }

        // Telemetry for the evaluator.
        const CarState& ev = cars[0];
        StepState s;
        s.speed = ev.velocity;
        s.accel = (ev.velocity - prev_eval_speed) / dt;
        s.heading_rate = std::abs(wrap_angle(ev.heading_angle - prev_eval_heading)) / dt;
        prev_eval_speed = ev.velocity;
        prev_eval_heading = ev.heading_angle;
        s.score = ev.score;
        s.lap_fraction = std::min(1.0, ev.score / std::max(1.0, total_cp));
        s.dist_next_cp =
            dist_to(ev, checkpoints[static_cast<std::size_t>(ev.next_checkpoint_index)]);
        s.dist_opp_1 = distance(ev, cars[1]);
        s.dist_opp_2 = distance(ev, cars[2]);
        s.dist_opp_3 = distance(ev, cars[3]);
        int rank = 1;
        for (int i = 1; i < 4; ++i) {
            const CarState& op = cars[i];
            if (op.score > ev.score) {
                ++rank;
            } else if (op.score == ev.score) {
                const double d =
                    dist_to(op, checkpoints[static_cast<std::size_t>(op.next_checkpoint_index)]);
                if (d < s.dist_next_cp) ++rank;
            }
        }
        s.rank = rank;
        s.off_track = ev.off_track ? 1.0 : 0.0;
        s.collisions = eval_new_collisions;
        const CellInfo info = cell_info(track, ev.x, ev.y);
        if (info.on_track) {
            switch (info.kind) {
            case TileKind::Straight: s.on_straight = 1; break;
            case TileKind::CurveLeft:
            case TileKind::CurveRight: s.on_curve = 1; break;
            case TileKind::Loop: s.on_loop = 1; break;
            case TileKind::Ramp: s.on_ramp = 1; break;
            case TileKind::StartFinish: s.on_start = 1; break;
            }
        }
        window_buf.push_back(s);
        ++step;

        if (static_cast<int>(window_buf.size()) == window_steps) {
            trace.windows.push_back(extract_features(window_buf, trace.schema,
                                                     static_cast<int>(trace.windows.size())));
            window_buf.clear();
        }
    }

    if (!window_buf.empty()) {
        trace.windows.push_back(extract_features(window_buf, trace.schema,
                                                 static_cast<int>(trace.windows.size())));
        window_buf.clear();
    }

    trace.total_steps = step;
    trace.evaluator_laps = cars[0].lap;
    trace.race_seconds = step * dt;
    return trace;
}

std::string trace_to_csv(const StateTrace& trace) {
    std::string out;
    for (const auto& name : trace.schema) {
        out += name;
        out += ',';
    }
    out += "window_index\n";
    for (const TelemetryWindow& w : trace.windows) {
        for (double v : w.features) {
            out += format_double(v);
            out += ',';
        }
        out += std::to_string(w.window_index);
        out += '\n';
    }
    return out;
}

} // namespace trackgen
