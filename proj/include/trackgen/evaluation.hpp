#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "trackgen/track.hpp"

namespace trackgen {

enum class Scenario { Maximise, Minimise, Fluctuating };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

// Target arousal-change value at normalized time t in [0, 1].
double target_value(Scenario s, double t);

// Target trace sampled at n evenly spaced points of normalized time.
std::vector<double> make_target(Scenario s, int n);

// Area between two traces over normalized time [0, 1]: both are linearly
// interpolated onto the union of their sample points and the absolute
// difference is integrated with the trapezoid rule. For traces valued in
// [0, 1] the result lies in [0, 1]. Throws EvaluationError on empty input.
double area_between(std::span<const double> a, std::span<const double> b);

constexpr double kInfeasibleReward = -1000.0;

// R = -D(A_L, A_T) for feasible tracks, -1000 otherwise.
double reward(std::span<const double> generated, std::span<const double> target,
              bool feasible);

// Percentage of windows where generated and target agree on the side of 0.5.
// The target is resampled to the generated trace's length (nearest sample);
// a value of exactly 0.5 counts as disagreement.
double accuracy_pct(std::span<const double> generated, std::span<const double> target);

struct MeanCi {
    double mean = 0;
    double half_width = 0; // 1.96 * stddev / sqrt(n)
};

// 95% normal-approximation confidence interval; needs >= 2 samples.
MeanCi confidence_interval_95(std::span<const double> samples);

struct ExpressiveRangeRow {
    Scenario scenario = Scenario::Maximise;
    int samples = 0;
    MeanCi simple_tiles; // straights + turns from the genome plus closure tiles
    MeanCi event_tiles;  // loops + ramps
    MeanCi closure;
};

// Per-scenario tile-usage statistics; needs >= 2 tracks per scenario.
std::vector<ExpressiveRangeRow>
expressive_range(const std::map<Scenario, std::vector<TileCounts>>& by_scenario);

std::string expressive_range_csv(const std::vector<ExpressiveRangeRow>& rows);

} // namespace trackgen
