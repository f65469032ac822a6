#include "trackgen/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "trackgen/errors.hpp"
#include "trackgen/util.hpp"

namespace trackgen {

std::string scenario_name(Scenario s) {
    switch (s) {
    case Scenario::Maximise: return "Maximise";
    case Scenario::Minimise: return "Minimise";
    case Scenario::Fluctuating: return "Fluctuating";
    }
    return "?";
}

Scenario scenario_from_name(const std::string& name) {
    std::string n;
    for (char c : name) n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (n == "maximise" || n == "maximize" || n == "max") return Scenario::Maximise;
    if (n == "minimise" || n == "minimize" || n == "min") return Scenario::Minimise;
    if (n == "fluctuating" || n == "fluct") return Scenario::Fluctuating;
    throw ConfigError("unknown scenario: '" + name + "'");
}

double target_value(Scenario s, double t) {
    switch (s) {
    case Scenario::Maximise: return 1.0;
    case Scenario::Minimise: return 0.0;
    case Scenario::Fluctuating:
        if (t < 1.0 / 3.0) return 1.0;
        if (t < 2.0 / 3.0) return 0.0;
        return 1.0;
    }
    return 0.0;
}

std::vector<double> make_target(Scenario s, int n) {
    if (n <= 0) throw EvaluationError("make_target: n must be positive");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
        out[static_cast<std::size_t>(i)] = target_value(s, t);
    }
    return out;
}

namespace {

// Sample times over normalized [0, 1]; a single sample is treated as a
// constant trace.
double sample_time(std::size_t i, std::size_t n) {
    return n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
}

double interp_at(std::span<const double> trace, double t) {
    const std::size_t n = trace.size();
    if (n == 1) return trace[0];
    const double pos = t * static_cast<double>(n - 1);
    const double fl = std::floor(pos);
    std::size_t i = static_cast<std::size_t>(fl);
    if (i >= n - 1) return trace[n - 1];
    const double frac = pos - fl;
    return trace[i] + (trace[i + 1] - trace[i]) * frac;
}

} // namespace

double area_between(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw EvaluationError("area_between: empty trace");

    std::vector<double> times;
    times.reserve(a.size() + b.size() + 2);
    times.push_back(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) times.push_back(sample_time(i, a.size()));
    for (std::size_t i = 0; i < b.size(); ++i) times.push_back(sample_time(i, b.size()));
    times.push_back(1.0);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    // The difference is linear between union points; integrating |diff|
    // splits any segment where it crosses zero so refining the sampling of
    // the same shape cannot change the result.
    double area = 0.0;
    double prev_t = times.front();
    double prev_d = interp_at(a, prev_t) - interp_at(b, prev_t);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double t = times[i];
        const double d = interp_at(a, t) - interp_at(b, t);
        const double dt = t - prev_t;
        if (prev_d * d < 0.0) {
            const double s = prev_d / (prev_d - d); // crossing fraction
            area += 0.5 * std::abs(prev_d) * s * dt + 0.5 * std::abs(d) * (1.0 - s) * dt;
        } else {
            area += 0.5 * (std::abs(prev_d) + std::abs(d)) * dt;
        }
        prev_t = t;
        prev_d = d;
    }
    return area;
}

double reward(std::span<const double> generated, std::span<const double> target,
              bool feasible) {
    if (!feasible) return kInfeasibleReward;
    return -area_between(generated, target);
}

double accuracy_pct(std::span<const double> generated, std::span<const double> target) {
    if (generated.empty() || target.empty()) throw EvaluationError("accuracy: empty trace");
    const std::size_t n = generated.size();
    const std::size_t m = target.size();
    int agree = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1);
        const std::size_t j =
            m == 1 ? 0
                   : static_cast<std::size_t>(std::floor(t * static_cast<double>(m - 1) + 0.5));
        const int sg = generated[i] > 0.5 ? 1 : (generated[i] < 0.5 ? -1 : 0);
        const int st = target[j] > 0.5 ? 1 : (target[j] < 0.5 ? -1 : 0);
        // an output of exactly 0.5 agrees with nothing
        if (sg != 0 && sg == st) ++agree;
    }
    return 100.0 * static_cast<double>(agree) / static_cast<double>(n);
}

MeanCi confidence_interval_95(std::span<const double> samples) {
    if (samples.size() < 2)
        throw EvaluationError("confidence_interval_95: needs at least 2 samples");
    MeanCi out;
    out.mean = mean_of(samples);
    out.half_width =
        1.96 * sample_stddev(samples) / std::sqrt(static_cast<double>(samples.size()));
    return out;
}

std::vector<ExpressiveRangeRow>
expressive_range(const std::map<Scenario, std::vector<TileCounts>>& by_scenario) {
    std::vector<ExpressiveRangeRow> rows;
    for (const auto& [scenario, counts] : by_scenario) {
        if (counts.size() < 2)
            throw EvaluationError("expressive_range: need >= 2 tracks per scenario");
        std::vector<double> simple, events, closure;
        simple.reserve(counts.size());
        for (const TileCounts& c : counts) {
            simple.push_back(c.straights + c.turns + c.closure_length);
            events.push_back(c.loops + c.ramps);
            closure.push_back(c.closure_length);
        }
        ExpressiveRangeRow row;
        row.scenario = scenario;
        row.samples = static_cast<int>(counts.size());
        row.simple_tiles = confidence_interval_95(simple);
        row.event_tiles = confidence_interval_95(events);
        row.closure = confidence_interval_95(closure);
        rows.push_back(row);
    }
    return rows;
}

std::string expressive_range_csv(const std::vector<ExpressiveRangeRow>& rows) {
    std::string out = "scenario,samples,simple_mean,simple_ci95,event_mean,event_ci95,"
                      "closure_mean,closure_ci95\n";
    for (const ExpressiveRangeRow& r : rows) {
        out += scenario_name(r.scenario);
        out += ',' + std::to_string(r.samples);
        out += ',' + format_double(r.simple_tiles.mean);
        out += ',' + format_double(r.simple_tiles.half_width);
        out += ',' + format_double(r.event_tiles.mean);
        out += ',' + format_double(r.event_tiles.half_width);
        out += ',' + format_double(r.closure.mean);
        out += ',' + format_double(r.closure.half_width);
        out += '\n';
    }
    return out;
}

} // namespace trackgen
