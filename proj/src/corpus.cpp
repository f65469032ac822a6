#include "trackgen/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "trackgen/errors.hpp"
#include "trackgen/evaluation.hpp"
#include "trackgen/rng.hpp"
#include "trackgen/util.hpp"

namespace trackgen {

namespace fs = std::filesystem;

std::vector<PreferencePair> build_pairs(const AnnotatorSession& session, double threshold,
                                        int session_index) {
    if (session.window_count() < 2)
        throw CorpusError("EmptySession: annotator '" + session.annotator_id +
                          "' has fewer than 2 windows");
    std::vector<PreferencePair> pairs;
    pairs.reserve(session.window_count() - 1);
    for (std::size_t i = 1; i < session.window_count(); ++i) {
        PreferencePair p;
        p.prev = session.features[i - 1];
        p.cur = session.features[i];
        p.session_index = session_index;
        // Strictly-greater threshold rule; the epsilon absorbs binary
        // representation error so that a change of exactly 0.15 stays Stable.
        constexpr double boundary_eps = 1e-12;
        const double delta = session.arousal[i] - session.arousal[i - 1];
        if (delta > threshold + boundary_eps)
            p.label = PairLabel::Increase;
        else if (delta < -threshold - boundary_eps)
            p.label = PairLabel::Decrease;
        else
            p.label = PairLabel::Stable;
        pairs.push_back(std::move(p));
    }
    return pairs;
}

std::vector<PreferencePair> build_pairs(const Corpus& corpus, double threshold) {
    std::vector<PreferencePair> all;
    for (std::size_t i = 0; i < corpus.sessions.size(); ++i) {
        auto pairs = build_pairs(corpus.sessions[i], threshold, static_cast<int>(i));
        all.insert(all.end(), std::make_move_iterator(pairs.begin()),
                   std::make_move_iterator(pairs.end()));
    }
    return all;
}

std::vector<ChangePair> downsample_changes(const std::vector<PreferencePair>& pairs) {
    std::vector<ChangePair> out;
    for (const PreferencePair& p : pairs) {
        if (p.label == PairLabel::Stable) continue;
        ChangePair c;
        c.prev = p.prev;
        c.cur = p.cur;
        c.label = p.label == PairLabel::Increase ? 1.0 : 0.0;
        c.session_index = p.session_index;
        out.push_back(std::move(c));
    }
    if (out.empty())
        throw CorpusError("EmptyAfterDownsample: corpus has no arousal-change pairs");
    return out;
}

NormalizationBounds
NormalizationBounds::fit(const std::vector<const AnnotatorSession*>& sessions,
                         std::size_t feature_count) {
    NormalizationBounds b;
    b.min.assign(feature_count, std::numeric_limits<double>::infinity());
    b.max.assign(feature_count, -std::numeric_limits<double>::infinity());
    for (const AnnotatorSession* s : sessions) {
        for (const auto& window : s->features) {
            if (window.size() != feature_count)
                throw CorpusError("feature vector length mismatch in session '" +
                                  s->annotator_id + "'");
            for (std::size_t f = 0; f < feature_count; ++f) {
                b.min[f] = std::min(b.min[f], window[f]);
                b.max[f] = std::max(b.max[f], window[f]);
            }
        }
    }
    return b;
}

std::vector<double> NormalizationBounds::apply(std::span<const double> features) const {
    if (features.size() != min.size())
        throw CorpusError("normalize: feature vector length mismatch");
    std::vector<double> out(features.size());
    for (std::size_t f = 0; f < features.size(); ++f) {
        const double range = max[f] - min[f];
        if (range <= 0.0) {
            out[f] = 0.5; // constant feature
        } else {
            out[f] = std::clamp((features[f] - min[f]) / range, 0.0, 1.0);
        }
    }
    return out;
}

NormalizationBounds normalize(Corpus& corpus) {
    std::vector<const AnnotatorSession*> refs;
    refs.reserve(corpus.sessions.size());
    for (const auto& s : corpus.sessions) refs.push_back(&s);
    NormalizationBounds bounds = NormalizationBounds::fit(refs, corpus.schema.size());
    for (auto& session : corpus.sessions)
        for (auto& window : session.features) window = bounds.apply(window);
    return bounds;
}

namespace {

std::vector<double> minmax_trace(std::span<const double> trace) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : trace) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<double> out(trace.size(), 0.5);
    if (hi > lo)
        for (std::size_t i = 0; i < trace.size(); ++i) out[i] = (trace[i] - lo) / (hi - lo);
    return out;
}

} // namespace

std::vector<int> cluster_annotators(const Corpus& corpus, int k) {
    const int n = static_cast<int>(corpus.sessions.size());
    if (n < k) throw CorpusError("TooFewSessions: need at least k sessions to cluster");
    if (k < 1) throw CorpusError("cluster_annotators: k must be >= 1");

    // Arousal is a relative (annotation-style) signal: min-max per annotator.
    // Score is comparable across annotators: min-max over the whole corpus so
    // rate differences survive.
    double score_lo = std::numeric_limits<double>::infinity();
    double score_hi = -std::numeric_limits<double>::infinity();
    for (const AnnotatorSession& s : corpus.sessions) {
        for (double v : s.score) {
            score_lo = std::min(score_lo, v);
            score_hi = std::max(score_hi, v);
        }
    }
    std::vector<std::vector<double>> arousal(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> score(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        arousal[i] = minmax_trace(corpus.sessions[i].arousal);
        score[i].assign(corpus.sessions[i].score.size(), 0.5);
        if (score_hi > score_lo)
            for (std::size_t w = 0; w < score[i].size(); ++w)
                score[i][w] = (corpus.sessions[i].score[w] - score_lo) / (score_hi - score_lo);
    }

    std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = 0.5 * area_between(arousal[i], arousal[j]) +
                             0.5 * area_between(score[i], score[j]);
            dist[i][j] = dist[j][i] = d;
        }
    }

    // Average-linkage agglomeration via Lance-Williams updates; ties merge
    // the lexicographically smallest active pair for determinism.
    struct Group {
        std::vector<int> members;
        bool active = true;
    };
    std::vector<Group> groups(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) groups[i].members = {i};
    int active = n;
    while (active > k) {
        int best_a = -1, best_b = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int a = 0; a < n; ++a) {
            if (!groups[a].active) continue;
            for (int b = a + 1; b < n; ++b) {
                if (!groups[b].active) continue;
                if (dist[a][b] < best_d) {
                    best_d = dist[a][b];
                    best_a = a;
                    best_b = b;
                }
            }
        }
        const double na = static_cast<double>(groups[best_a].members.size());
        const double nb = static_cast<double>(groups[best_b].members.size());
        for (int c = 0; c < n; ++c) {
            if (!groups[c].active || c == best_a || c == best_b) continue;
            dist[best_a][c] = dist[c][best_a] =
                (na * dist[best_a][c] + nb * dist[best_b][c]) / (na + nb);
        }
        auto& mb = groups[best_b].members;
        groups[best_a].members.insert(groups[best_a].members.end(), mb.begin(), mb.end());
        groups[best_b].active = false;
        --active;
    }

    // Cluster ids ordered by smallest member index.
    std::vector<int> out(static_cast<std::size_t>(n), -1);
    int next_id = 0;
    for (int a = 0; a < n; ++a) {
        if (!groups[a].active) continue;
        std::vector<int> members = groups[a].members;
        std::sort(members.begin(), members.end());
        for (int m : members) out[static_cast<std::size_t>(m)] = next_id;
        ++next_id;
    }
    return out;
}

SynthSpec SynthSpec::defaults() {
    SynthSpec spec;
    spec.archetypes = {
        {"excited", ArousalShape::Rising, 1.8},
        {"unexcited", ArousalShape::RiseThenFall, 1.7},
        {"beginner", ArousalShape::FlatLow, 0.9},
    };
    return spec;
}

namespace {

// One synthetic gameplay window. Arousal follows a novelty/habituation
// pattern: it jumps on the onset of strong event-tile exposure, sags when
// the stimulation is sustained, and drains during monotony. Weak or partial
// exposure never arouses.
struct EventPlan {
    double intensity = 0.0; // event-tile time share of the window
    bool strong = false;    // intensity high enough to arouse on onset
    bool drop = false;      // monotony window with an arousal drop
    bool pick_loop = true;  // split event one-hot between loop and ramp
};

EventPlan plan_window(ArousalShape shape, double t, Rng& rng) {
    double p_event = 0.0;
    double p_drop = 0.0;
    switch (shape) {
    case ArousalShape::Rising:
        p_event = 0.45;
        p_drop = 0.10;
        break;
    case ArousalShape::RiseThenFall:
        p_event = t < 0.35 ? 0.80 : 0.05;
        p_drop = t < 0.35 ? 0.03 : 0.45;
        break;
    case ArousalShape::FlatLow:
        p_event = 0.10;
        p_drop = 0.10;
        break;
    }
    EventPlan plan;
    if (rng.bernoulli(p_event)) {
        plan.strong = rng.bernoulli(0.65);
        plan.intensity = plan.strong ? 0.65 + 0.25 * rng.uniform()
                                     : 0.15 + 0.30 * rng.uniform();
    } else {
        plan.drop = rng.bernoulli(p_drop / std::max(1e-9, 1.0 - p_event));
    }
    plan.pick_loop = rng.bernoulli(0.5);
    return plan;
}

double arousal_delta(const EventPlan& plan, bool prev_strong, ArousalShape shape, double t,
                     double noise, Rng& rng) {
    if (plan.strong && !prev_strong) // onset: novelty spike
        return 0.28 + 0.04 * rng.uniform();
    if (plan.strong && prev_strong) // sustained stimulation: habituation sets in
        return rng.bernoulli(0.35) ? -(0.16 + 0.05 * rng.uniform())
                                   : -0.03 + noise * 0.3 * rng.gaussian();
    if (prev_strong) { // offset: relief, mild for players still engaged
        const bool mild = shape == ArousalShape::Rising ||
                          (shape == ArousalShape::RiseThenFall && t < 0.35);
        return mild ? -(0.05 + 0.04 * rng.uniform()) : -(0.20 + 0.06 * rng.uniform());
    }
    if (plan.drop) // monotony drain
        return -(0.20 + 0.08 * rng.uniform());
    return -0.02 + noise * 0.4 * rng.gaussian();
}

double shape_base(ArousalShape shape) {
    switch (shape) {
    case ArousalShape::Rising: return 0.12;
    case ArousalShape::RiseThenFall: return 0.2;
    case ArousalShape::FlatLow: return 0.2;
    }
    return 0.2;
}

} // namespace

Corpus synthesize_corpus(const SynthSpec& spec_in) {
    SynthSpec spec = spec_in;
    if (spec.archetypes.empty()) spec.archetypes = SynthSpec::defaults().archetypes;
    if (spec.sessions_per_cluster < 1 || spec.windows_per_session < 2)
        throw CorpusError("InvalidSpec: need >= 1 session per cluster and >= 2 windows");
    if (spec.noise < 0) throw CorpusError("InvalidSpec: noise must be >= 0");

    Corpus corpus;
    corpus.schema = default_schema();
    corpus.truth_clusters = std::vector<int>{};

    const int W = spec.windows_per_session;
    for (std::size_t a = 0; a < spec.archetypes.size(); ++a) {
        const ArchetypeSpec& arch = spec.archetypes[a];
        for (int si = 0; si < spec.sessions_per_cluster; ++si) {
            Rng rng(spec.seed * 0x9e3779b9ULL + a * 1000003ULL + static_cast<std::uint64_t>(si));
            AnnotatorSession session;
            session.annotator_id =
                arch.name + "_" + std::to_string(si);

            double arousal = shape_base(arch.shape) + spec.noise * 0.2 * rng.gaussian();
            arousal = std::clamp(arousal, 0.0, 1.0);
            double score = 0.0;
            const bool expert = arch.shape != ArousalShape::FlatLow;

            bool prev_strong = false;
            for (int w = 0; w < W; ++w) {
                const double t = W == 1 ? 0.0 : static_cast<double>(w) / (W - 1);
                EventPlan plan{};
                if (w > 0) {
                    plan = plan_window(arch.shape, t, rng);
                    const double delta =
                        arousal_delta(plan, prev_strong, arch.shape, t, spec.noise, rng);
                    arousal = std::clamp(arousal + delta, 0.0, 1.0);
                }
                prev_strong = plan.strong;

                score += arch.score_rate * (0.8 + 0.4 * rng.uniform());

                // Feature levels track the simulator's operating ranges so
                // normalized queries land in the right neighbourhoods.
                const double g = spec.noise; // feature noise scale
                std::vector<double> f(corpus.schema.size(), 0.0);
                auto set = [&](const char* name, double v) {
                    for (std::size_t i = 0; i < corpus.schema.size(); ++i)
                        if (corpus.schema[i] == name) {
                            f[i] = v;
                            return;
                        }
                };
                set("speed", 1.95 - 0.95 * plan.intensity + 0.12 * rng.uniform() +
                                 g * 0.6 * rng.gaussian());
                set("accel", g * 2.0 * rng.gaussian());
                set("heading_rate", 0.3 + 0.5 * rng.uniform() + g * rng.gaussian());
                set("score", score);
                set("lap_fraction", std::min(1.0, (t * 0.95) + g * 0.1 * rng.gaussian()));
                set("dist_next_cp", 0.95 + 0.1 * rng.uniform());
                set("dist_opp_1", std::clamp((expert ? 0.3 + 1.0 * t : 0.3 + 0.4 * t) +
                                                 g * rng.gaussian(),
                                             0.05, 2.0));
                set("dist_opp_2", std::clamp((expert ? 0.4 + 0.8 * t : 0.35 + 0.3 * t) +
                                                 g * rng.gaussian(),
                                             0.05, 2.0));
                set("dist_opp_3", std::clamp((expert ? 0.25 + 1.1 * t : 0.3 + 0.5 * t) +
                                                 g * rng.gaussian(),
                                             0.05, 2.0));
                set("rank", expert ? 1.3 + 0.6 * rng.uniform() : 2.2 + 0.9 * rng.uniform());
                set("off_track",
                    std::clamp((expert ? 0.02 : 0.07) + g * 0.3 * rng.gaussian(), 0.0, 1.0));
                set("collisions", std::clamp((expert ? 0.01 : 0.04) + g * 0.1 * rng.gaussian(),
                                             0.0, 1.0));
                set("on_loop", plan.pick_loop ? plan.intensity : 0.0);
                set("on_ramp", plan.pick_loop ? 0.0 : plan.intensity);
                const double rest = 1.0 - plan.intensity;
                const double curve_share = rest * 0.6 * rng.uniform();
                set("on_straight", (rest - curve_share) * (0.75 + 0.25 * rng.uniform()));
                set("on_curve", curve_share);
                set("on_start", 0.15 * rng.uniform());

                session.features.push_back(std::move(f));
                session.arousal.push_back(arousal);
                session.score.push_back(score);
            }
            corpus.sessions.push_back(std::move(session));
            corpus.truth_clusters->push_back(static_cast<int>(a));
        }
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& dir) {
    fs::create_directories(dir);

    std::ofstream schema_file(fs::path(dir) / "schema.txt");
    for (const auto& name : corpus.schema) schema_file << name << '\n';
    schema_file.close();

    std::ofstream manifest(fs::path(dir) / "manifest.txt");
    for (const AnnotatorSession& s : corpus.sessions) {
        const std::string fname = s.annotator_id + ".csv";
        manifest << fname << '\n';
        std::ofstream csv(fs::path(dir) / fname);
        csv << "annotator_id,window_index,arousal,score";
        for (const auto& name : corpus.schema) csv << ',' << name;
        csv << '\n';
        for (std::size_t w = 0; w < s.window_count(); ++w) {
            csv << s.annotator_id << ',' << w << ',' << format_double(s.arousal[w]) << ','
                << format_double(s.score[w]);
            for (double v : s.features[w]) csv << ',' << format_double(v);
            csv << '\n';
        }
    }
    manifest.close();

    if (corpus.truth_clusters) {
        std::ofstream truth(fs::path(dir) / "clusters_truth.csv");
        truth << "annotator_id,cluster\n";
        for (std::size_t i = 0; i < corpus.sessions.size(); ++i)
            truth << corpus.sessions[i].annotator_id << ',' << (*corpus.truth_clusters)[i]
                  << '\n';
    }
}

Corpus load_corpus(const std::string& dir) {
    const fs::path root(dir);
    if (!fs::exists(root / "manifest.txt"))
        throw CorpusError("corpus manifest not found: " + (root / "manifest.txt").string());
    if (!fs::exists(root / "schema.txt"))
        throw CorpusError("corpus schema not found: " + (root / "schema.txt").string());

    Corpus corpus;
    {
        std::ifstream schema_file(root / "schema.txt");
        std::string line;
        while (std::getline(schema_file, line)) {
            line = trim(line);
            if (!line.empty()) corpus.schema.push_back(line);
        }
    }
    if (corpus.schema.empty()) throw CorpusError("corpus schema is empty: " + dir);

    std::ifstream manifest(root / "manifest.txt");
    std::string fname;
    while (std::getline(manifest, fname)) {
        fname = trim(fname);
        if (fname.empty()) continue;
        const fs::path path = root / fname;
        std::ifstream csv(path);
        if (!csv) throw CorpusError("cannot open session file: " + path.string());

        std::string line;
        if (!std::getline(csv, line))
            throw CorpusError("empty session file: " + path.string());

        AnnotatorSession session;
        int line_no = 1;
        while (std::getline(csv, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            const auto cols = split(line, ',');
            if (cols.size() != 4 + corpus.schema.size())
                throw CorpusError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected " + std::to_string(4 + corpus.schema.size()) +
                                  " columns, got " + std::to_string(cols.size()));
            try {
                if (session.annotator_id.empty()) session.annotator_id = cols[0];
                const double arousal = parse_double(cols[2]);
                if (arousal < 0.0 || arousal > 1.0)
                    throw CorpusError("arousal outside [0,1]");
                session.arousal.push_back(arousal);
                session.score.push_back(parse_double(cols[3]));
                std::vector<double> f;
                f.reserve(corpus.schema.size());
                for (std::size_t i = 4; i < cols.size(); ++i) f.push_back(parse_double(cols[i]));
                session.features.push_back(std::move(f));
            } catch (const std::exception& e) {
                throw CorpusError(path.string() + ":" + std::to_string(line_no) + ": " +
                                  e.what());
            }
        }
        if (session.window_count() == 0)
            throw CorpusError("session file has no rows: " + path.string());
        corpus.sessions.push_back(std::move(session));
    }

    const fs::path truth_path = root / "clusters_truth.csv";
    if (fs::exists(truth_path)) {
        std::ifstream truth(truth_path);
        std::string line;
        std::getline(truth, line); // header
        std::vector<int> labels;
        while (std::getline(truth, line)) {
            if (trim(line).empty()) continue;
            const auto cols = split(line, ',');
            if (cols.size() == 2) labels.push_back(static_cast<int>(parse_long(cols[1])));
        }
        if (labels.size() == corpus.sessions.size()) corpus.truth_clusters = labels;
    }
    return corpus;
}

std::uint64_t corpus_hash(const Corpus& corpus) {
    std::string blob;
    for (const auto& name : corpus.schema) {
        blob += name;
        blob += '\n';
    }
    for (const AnnotatorSession& s : corpus.sessions) {
        blob += s.annotator_id;
        for (std::size_t w = 0; w < s.window_count(); ++w) {
            blob += ',' + format_double(s.arousal[w]) + ',' + format_double(s.score[w]);
            for (double v : s.features[w]) blob += ',' + format_double(v);
        }
        blob += '\n';
    }
    return fnv1a(blob);
}

} // namespace trackgen
