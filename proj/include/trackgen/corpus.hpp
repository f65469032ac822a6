#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trackgen/simulate.hpp"

namespace trackgen {

// One annotator's play session: per-window feature vectors with an aligned
// arousal trace in [0, 1] and the score trace used for clustering.
struct AnnotatorSession {
    std::string annotator_id;
    std::vector<std::vector<double>> features; // one vector per window
    std::vector<double> arousal;
    std::vector<double> score;

    std::size_t window_count() const { return arousal.size(); }
};

enum class PairLabel : std::uint8_t { Increase, Decrease, Stable };

struct PreferencePair {
    std::vector<double> prev;
    std::vector<double> cur;
    PairLabel label = PairLabel::Stable;
    int session_index = -1;
};

// Post-downsampling pair: Increase -> 1, Decrease -> 0.
struct ChangePair {
    std::vector<double> prev;
    std::vector<double> cur;
    double label = 0;
    int session_index = -1;
};

struct Corpus {
    FeatureSchema schema;
    std::vector<AnnotatorSession> sessions;
    // Ground-truth cluster labels, present for synthesized corpora only.
    std::optional<std::vector<int>> truth_clusters;
};

constexpr double kPreferenceThreshold = 0.15;

// One labelled pair per consecutive window pair. Increase iff the arousal
// change is strictly greater than the threshold, Decrease iff strictly less
// than its negation, Stable otherwise. Throws CorpusError for sessions with
// fewer than two windows.
std::vector<PreferencePair> build_pairs(const AnnotatorSession& session,
                                        double threshold = kPreferenceThreshold,
                                        int session_index = -1);

std::vector<PreferencePair> build_pairs(const Corpus& corpus,
                                        double threshold = kPreferenceThreshold);

// Keeps only Increase/Decrease pairs. Throws CorpusError when nothing is left.
std::vector<ChangePair> downsample_changes(const std::vector<PreferencePair>& pairs);

// Per-feature min-max bounds; constant features map to 0.5.
struct NormalizationBounds {
    std::vector<double> min;
    std::vector<double> max;

    static NormalizationBounds fit(const std::vector<const AnnotatorSession*>& sessions,
                                   std::size_t feature_count);
    // x' = (x - min) / (max - min), clamped to [0, 1].
    std::vector<double> apply(std::span<const double> features) const;
};

// Applies min-max normalization to every session's features in place and
// returns the bounds for use on simulation-time queries.
NormalizationBounds normalize(Corpus& corpus);

// Pairwise annotator distance = 0.5 * area_between(arousal traces) +
// 0.5 * area_between(score traces), each trace min-max normalized per
// annotator first. Agglomerative average-linkage clustering cut at k.
// Returns one cluster id per session (ids ordered by first member).
// Throws CorpusError when there are fewer than k sessions.
std::vector<int> cluster_annotators(const Corpus& corpus, int k = 3);

enum class ArousalShape { Rising, RiseThenFall, FlatLow };

struct ArchetypeSpec {
    std::string name;
    ArousalShape shape = ArousalShape::Rising;
    double score_rate = 1.0; // checkpoints per window
};

struct SynthSpec {
    std::vector<ArchetypeSpec> archetypes; // empty -> default three archetypes
    int sessions_per_cluster = 10;
    int windows_per_session = 40;
    double noise = 0.05;
    std::uint64_t seed = 1;

    static SynthSpec defaults();
};

// Deterministic synthetic corpus whose arousal rises exactly on windows with
// event-tile activity (loops/ramps, lower speed) and falls otherwise, with
// per-archetype arousal shapes and score progressions. Ground-truth cluster
// labels are retained.
Corpus synthesize_corpus(const SynthSpec& spec);

// Directory layout: schema.txt (one feature per line), manifest.txt (one
// session CSV per line), session files with columns
// [annotator_id, window_index, arousal, score, f_0..f_{n-1}], and
// clusters_truth.csv when ground truth is known.
void save_corpus(const Corpus& corpus, const std::string& dir);
Corpus load_corpus(const std::string& dir);

// Provenance hash over schema and session contents.
std::uint64_t corpus_hash(const Corpus& corpus);

} // namespace trackgen
