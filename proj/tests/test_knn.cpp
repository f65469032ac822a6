#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "trackgen/errors.hpp"
#include "trackgen/knn.hpp"
#include "trackgen/rng.hpp"

using namespace trackgen;

namespace {

// Builds a model directly from hand-made pair entries by wrapping them in a
// one-session corpus whose windows are spaced so each consecutive pair is a
// change pair with the requested label and features.
KnnModel model_from_entries(const std::vector<std::vector<double>>& vectors,
                            const std::vector<double>& labels, int k) {
    // Use a tiny corpus with one feature dimension per half-vector slot.
    const std::size_t dims = vectors.front().size() / 2;
    Corpus corpus;
    for (std::size_t d = 0; d < dims; ++d) corpus.schema.push_back("f" + std::to_string(d));

    // One session per entry: window pair (prev, cur) with arousal jump by label.
    for (std::size_t e = 0; e < vectors.size(); ++e) {
        AnnotatorSession s;
        s.annotator_id = "e" + std::to_string(e);
        s.features.push_back(
            std::vector<double>(vectors[e].begin(), vectors[e].begin() + dims));
        s.features.push_back(std::vector<double>(vectors[e].begin() + dims, vectors[e].end()));
        s.arousal = labels[e] > 0.5 ? std::vector<double>{0.2, 0.8}
                                    : std::vector<double>{0.8, 0.2};
        s.score = {0, 1};
        corpus.sessions.push_back(std::move(s));
    }
    // Pin bounds with two extreme windows so normalization is the identity
    // for values already in [0,1].
    AnnotatorSession lo;
    lo.annotator_id = "lo";
    lo.features = {std::vector<double>(dims, 0.0), std::vector<double>(dims, 1.0)};
    lo.arousal = {0.5, 0.5}; // stable: contributes no entries
    lo.score = {0, 0};
    corpus.sessions.push_back(std::move(lo));

    KnnBuildOptions opts;
    opts.k = k;
    return KnnModel::build(corpus, opts);
}

// Brute-force reference: full sort by (distance, index), same weighting.
double oracle_predict(const std::vector<std::vector<double>>& entries,
                      const std::vector<double>& labels, std::span<const double> q, int k) {
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < q.size(); ++j)
            acc += (entries[i][j] - q[j]) * (entries[i][j] - q[j]);
        d.emplace_back(std::sqrt(acc), i);
    }
    std::sort(d.begin(), d.end());
    d.resize(std::min<std::size_t>(d.size(), static_cast<std::size_t>(k)));
    if (d.front().first == 0.0) {
        double sum = 0;
        int n = 0;
        for (const auto& [dist, idx] : d) {
            if (dist != 0.0) break;
            sum += labels[idx];
            ++n;
        }
        return sum / n;
    }
    double ws = 0, wl = 0;
    for (const auto& [dist, idx] : d) {
        const double w = 1.0 / (dist + 1e-9);
        ws += w;
        wl += w * labels[idx];
    }
    return wl / ws;
}

} // namespace

TEST_CASE("single-entry model always returns its label") {
    const KnnModel m = model_from_entries({{0.1, 0.2, 0.3, 0.4}}, {1.0}, 5);
    CHECK(m.predict_normalized(std::vector<double>{0.9, 0.9, 0.9, 0.9}) == 1.0);
    CHECK(m.k() == 1); // clamped to the entry count
}

TEST_CASE("two equidistant entries average to 0.5") {
    const KnnModel m =
        model_from_entries({{0.0, 0.0}, {1.0, 1.0}}, {0.0, 1.0}, 2);
    CHECK(m.predict_normalized(std::vector<double>{0.5, 0.5}) == doctest::Approx(0.5));
}

TEST_CASE("exact match dominates") {
    const KnnModel m = model_from_entries(
        {{0.3, 0.3}, {0.31, 0.31}, {0.9, 0.9}}, {0.0, 1.0, 1.0}, 3);
    CHECK(m.predict_normalized(std::vector<double>{0.3, 0.3}) == 0.0);

    SUBCASE("tied exact matches average") {
        const KnnModel tied = model_from_entries(
            {{0.3, 0.3}, {0.3, 0.3}, {0.9, 0.9}}, {0.0, 1.0, 1.0}, 3);
        CHECK(tied.predict_normalized(std::vector<double>{0.3, 0.3}) == 0.5);
    }
}

TEST_CASE("arousal_trace length and errors") {
    SynthSpec spec = SynthSpec::defaults();
    spec.sessions_per_cluster = 4;
    spec.windows_per_session = 20;
    const Corpus corpus = synthesize_corpus(spec);
    KnnBuildOptions opts;
    const KnnModel model = KnnModel::build(corpus, opts);

    StateTrace trace;
    trace.schema = corpus.schema;
    for (int i = 0; i < 41; ++i) {
        TelemetryWindow w;
        w.window_index = i;
        w.features.assign(corpus.schema.size(), 0.3);
        trace.windows.push_back(w);
    }
    const ArousalTrace a = model.arousal_trace(trace);
    CHECK(a.size() == 40);
    for (double v : a) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // Constant state trace: every prediction is the same query.
    for (double v : a) CHECK(v == a.front());

    StateTrace tiny;
    tiny.schema = corpus.schema;
    tiny.windows.resize(1);
    CHECK_THROWS_AS(model.arousal_trace(tiny), ModelError);
}

TEST_CASE("scan matches the brute-force oracle on random corpora") {
    Rng rng(12345);
    for (int trial = 0; trial < 30; ++trial) {
        const int dims = 2 * (1 + rng.uniform_int(4));
        const int n = 2 + rng.uniform_int(120);
        std::vector<std::vector<double>> entries;
        std::vector<double> labels;
        for (int i = 0; i < n; ++i) {
            std::vector<double> v;
            for (int d = 0; d < dims; ++d)
                v.push_back(rng.uniform_int(6) / 5.0); // grid values force ties
            entries.push_back(v);
            labels.push_back(rng.uniform_int(2));
        }
        const KnnModel m = model_from_entries(entries, labels, 1 + rng.uniform_int(7));
        for (int q = 0; q < 20; ++q) {
            std::vector<double> query;
            for (int d = 0; d < dims; ++d) query.push_back(rng.uniform_int(6) / 5.0);
            CHECK(m.predict_normalized(query) ==
                  oracle_predict(entries, labels, query, m.k()));
        }
    }
}

TEST_CASE("kd-tree search is identical to the scan") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const int dims = 2 * (1 + rng.uniform_int(3));
        const int n = 2 + rng.uniform_int(200);
        std::vector<std::vector<double>> entries;
        std::vector<double> labels;
        for (int i = 0; i < n; ++i) {
            std::vector<double> v;
            for (int d = 0; d < dims; ++d)
                v.push_back(rng.uniform_int(4) / 3.0); // duplicates likely
            entries.push_back(v);
            labels.push_back(rng.uniform_int(2));
        }
        KnnModel scan = model_from_entries(entries, labels, 1 + rng.uniform_int(7));
        KnnModel indexed = scan;
        indexed.set_use_index(true);
        for (int q = 0; q < 25; ++q) {
            std::vector<double> query;
            for (int d = 0; d < dims; ++d) query.push_back(rng.uniform());
            CHECK(scan.predict_normalized(query) == indexed.predict_normalized(query));
        }
    }
}

TEST_CASE("label flip antisymmetry") {
    Rng rng(4);
    const int dims = 4;
    std::vector<std::vector<double>> entries;
    std::vector<double> labels, flipped;
    for (int i = 0; i < 60; ++i) {
        std::vector<double> v;
        for (int d = 0; d < dims; ++d) v.push_back(rng.uniform());
        entries.push_back(v);
        const double l = rng.uniform_int(2);
        labels.push_back(l);
        flipped.push_back(1.0 - l);
    }
    const KnnModel m = model_from_entries(entries, labels, 5);
    const KnnModel f = model_from_entries(entries, flipped, 5);
    for (int q = 0; q < 30; ++q) {
        std::vector<double> query;
        for (int d = 0; d < dims; ++d) query.push_back(rng.uniform());
        const double p = m.predict_normalized(query);
        const double pf = f.predict_normalized(query);
        CHECK(pf == doctest::Approx(1.0 - p).epsilon(1e-12));
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("cluster isolation: filtered model equals pruned-corpus model") {
    SynthSpec spec = SynthSpec::defaults();
    spec.sessions_per_cluster = 5;
    spec.windows_per_session = 25;
    const Corpus corpus = synthesize_corpus(spec);
    const std::vector<int> truth = *corpus.truth_clusters;

    KnnBuildOptions filtered_opts;
    filtered_opts.k = 5;
    filtered_opts.cluster_filter = 1;
    filtered_opts.cluster_assignments = truth;
    const KnnModel filtered = KnnModel::build(corpus, filtered_opts);

    Corpus pruned;
    pruned.schema = corpus.schema;
    for (std::size_t i = 0; i < corpus.sessions.size(); ++i)
        if (truth[i] == 1) pruned.sessions.push_back(corpus.sessions[i]);
    KnnBuildOptions plain;
    plain.k = 5;
    const KnnModel alone = KnnModel::build(pruned, plain);

    REQUIRE(filtered.entry_count() == alone.entry_count());
    Rng rng(8);
    for (int q = 0; q < 40; ++q) {
        std::vector<double> prev, cur;
        for (std::size_t d = 0; d < corpus.schema.size(); ++d) {
            prev.push_back(rng.uniform(0, 6));
            cur.push_back(rng.uniform(0, 6));
        }
        CHECK(filtered.predict(prev, cur) == alone.predict(prev, cur));
    }
}

TEST_CASE("model summary exports provenance fields") {
    const KnnModel m = model_from_entries({{0.1, 0.2}}, {1.0}, 3);
    const std::string json = m.summary_json();
    CHECK(json.find("\"k\"") != std::string::npos);
    CHECK(json.find("\"entry_count\"") != std::string::npos);
    CHECK(json.find("\"cluster_filter\"") != std::string::npos);
    CHECK(json.find("\"schema_hash\"") != std::string::npos);
}

TEST_CASE("empty model build fails") {
    Corpus corpus;
    corpus.schema = {"f"};
    AnnotatorSession flat;
    flat.annotator_id = "flat";
    flat.features = {{0.1}, {0.2}, {0.3}};
    flat.arousal = {0.5, 0.5, 0.5};
    flat.score = {0, 0, 0};
    corpus.sessions.push_back(flat);
    KnnBuildOptions opts;
    CHECK_THROWS_AS(KnnModel::build(corpus, opts), ModelError);
}
