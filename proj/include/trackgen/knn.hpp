#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trackgen/corpus.hpp"

namespace trackgen {

// Arousal-change trace: one prediction in [0, 1] per consecutive window pair.
using ArousalTrace = std::vector<double>;

struct KnnBuildOptions {
    int k = 5;
    double threshold = kPreferenceThreshold;
    // Restrict entries to sessions of one cluster; requires assignments.
    std::optional<int> cluster_filter;
    std::vector<int> cluster_assignments;
};

// Distance-weighted KNN over concatenated (prev, cur) normalized window
// pairs labelled 1 (arousal increase) / 0 (decrease). Immutable after build.
class KnnModel {
public:
    static KnnModel build(const Corpus& corpus, const KnnBuildOptions& options);

    // Nearest-k by Euclidean distance over the concatenated pair vector,
    // weighted 1/(d + 1e-9); k-th place ties break on entry order. A
    // distance-0 match dominates: the mean label over all exact matches is
    // returned. Query must already be normalized. Throws ModelError when the
    // model is empty.
    double predict_normalized(std::span<const double> pair_vec) const;

    // Normalizes both windows with the stored corpus bounds, then predicts.
    double predict(std::span<const double> prev_raw, std::span<const double> cur_raw) const;

    // One prediction per consecutive window pair; needs >= 2 windows.
    ArousalTrace arousal_trace(const StateTrace& trace) const;

    // {k, entry_count, cluster_filter, schema_hash} provenance record.
    std::string summary_json() const;

    int k() const { return k_; }
    std::size_t entry_count() const { return entries_.size(); }
    std::size_t pair_dimensions() const { return 2 * schema_.size(); }
    const NormalizationBounds& bounds() const { return bounds_; }
    const FeatureSchema& schema() const { return schema_; }
    std::optional<int> cluster_filter() const { return cluster_filter_; }

    // When enabled, neighbour search goes through a KD-tree that must return
    // results identical to the linear scan.
    void set_use_index(bool enabled);
    bool use_index() const { return use_index_; }

    const std::vector<std::vector<double>>& entries() const { return entries_; }
    const std::vector<double>& labels() const { return labels_; }

private:
    // (distance, entry index) pairs of the k nearest, ascending.
    std::vector<std::pair<double, std::size_t>> nearest_scan(
        std::span<const double> q) const;
    std::vector<std::pair<double, std::size_t>> nearest_indexed(
        std::span<const double> q) const;

    int k_ = 5;
    FeatureSchema schema_;
    NormalizationBounds bounds_;
    std::optional<int> cluster_filter_;
    std::vector<std::vector<double>> entries_;
    std::vector<double> labels_;
    bool use_index_ = false;

    // KD-tree over entries; built lazily on first indexed query.
    struct KdNode {
        std::size_t point = 0;
        int axis = -1;
        int left = -1;
        int right = -1;
    };
    mutable std::vector<KdNode> kd_nodes_;
    mutable int kd_root_ = -1;
    void build_index() const;
    int build_kd(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi,
                 int depth) const;
};

} // namespace trackgen
