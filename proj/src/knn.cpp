#include "trackgen/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "trackgen/errors.hpp"
#include "trackgen/util.hpp"

namespace trackgen {

namespace {

constexpr double kWeightEpsilon = 1e-9;

double euclidean(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

} // namespace

KnnModel KnnModel::build(const Corpus& corpus, const KnnBuildOptions& options) {
    if (options.k < 1) throw ModelError("knn: k must be >= 1");

    KnnModel model;
    model.schema_ = corpus.schema;
    model.cluster_filter_ = options.cluster_filter;

    // Select sessions first so that both normalization bounds and entries
    // come from the filtered subset only.
    std::vector<const AnnotatorSession*> selected;
    std::vector<int> selected_index;
    for (std::size_t i = 0; i < corpus.sessions.size(); ++i) {
        if (options.cluster_filter) {
            if (options.cluster_assignments.size() != corpus.sessions.size())
                throw ModelError("knn: cluster filter requires one assignment per session");
            if (options.cluster_assignments[i] != *options.cluster_filter) continue;
        }
        selected.push_back(&corpus.sessions[i]);
        selected_index.push_back(static_cast<int>(i));
    }
    if (selected.empty()) throw ModelError("knn: no sessions match the cluster filter");

    model.bounds_ = NormalizationBounds::fit(selected, corpus.schema.size());

    for (std::size_t s = 0; s < selected.size(); ++s) {
        const AnnotatorSession& session = *selected[s];
        auto pairs = build_pairs(session, options.threshold, selected_index[s]);
        for (const PreferencePair& p : pairs) {
            if (p.label == PairLabel::Stable) continue;
            std::vector<double> prev = model.bounds_.apply(p.prev);
            const std::vector<double> cur = model.bounds_.apply(p.cur);
            prev.insert(prev.end(), cur.begin(), cur.end());
            model.entries_.push_back(std::move(prev));
            model.labels_.push_back(p.label == PairLabel::Increase ? 1.0 : 0.0);
        }
    }
    if (model.entries_.empty())
        throw ModelError("EmptyAfterDownsample: no arousal-change pairs in corpus");

    model.k_ = std::min<int>(options.k, static_cast<int>(model.entries_.size()));
    return model;
}

std::vector<std::pair<double, std::size_t>>
KnnModel::nearest_scan(std::span<const double> q) const {
    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i)
        dists.emplace_back(euclidean(q, entries_[i]), i);
    const std::size_t k = static_cast<std::size_t>(k_);
    std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
    dists.resize(k);
    return dists;
}

void KnnModel::build_index() const {
    kd_nodes_.clear();
    kd_nodes_.reserve(entries_.size());
    std::vector<std::size_t> idx(entries_.size());
    std::iota(idx.begin(), idx.end(), 0);
    kd_root_ = build_kd(idx, 0, idx.size(), 0);
}

int KnnModel::build_kd(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi,
                       int depth) const {
    if (lo >= hi) return -1;
    const int axis = depth % static_cast<int>(pair_dimensions());
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi,
                     [&](std::size_t a, std::size_t b) {
                         const double va = entries_[a][axis];
                         const double vb = entries_[b][axis];
                         return va < vb || (va == vb && a < b);
                     });
    KdNode node;
    node.point = idx[mid];
    node.axis = axis;
    const int self = static_cast<int>(kd_nodes_.size());
    kd_nodes_.push_back(node);
    const int left = build_kd(idx, lo, mid, depth + 1);
    const int right = build_kd(idx, mid + 1, hi, depth + 1);
    kd_nodes_[self].left = left;
    kd_nodes_[self].right = right;
    return self;
}

std::vector<std::pair<double, std::size_t>>
KnnModel::nearest_indexed(std::span<const double> q) const {
    if (kd_root_ < 0) build_index();
    const std::size_t k = static_cast<std::size_t>(k_);

    // Current k best, kept sorted ascending by (distance, index).
    std::vector<std::pair<double, std::size_t>> best;
    best.reserve(k + 1);
    auto consider = [&](std::size_t point) {
        const double d = euclidean(q, entries_[point]);
        const std::pair<double, std::size_t> cand{d, point};
        if (best.size() == k && !(cand < best.back())) return;
        best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
        if (best.size() > k) best.pop_back();
    };

    // Depth-first with subtree pruning on the splitting plane distance.
    // Pruning only on strictly-greater plane distance preserves exact
    // (distance, index) tie-breaking against the scan.
    auto visit = [&](auto&& self, int node_id) -> void {
        if (node_id < 0) return;
        const KdNode& node = kd_nodes_[static_cast<std::size_t>(node_id)];
        consider(node.point);
        const double delta = q[static_cast<std::size_t>(node.axis)] -
                             entries_[node.point][static_cast<std::size_t>(node.axis)];
        const int near = delta < 0 ? node.left : node.right;
        const int far = delta < 0 ? node.right : node.left;
        self(self, near);
        if (best.size() < k || std::abs(delta) <= best.back().first) self(self, far);
    };
    visit(visit, kd_root_);
    return best;
}

void KnnModel::set_use_index(bool enabled) {
    use_index_ = enabled;
    if (!enabled) {
        kd_nodes_.clear();
        kd_root_ = -1;
    }
}

double KnnModel::predict_normalized(std::span<const double> pair_vec) const {
    if (entries_.empty()) throw ModelError("EmptyModel: no entries");
    if (pair_vec.size() != pair_dimensions())
        throw ModelError("knn: query dimension mismatch");

    const auto nearest = use_index_ ? nearest_indexed(pair_vec) : nearest_scan(pair_vec);

    // An exact state match dominates; ties between exact matches average.
    if (nearest.front().first == 0.0) {
        double sum = 0.0;
        int count = 0;
        for (const auto& [d, i] : nearest) {
            if (d != 0.0) break;
            sum += labels_[i];
            ++count;
        }
        return sum / count;
    }

    double weight_sum = 0.0;
    double weighted = 0.0;
    for (const auto& [d, i] : nearest) {
        const double w = 1.0 / (d + kWeightEpsilon);
        weight_sum += w;
        weighted += w * labels_[i];
    }
    return weighted / weight_sum;
}

double KnnModel::predict(std::span<const double> prev_raw,
                         std::span<const double> cur_raw) const {
    std::vector<double> q = bounds_.apply(prev_raw);
    const std::vector<double> cur = bounds_.apply(cur_raw);
    q.insert(q.end(), cur.begin(), cur.end());
    return predict_normalized(q);
}

ArousalTrace KnnModel::arousal_trace(const StateTrace& trace) const {
    if (trace.windows.size() < 2)
        throw ModelError("TraceTooShort: need at least 2 windows");
    ArousalTrace out;
    out.reserve(trace.windows.size() - 1);
    for (std::size_t i = 1; i < trace.windows.size(); ++i)
        out.push_back(predict(trace.windows[i - 1].features, trace.windows[i].features));
    return out;
}

std::string KnnModel::summary_json() const {
    nlohmann::ordered_json j;
    j["k"] = k_;
    j["entry_count"] = entries_.size();
    if (cluster_filter_)
        j["cluster_filter"] = *cluster_filter_;
    else
        j["cluster_filter"] = nullptr;
    j["schema_hash"] = hex64(schema_hash(schema_));
    return j.dump(2) + "\n";
}

} // namespace trackgen
