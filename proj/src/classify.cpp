#include "surftex/classify.hpp"

#include "surftex/error.hpp"
#include "surftex/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace surftex {

double l1_distance(const FeatureVector& a, const FeatureVector& b) {
    if (!a.comparable(b)) {
        throw DataError("incomparable feature vectors: " + std::string(to_string(a.method)) + "/" +
                        std::to_string(a.dim()) + " vs " + std::string(to_string(b.method)) + "/" +
                        std::to_string(b.dim()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += std::abs(a.values[i] - b.values[i]);
    return s;
}

KnnModel::KnnModel(std::vector<LabeledFeature> train, int k) : train_(std::move(train)), k_(k) {
    if (train_.empty()) throw InvalidArgument("k-NN model needs at least one training sample");
    if (k_ < 1 || static_cast<std::size_t>(k_) > train_.size()) {
        throw InvalidArgument("k must lie in [1, " + std::to_string(train_.size()) + "], got " +
                              std::to_string(k_));
    }
    const auto& first = train_.front().feature;
    for (const auto& t : train_) {
        if (!t.feature.comparable(first)) {
            throw DataError("training sample '" + t.source + "' differs in method or dimension");
        }
    }
}

Prediction KnnModel::classify(const FeatureVector& query) const {
    const auto& ref = train_.front().feature;
    if (!query.comparable(ref)) {
        throw DataError("query (" + std::string(to_string(query.method)) + ", dim " +
                        std::to_string(query.dim()) + ") is not comparable with model (" +
                        std::string(to_string(ref.method)) + ", dim " + std::to_string(ref.dim()) + ")");
    }
    std::vector<double> dist(train_.size());
    for (std::size_t i = 0; i < train_.size(); ++i) dist[i] = l1_distance(query, train_[i].feature);

    std::vector<std::size_t> order(train_.size());
    std::iota(order.begin(), order.end(), 0);
    auto before = [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        if (train_[a].source != train_[b].source) return train_[a].source < train_[b].source;
        return train_[a].label < train_[b].label;
    };
    std::partial_sort(order.begin(), order.begin() + k_, order.end(), before);

    Prediction p;
    struct Tally {
        int votes = 0;
        double distance = 0.0;
    };
    std::map<std::string, Tally> tally;
    for (int i = 0; i < k_; ++i) {
        const auto& t = train_[order[i]];
        p.neighbor_ids.push_back(t.source);
        p.distances.push_back(dist[order[i]]);
        auto& entry = tally[t.label];
        ++entry.votes;
        entry.distance += dist[order[i]];
    }
    // std::map iterates labels in ascending order, so strict comparisons keep
    // the lexicographically smallest label on a full tie.
    const Tally* best = nullptr;
    for (const auto& [label, t] : tally) {
        if (!best || t.votes > best->votes ||
            (t.votes == best->votes && t.distance < best->distance)) {
            best = &t;
            p.label = label;
        }
    }
    return p;
}

std::vector<Prediction> KnnModel::classify_batch(std::span<const FeatureVector> queries,
                                                 unsigned threads) const {
    std::vector<Prediction> out(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) {
        try {
            out[i] = classify(queries[i]);
        } catch (const Error& e) {
            throw DataError("query " + std::to_string(i) + ": " + e.what());
        }
    });
    return out;
}

}  // namespace surftex
