#pragma once

#include "surftex/features.hpp"

#include <span>
#include <string>
#include <vector>

namespace surftex {

/// Sum of absolute coordinate differences. Throws DataError when the
/// vectors are not comparable.
double l1_distance(const FeatureVector& a, const FeatureVector& b);

struct Prediction {
    std::string label;
    std::vector<std::string> neighbor_ids;  ///< ascending distance
    std::vector<double> distances;          ///< ascending

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Exhaustive L1 k-nearest-neighbour classifier.
///
/// Neighbours are ranked by (distance, source id). The label is the
/// majority among the k neighbours; a vote tie goes to the class with the
/// smaller summed neighbour distance, then to the lexicographically smaller
/// class tag. Results do not depend on the order of the training list.
class KnnModel {
public:
    KnnModel(std::vector<LabeledFeature> train, int k = 1);

    Prediction classify(const FeatureVector& query) const;

    /// Element-wise identical to calling classify on each query. Errors are
    /// rethrown as DataError prefixed with the query index.
    std::vector<Prediction> classify_batch(std::span<const FeatureVector> queries,
                                           unsigned threads = 0) const;

    int k() const noexcept { return k_; }
    const std::vector<LabeledFeature>& train() const noexcept { return train_; }

private:
    std::vector<LabeledFeature> train_;
    int k_;
};

}  // namespace surftex
