#pragma once

#include <map>
#include <string>
#include <vector>

#include "oriole/dataset.hpp"
#include "oriole/model.hpp"

namespace oriole {

/// Per-class feature centroids over a pool, keyed by ascending label.
struct CentroidTable {
    std::vector<int> labels;  // sorted ascending
    std::vector<FeatureVector> centroids;

    int n_classes() const { return static_cast<int>(labels.size()); }
    const FeatureVector* find(int label) const;
};

/// Ordered top-m most-dissimilar targets with their centroids and scores
/// (scores sorted non-increasing; label ties resolved ascending).
struct TargetSet {
    std::vector<int> labels;
    std::vector<FeatureVector> centroids;
    std::vector<double> scores;

    std::size_t size() const { return labels.size(); }
};

CentroidTable compute_centroids(const LabeledDataset& pool, const EmbeddingModel& model);

/// For each class k: min over the leaked images of || Phi(x) - C_k ||_2.
std::map<int, double> distance_set(const std::vector<Image>& leaked, const CentroidTable& table,
                                   const EmbeddingModel& model);

/// The m classes with the largest min-distance, excluding exclude_label.
TargetSet select_targets(const std::map<int, double>& distances, const CentroidTable& table,
                         int m, int exclude_label);

double l2_distance(const FeatureVector& a, const FeatureVector& b);

/// CSV audit dump: "label,score" rows in target order.
std::string targets_csv(const TargetSet& targets);

}  // namespace oriole
