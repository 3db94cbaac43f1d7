#include "oriole/targetsel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oriole/csvfmt.hpp"
#include "oriole/errors.hpp"

namespace oriole {

const FeatureVector* CentroidTable::find(int label) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) return nullptr;
    return &centroids[static_cast<std::size_t>(it - labels.begin())];
}

double l2_distance(const FeatureVector& a, const FeatureVector& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

CentroidTable compute_centroids(const LabeledDataset& pool, const EmbeddingModel& model) {
    if (pool.empty()) throw InputError("compute_centroids: empty pool");
    auto features = batch_features(model, pool.images);

    CentroidTable table;
    table.labels = pool.label_set();
    const std::size_t d = static_cast<std::size_t>(model.arch().feature_dim);
    table.centroids.assign(table.labels.size(), FeatureVector(d, 0.0));
    std::vector<std::size_t> counts(table.labels.size(), 0);

    for (std::size_t i = 0; i < pool.size(); ++i) {
        auto it = std::lower_bound(table.labels.begin(), table.labels.end(), pool.labels[i]);
        const std::size_t c = static_cast<std::size_t>(it - table.labels.begin());
        for (std::size_t j = 0; j < d; ++j) table.centroids[c][j] += features[i][j];
        counts[c]++;
    }
    for (std::size_t c = 0; c < table.centroids.size(); ++c)
        for (double& v : table.centroids[c]) v /= static_cast<double>(counts[c]);
    return table;
}

std::map<int, double> distance_set(const std::vector<Image>& leaked, const CentroidTable& table,
                                   const EmbeddingModel& model) {
    if (leaked.empty()) throw InputError("distance_set: empty leaked set");
    auto features = batch_features(model, leaked);

    std::map<int, double> out;
    for (int c = 0; c < table.n_classes(); ++c) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& f : features)
            best = std::min(best, l2_distance(f, table.centroids[static_cast<std::size_t>(c)]));
        out[table.labels[static_cast<std::size_t>(c)]] = best;
    }
    return out;
}

TargetSet select_targets(const std::map<int, double>& distances, const CentroidTable& table,
                         int m, int exclude_label) {
    std::vector<std::pair<int, double>> candidates;
    for (const auto& [label, d] : distances)
        if (label != exclude_label) candidates.emplace_back(label, d);
    if (m < 1 || static_cast<std::size_t>(m) > candidates.size())
        throw InputError("select_targets: m out of range for " +
                         std::to_string(candidates.size()) + " candidates");

    // largest distance first; ties broken by ascending label
    std::stable_sort(candidates.begin(), candidates.end(), [](const auto& l, const auto& r) {
        if (l.second != r.second) return l.second > r.second;
        return l.first < r.first;
    });

    TargetSet out;
    for (int i = 0; i < m; ++i) {
        const auto& [label, score] = candidates[static_cast<std::size_t>(i)];
        const FeatureVector* c = table.find(label);
        if (!c) throw InputError("select_targets: label missing from centroid table");
        out.labels.push_back(label);
        out.centroids.push_back(*c);
        out.scores.push_back(score);
    }
    return out;
}

std::string targets_csv(const TargetSet& targets) {
    std::ostringstream out;
    out << "# oriole targets v1\nlabel,score\n";
    for (std::size_t i = 0; i < targets.size(); ++i)
        out << targets.labels[i] << "," << csv::fmt(targets.scores[i]) << "\n";
    return out.str();
}

}  // namespace oriole
