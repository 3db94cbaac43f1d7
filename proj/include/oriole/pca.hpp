#pragma once

#include <string>
#include <utility>
#include <vector>

#include "oriole/model.hpp"

namespace oriole {

struct PcaPoint {
    double x = 0.0;
    double y = 0.0;
    std::string role;
};

struct PcaResult {
    std::vector<PcaPoint> points;
    std::vector<double> component1;
    std::vector<double> component2;
    double eigval1 = 0.0;
    double eigval2 = 0.0;
    bool rank_deficient = false;  // fewer than 2 nonzero eigenvalues
};

/// Top-2 principal components by power iteration with deflation (tolerance
/// 1e-10, at most 10000 iterations). Component signs are fixed by making the
/// largest-magnitude loading positive. With rank-deficient input the second
/// coordinate is 0 and the warning flag is set.
PcaResult pca_project(const std::vector<std::pair<FeatureVector, std::string>>& features);

/// CSV rows "x,y,role,rank_warning".
std::string pca_csv(const PcaResult& result);

}  // namespace oriole
