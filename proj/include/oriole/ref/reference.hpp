#pragma once

// Serial reference implementations, deliberately written as plain nested
// loops on an independent algebraic route from the production kernels.
// Linked by the tests and the benchmark only.

#include <map>
#include <utility>
#include <vector>

#include "oriole/dssim.hpp"
#include "oriole/image.hpp"
#include "oriole/model.hpp"

namespace oriole::ref {

/// Two-pass centered-moment DSSIM, one window at a time.
double dssim_ref(const Image& a, const Image& b, const DssimConfig& cfg = {});

/// Naive convolution forward pass through the fixed architecture.
FeatureVector forward_ref(const EmbeddingModel& model, const Image& x);

/// Brute-force top-m by sort: (label, score) pairs, scores non-increasing,
/// ties broken by ascending label, the excluded label removed first.
std::vector<std::pair<int, double>> top_m_ref(const std::map<int, double>& distances,
                                              int m, int exclude_label);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major n*n).
/// Returns eigenvalues in non-increasing order with matching unit eigenvectors.
struct EigenResult {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};
EigenResult jacobi_eigen_ref(const std::vector<double>& symmetric, int n);

}  // namespace oriole::ref
