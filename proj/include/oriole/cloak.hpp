#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "oriole/dssim.hpp"
#include "oriole/model.hpp"
#include "oriole/targetsel.hpp"

namespace oriole {

struct CloakConfig {
    double rho = 0.008;           // DSSIM perturbation budget
    int iterations = 200;
    double step_size = 0.05;
    double penalty_weight = 1000.0;  // lambda on the budget-overshoot term
    std::uint64_t seed = 0;          // reserved; delta always starts at zero
    DssimConfig dssim;

    void validate() const;
};

struct CloakResult {
    Image cloaked;
    double achieved_dssim = 0.0;
    double initial_feature_dist = 0.0;
    double final_feature_dist = 0.0;
    int iterations_run = 0;
    int target_label = -1;
};

/// Minimizes || Phi(x (+) delta) - target ||^2 with a quadratic penalty on
/// DSSIM budget overshoot, then scales delta down by binary search until the
/// budget holds. Falls back to delta = 0 if optimization did not help.
CloakResult cloak_to_target(const Image& x, const FeatureVector& target_feature,
                            const EmbeddingModel& model, const CloakConfig& cfg,
                            int target_label = -1);

/// One cloak per target, in TargetSet order; sub-problems run in parallel.
std::vector<CloakResult> multi_cloaks(const Image& x, const TargetSet& targets,
                                      const EmbeddingModel& model, const CloakConfig& cfg);

/// The user-side single-target cloak: picks the most dissimilar class from
/// the provided image set, then cloaks toward its centroid.
CloakResult fawkes_cloak(const Image& x, const std::vector<Image>& leaked_or_own,
                         const CentroidTable& table, const EmbeddingModel& model,
                         const CloakConfig& cfg, int exclude_label = -1);

/// Cloak audit CSV: header plus one row per result.
void write_cloak_audit_header(std::ostream& out);
void write_cloak_audit_row(std::ostream& out, const CloakResult& r, double rho);

}  // namespace oriole
