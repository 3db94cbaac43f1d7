#include "oriole/cloak.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "oriole/csvfmt.hpp"
#include "oriole/errors.hpp"

namespace oriole {

void CloakConfig::validate() const {
    if (!(rho >= 0.0) || rho > 1.0) throw InputError("CloakConfig: rho must be in [0, 1]");
    if (iterations < 1) throw InputError("CloakConfig: iterations must be >= 1");
    if (!(step_size > 0.0)) throw InputError("CloakConfig: step_size must be > 0");
    if (!(penalty_weight >= 0.0)) throw InputError("CloakConfig: penalty_weight must be >= 0");
    dssim.validate();
}

namespace {

double feature_sq_dist(const FeatureVector& a, const FeatureVector& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

}  // namespace

CloakResult cloak_to_target(const Image& x, const FeatureVector& target_feature,
                            const EmbeddingModel& model, const CloakConfig& cfg,
                            int target_label) {
    cfg.validate();
    if (target_feature.size() != static_cast<std::size_t>(model.arch().feature_dim))
        throw DimensionError("cloak_to_target: target feature length != feature_dim");

    const int n = x.npixels();
    const double initial_dist = std::sqrt(feature_sq_dist(forward(model, x), target_feature));

    Perturbation delta(x.width(), x.height());
    double grad_scale = 0.0;  // rms of the first gradient, set on iteration 0
    for (int it = 0; it < cfg.iterations; ++it) {
        Image y = apply_perturbation(x, delta);
        FeatureVector f = forward(model, y);
        const double dist_sq = feature_sq_dist(f, target_feature);
        const double d = dssim(x, y, cfg.dssim);
        const double overshoot = std::max(0.0, d - cfg.rho);
        const double loss = dist_sq + cfg.penalty_weight * overshoot * overshoot;
        if (!std::isfinite(loss))
            throw NumericError("cloak_to_target: non-finite loss at iteration " +
                               std::to_string(it));

        FeatureVector upstream(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) upstream[i] = 2.0 * (f[i] - target_feature[i]);
        Perturbation g = input_gradient(model, y, upstream);
        if (overshoot > 0.0) {
            Perturbation gd = dssim_gradient(x, y, cfg.dssim);
            const double w = 2.0 * cfg.penalty_weight * overshoot;
            for (int p = 0; p < n; ++p) g.delta[static_cast<std::size_t>(p)] += w * gd.delta[static_cast<std::size_t>(p)];
        }
        // chain rule through the clamp: saturated pixels pass no gradient
        for (int p = 0; p < n; ++p) {
            const double v = x.pixels()[static_cast<std::size_t>(p)] + delta.delta[static_cast<std::size_t>(p)];
            if (v <= 0.0 || v >= 1.0) g.delta[static_cast<std::size_t>(p)] = 0.0;
        }
        // normalize by the first gradient's rms so step_size is the initial
        // per-iteration pixel step, independent of the feature scale
        if (it == 0) {
            double sq = 0.0;
            for (double v : g.delta) sq += v * v;
            grad_scale = std::sqrt(sq / static_cast<double>(n));
            if (grad_scale <= 0.0) break;  // already at the target
        }
        const double alpha =
            cfg.step_size / grad_scale *
            (1.0 - static_cast<double>(it) / static_cast<double>(cfg.iterations));
        for (int p = 0; p < n; ++p)
            delta.delta[static_cast<std::size_t>(p)] -= alpha * g.delta[static_cast<std::size_t>(p)];
    }

    // scale down until the budget holds; s = 0 (identity) is always feasible
    double scale = 1.0;
    if (dssim(x, apply_perturbation(x, delta), cfg.dssim) > cfg.rho) {
        double lo = 0.0, hi = 1.0;
        for (int step = 0; step < 12; ++step) {
            const double mid = 0.5 * (lo + hi);
            Perturbation scaled = delta;
            for (double& v : scaled.delta) v *= mid;
            if (dssim(x, apply_perturbation(x, scaled), cfg.dssim) <= cfg.rho)
                lo = mid;
            else
                hi = mid;
        }
        scale = lo;
    }

    CloakResult res;
    res.target_label = target_label;
    res.iterations_run = cfg.iterations;
    Perturbation final_delta = delta;
    for (double& v : final_delta.delta) v *= scale;
    res.cloaked = apply_perturbation(x, final_delta);
    res.achieved_dssim = dssim(x, res.cloaked, cfg.dssim);
    res.initial_feature_dist = initial_dist;
    res.final_feature_dist =
        std::sqrt(feature_sq_dist(forward(model, res.cloaked), target_feature));

    // the zero perturbation is the fallback: never return a worse cloak
    if (res.final_feature_dist > res.initial_feature_dist || res.achieved_dssim > cfg.rho) {
        res.cloaked = x;
        res.achieved_dssim = 0.0;
        res.final_feature_dist = res.initial_feature_dist;
    }
    return res;
}

std::vector<CloakResult> multi_cloaks(const Image& x, const TargetSet& targets,
                                      const EmbeddingModel& model, const CloakConfig& cfg) {
    if (targets.size() == 0) throw InputError("multi_cloaks: empty target set");
    std::vector<CloakResult> out(targets.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(targets.size()); ++i)
        out[static_cast<std::size_t>(i)] =
            cloak_to_target(x, targets.centroids[static_cast<std::size_t>(i)], model, cfg,
                            targets.labels[static_cast<std::size_t>(i)]);
    return out;
}

CloakResult fawkes_cloak(const Image& x, const std::vector<Image>& leaked_or_own,
                         const CentroidTable& table, const EmbeddingModel& model,
                         const CloakConfig& cfg, int exclude_label) {
    auto distances = distance_set(leaked_or_own, table, model);
    TargetSet t = select_targets(distances, table, 1, exclude_label);
    return cloak_to_target(x, t.centroids[0], model, cfg, t.labels[0]);
}

void write_cloak_audit_header(std::ostream& out) {
    out << "# oriole cloak-audit v1\n"
        << "target_label,achieved_dssim,initial_feature_dist,final_feature_dist,"
           "iterations_run,rho\n";
}

void write_cloak_audit_row(std::ostream& out, const CloakResult& r, double rho) {
    out << r.target_label << "," << csv::fmt(r.achieved_dssim) << ","
        << csv::fmt(r.initial_feature_dist) << "," << csv::fmt(r.final_feature_dist) << ","
        << r.iterations_run << "," << csv::fmt(rho) << "\n";
}

}  // namespace oriole
