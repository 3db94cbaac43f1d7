#pragma once

#include "oriole/image.hpp"

namespace oriole {

/// Windowed SSIM settings. Uniform (unweighted) statistics over square
/// windows placed on a stride grid; c1/c2 are the usual (0.01*L)^2 and
/// (0.03*L)^2 with dynamic range L = 1.
struct DssimConfig {
    int window = 8;
    int stride = 4;
    double c1 = 1e-4;
    double c2 = 9e-4;

    void validate() const;
};

/// Structural dissimilarity (1 - mean windowed SSIM) / 2, in [0, 1].
double dssim(const Image& a, const Image& b, const DssimConfig& cfg = {});

/// Analytic d dssim(a, b) / d b, same shape as b.
Perturbation dssim_gradient(const Image& a, const Image& b, const DssimConfig& cfg = {});

}  // namespace oriole
