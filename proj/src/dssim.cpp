#include "oriole/dssim.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace oriole {

void DssimConfig::validate() const {
    if (window < 2) throw InputError("DssimConfig: window must be >= 2");
    if (stride < 1) throw InputError("DssimConfig: stride must be >= 1");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw InputError("DssimConfig: c1 and c2 must be > 0");
}

namespace {

struct WindowGrid {
    int nx = 0;  // window origins per row
    int ny = 0;
    int count() const { return nx * ny; }
};

WindowGrid make_grid(const Image& a, const Image& b, const DssimConfig& cfg) {
    cfg.validate();
    if (!a.same_shape(b))
        throw DimensionError("dssim: image shapes differ");
    if (a.width() < cfg.window || a.height() < cfg.window)
        throw DimensionError("dssim: image smaller than SSIM window");
    WindowGrid g;
    g.nx = (a.width() - cfg.window) / cfg.stride + 1;
    g.ny = (a.height() - cfg.window) / cfg.stride + 1;
    return g;
}

struct WindowStats {
    double mu_a, mu_b;   // window means
    double a1, a2, b1, b2;  // SSIM numerator/denominator factors
};

// Single pass over one window: running sums, then moment identities.
WindowStats window_stats(const Image& a, const Image& b, const DssimConfig& cfg, int oy, int ox) {
    const int w = cfg.window;
    const double n = static_cast<double>(w) * w;
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int y = 0; y < w; ++y) {
        const double* pa = a.pixels().data() + static_cast<std::size_t>(oy + y) * a.width() + ox;
        const double* pb = b.pixels().data() + static_cast<std::size_t>(oy + y) * b.width() + ox;
        for (int x = 0; x < w; ++x) {
            sa += pa[x];
            sb += pb[x];
            saa += pa[x] * pa[x];
            sbb += pb[x] * pb[x];
            sab += pa[x] * pb[x];
        }
    }
    WindowStats s;
    s.mu_a = sa / n;
    s.mu_b = sb / n;
    double var_a = saa / n - s.mu_a * s.mu_a;
    double var_b = sbb / n - s.mu_b * s.mu_b;
    double cov = sab / n - s.mu_a * s.mu_b;
    s.a1 = 2.0 * s.mu_a * s.mu_b + cfg.c1;
    s.a2 = 2.0 * cov + cfg.c2;
    s.b1 = s.mu_a * s.mu_a + s.mu_b * s.mu_b + cfg.c1;
    s.b2 = var_a + var_b + cfg.c2;
    return s;
}

}  // namespace

double dssim(const Image& a, const Image& b, const DssimConfig& cfg) {
    WindowGrid g = make_grid(a, b, cfg);
    std::vector<double> ssim(static_cast<std::size_t>(g.count()));
    // one slot per window; the serial reduction below keeps the sum order
    // fixed regardless of thread count
#pragma omp parallel for schedule(static) if (g.count() >= 64)
    for (int wi = 0; wi < g.count(); ++wi) {
        int oy = (wi / g.nx) * cfg.stride;
        int ox = (wi % g.nx) * cfg.stride;
        WindowStats s = window_stats(a, b, cfg, oy, ox);
        ssim[static_cast<std::size_t>(wi)] = (s.a1 * s.a2) / (s.b1 * s.b2);
    }
    double total = 0.0;
    for (double v : ssim) total += v;
    return (1.0 - total / g.count()) / 2.0;
}

Perturbation dssim_gradient(const Image& a, const Image& b, const DssimConfig& cfg) {
    WindowGrid g = make_grid(a, b, cfg);
    const int w = cfg.window;
    const double n = static_cast<double>(w) * w;

    std::vector<WindowStats> stats(static_cast<std::size_t>(g.count()));
#pragma omp parallel for schedule(static) if (g.count() >= 64)
    for (int wi = 0; wi < g.count(); ++wi) {
        int oy = (wi / g.nx) * cfg.stride;
        int ox = (wi % g.nx) * cfg.stride;
        stats[static_cast<std::size_t>(wi)] = window_stats(a, b, cfg, oy, ox);
    }

    Perturbation grad(b.width(), b.height());
    const double scale = -1.0 / (2.0 * g.count());

    // Gather form: each pixel accumulates over the windows covering it, in a
    // fixed order, so the result does not depend on the thread count.
#pragma omp parallel for schedule(static) if (b.npixels() >= 1024)
    for (int p = 0; p < b.npixels(); ++p) {
        const int py = p / b.width();
        const int px = p % b.width();
        const double av = a.pixels()[static_cast<std::size_t>(p)];
        const double bv = b.pixels()[static_cast<std::size_t>(p)];

        auto cover = [&](int coord, int limit) {
            int lo = (coord - w) / cfg.stride + 1;
            if ((coord - w) < 0) lo = 0;  // integer division of negatives
            int hi = coord / cfg.stride;
            if (hi > limit - 1) hi = limit - 1;
            if (lo < 0) lo = 0;
            return std::pair<int, int>(lo, hi);
        };
        auto [ky_lo, ky_hi] = cover(py, g.ny);
        auto [kx_lo, kx_hi] = cover(px, g.nx);

        double acc = 0.0;
        for (int ky = ky_lo; ky <= ky_hi; ++ky) {
            for (int kx = kx_lo; kx <= kx_hi; ++kx) {
                const WindowStats& s = stats[static_cast<std::size_t>(ky) * g.nx + kx];
                const double da1 = 2.0 * s.mu_a / n;
                const double da2 = 2.0 * (av - s.mu_a) / n;
                const double db1 = 2.0 * s.mu_b / n;
                const double db2 = 2.0 * (bv - s.mu_b) / n;
                const double den = s.b1 * s.b2;
                const double ssim = (s.a1 * s.a2) / den;
                acc += ((da1 * s.a2 + s.a1 * da2) - ssim * (db1 * s.b2 + s.b1 * db2)) / den;
            }
        }
        grad.delta[static_cast<std::size_t>(p)] = scale * acc;
    }
    return grad;
}

}  // namespace oriole
