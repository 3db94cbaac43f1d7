#include "oriole/pca.hpp"

#include <cmath>
#include <sstream>

#include "oriole/csvfmt.hpp"
#include "oriole/errors.hpp"
#include "oriole/rng.hpp"

namespace oriole {

namespace {

constexpr double kTolerance = 1e-10;
constexpr int kMaxIterations = 10000;

// Largest eigenpair of symmetric C (n*n row-major) by power iteration.
// Returns the eigenvalue; v holds the unit eigenvector.
double power_iteration(const std::vector<double>& c, int n, std::vector<double>& v) {
    CounterRng rng(0xC0FFEEULL);
    v.assign(static_cast<std::size_t>(n), 0.0);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = rng.uniform(static_cast<std::uint64_t>(i), -1.0, 1.0);
        norm += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;

    std::vector<double> w(static_cast<std::size_t>(n));
    for (int it = 0; it < kMaxIterations; ++it) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j)
                acc += c[static_cast<std::size_t>(i) * n + j] * v[static_cast<std::size_t>(j)];
            w[static_cast<std::size_t>(i)] = acc;
        }
        double wn = 0.0;
        for (double x : w) wn += x * x;
        wn = std::sqrt(wn);
        if (wn == 0.0) return 0.0;  // v is in the null space: eigenvalue 0
        double diff = 0.0;
        for (int i = 0; i < n; ++i) {
            w[static_cast<std::size_t>(i)] /= wn;
            const double d = w[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i)];
            diff += d * d;
        }
        v = w;
        if (std::sqrt(diff) <= kTolerance) break;
    }
    double lambda = 0.0;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += c[static_cast<std::size_t>(i) * n + j] * v[static_cast<std::size_t>(j)];
        lambda += v[static_cast<std::size_t>(i)] * acc;
    }
    return lambda;
}

void fix_sign(std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    if (v[best] < 0.0)
        for (double& x : v) x = -x;
}

}  // namespace

PcaResult pca_project(const std::vector<std::pair<FeatureVector, std::string>>& features) {
    if (features.size() < 3) throw InputError("pca_project: need at least 3 feature vectors");
    const int d = static_cast<int>(features.front().first.size());
    for (const auto& [f, role] : features)
        if (static_cast<int>(f.size()) != d)
            throw DimensionError("pca_project: inconsistent feature lengths");

    std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
    for (const auto& [f, role] : features)
        for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] += f[static_cast<std::size_t>(j)];
    for (double& v : mean) v /= static_cast<double>(features.size());

    std::vector<double> cov(static_cast<std::size_t>(d) * d, 0.0);
    for (const auto& [f, role] : features)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                cov[static_cast<std::size_t>(i) * d + j] +=
                    (f[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)]) *
                    (f[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)]);
    for (double& v : cov) v /= static_cast<double>(features.size());

    PcaResult res;
    res.eigval1 = power_iteration(cov, d, res.component1);

    // deflate and repeat for the second component
    std::vector<double> deflated(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            deflated[static_cast<std::size_t>(i) * d + j] =
                cov[static_cast<std::size_t>(i) * d + j] -
                res.eigval1 * res.component1[static_cast<std::size_t>(i)] *
                    res.component1[static_cast<std::size_t>(j)];
    res.eigval2 = power_iteration(deflated, d, res.component2);

    if (res.eigval1 <= 0.0 || res.eigval2 <= res.eigval1 * 1e-12) {
        res.rank_deficient = true;
        res.eigval2 = std::max(res.eigval2, 0.0);
    }
    fix_sign(res.component1);
    fix_sign(res.component2);

    for (const auto& [f, role] : features) {
        PcaPoint p;
        p.role = role;
        for (int j = 0; j < d; ++j) {
            const double centered = f[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)];
            p.x += centered * res.component1[static_cast<std::size_t>(j)];
            if (!res.rank_deficient) p.y += centered * res.component2[static_cast<std::size_t>(j)];
        }
        res.points.push_back(std::move(p));
    }
    return res;
}

std::string pca_csv(const PcaResult& result) {
    std::ostringstream out;
    out << "# oriole pca v1\nx,y,role,rank_warning\n";
    for (const PcaPoint& p : result.points)
        out << csv::fmt(p.x) << "," << csv::fmt(p.y) << "," << p.role << ","
            << (result.rank_deficient ? 1 : 0) << "\n";
    return out.str();
}

}  // namespace oriole
