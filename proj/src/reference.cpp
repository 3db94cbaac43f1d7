#include "oriole/ref/reference.hpp"

#include <algorithm>
#include <cmath>

#include "oriole/errors.hpp"

namespace oriole::ref {

double dssim_ref(const Image& a, const Image& b, const DssimConfig& cfg) {
    cfg.validate();
    if (!a.same_shape(b)) throw DimensionError("dssim_ref: image shapes differ");
    if (a.width() < cfg.window || a.height() < cfg.window)
        throw DimensionError("dssim_ref: image smaller than SSIM window");

    const int w = cfg.window;
    const double n = static_cast<double>(w) * w;
    double ssim_sum = 0.0;
    int count = 0;
    for (int oy = 0; oy + w <= a.height(); oy += cfg.stride) {
        for (int ox = 0; ox + w <= a.width(); ox += cfg.stride) {
            double mu_a = 0.0, mu_b = 0.0;
            for (int y = 0; y < w; ++y)
                for (int x = 0; x < w; ++x) {
                    mu_a += a.at(oy + y, ox + x);
                    mu_b += b.at(oy + y, ox + x);
                }
            mu_a /= n;
            mu_b /= n;
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (int y = 0; y < w; ++y)
                for (int x = 0; x < w; ++x) {
                    const double da = a.at(oy + y, ox + x) - mu_a;
                    const double db = b.at(oy + y, ox + x) - mu_b;
                    var_a += da * da;
                    var_b += db * db;
                    cov += da * db;
                }
            var_a /= n;
            var_b /= n;
            cov /= n;
            const double num = (2.0 * mu_a * mu_b + cfg.c1) * (2.0 * cov + cfg.c2);
            const double den =
                (mu_a * mu_a + mu_b * mu_b + cfg.c1) * (var_a + var_b + cfg.c2);
            ssim_sum += num / den;
            ++count;
        }
    }
    return (1.0 - ssim_sum / count) / 2.0;
}

FeatureVector forward_ref(const EmbeddingModel& model, const Image& x) {
    const Architecture& a = model.arch();
    if (x.width() != a.input_size || x.height() != a.input_size)
        throw DimensionError("forward_ref: image does not match the architecture input size");
    const double* p = model.parameters().data();

    auto conv = [&](const std::vector<double>& in, int in_ch, int in_s, const double* w,
                    const double* b, int out_ch) {
        const int out_s = (in_s + 2 * a.pad - a.kernel) / a.stride + 1;
        std::vector<double> out(static_cast<std::size_t>(out_ch) * out_s * out_s);
        for (int oc = 0; oc < out_ch; ++oc)
            for (int oy = 0; oy < out_s; ++oy)
                for (int ox = 0; ox < out_s; ++ox) {
                    double acc = b[oc];
                    for (int ic = 0; ic < in_ch; ++ic)
                        for (int ky = 0; ky < a.kernel; ++ky)
                            for (int kx = 0; kx < a.kernel; ++kx) {
                                const int iy = oy * a.stride + ky - a.pad;
                                const int ix = ox * a.stride + kx - a.pad;
                                if (iy < 0 || iy >= in_s || ix < 0 || ix >= in_s) continue;
                                acc += w[((static_cast<std::size_t>(oc) * in_ch + ic) * a.kernel + ky) * a.kernel + kx] *
                                       in[(static_cast<std::size_t>(ic) * in_s + iy) * in_s + ix];
                            }
                    out[(static_cast<std::size_t>(oc) * out_s + oy) * out_s + ox] = acc;
                }
        return out;
    };

    std::vector<double> centered(x.pixels().size());
    for (std::size_t i = 0; i < centered.size(); ++i) centered[i] = x.pixels()[i] - 0.5;
    std::vector<double> h1 = conv(centered, 1, a.input_size, p + a.conv1_w_off(),
                                  p + a.conv1_b_off(), a.conv1_maps);
    for (double& v : h1) v = std::max(v, 0.0);
    std::vector<double> h2 = conv(h1, a.conv1_maps, a.conv1_out(), p + a.conv2_w_off(),
                                  p + a.conv2_b_off(), a.conv2_maps);
    for (double& v : h2) v = std::max(v, 0.0);

    FeatureVector out(static_cast<std::size_t>(a.feature_dim));
    for (int j = 0; j < a.feature_dim; ++j) {
        double acc = p[a.fc_b_off() + static_cast<std::size_t>(j)];
        for (int f = 0; f < a.flat_dim(); ++f)
            acc += p[a.fc_w_off() + static_cast<std::size_t>(j) * a.flat_dim() + f] *
                   h2[static_cast<std::size_t>(f)];
        out[static_cast<std::size_t>(j)] = acc;
    }
    return out;
}

std::vector<std::pair<int, double>> top_m_ref(const std::map<int, double>& distances,
                                              int m, int exclude_label) {
    std::vector<std::pair<int, double>> all;
    for (const auto& [label, d] : distances)
        if (label != exclude_label) all.emplace_back(label, d);
    std::stable_sort(all.begin(), all.end(), [](const auto& lhs, const auto& rhs) {
        if (lhs.second != rhs.second) return lhs.second > rhs.second;
        return lhs.first < rhs.first;
    });
    if (m < 1 || static_cast<std::size_t>(m) > all.size())
        throw InputError("top_m_ref: m out of range");
    all.resize(static_cast<std::size_t>(m));
    return all;
}

EigenResult jacobi_eigen_ref(const std::vector<double>& symmetric, int n) {
    std::vector<double> a = symmetric;
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;
    auto A = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
    auto V = [&](int r, int c) -> double& { return v[static_cast<std::size_t>(r) * n + c]; };

    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-24) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (A(p, q) == 0.0) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int lhs, int rhs) { return A(lhs, lhs) > A(rhs, rhs); });

    EigenResult res;
    for (int idx : order) {
        res.values.push_back(A(idx, idx));
        std::vector<double> col(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) col[static_cast<std::size_t>(k)] = V(k, idx);
        res.vectors.push_back(std::move(col));
    }
    return res;
}

}  // namespace oriole::ref
