#include "oriole/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oriole/errors.hpp"
#include "oriole/rng.hpp"

namespace oriole {

void SyntheticSpec::validate() const {
    if (n_public_identities < 1 || n_attacker_identities < 1 || images_per_identity < 1)
        throw InputError("SyntheticSpec: identity and image counts must be >= 1");
    if (image_size < 8) throw InputError("SyntheticSpec: image_size must be >= 8");
    if (!(identity_signal > 0.0)) throw InputError("SyntheticSpec: identity_signal must be > 0");
    if (!(noise_sigma > 0.0)) throw InputError("SyntheticSpec: noise_sigma must be > 0");
}

void SplitSpec::validate() const {
    if (!(train_test_ratio > 0.0)) throw InputError("SplitSpec: train_test_ratio must be > 0");
    if (!(leak_ratio > 0.0) || leak_ratio > 1.0)
        throw InputError("SplitSpec: leak_ratio must be in (0, 1]");
}

namespace {
constexpr std::uint64_t kPatternPurpose = 0x7061747465726eULL;  // identity patterns
constexpr std::uint64_t kNoisePurpose = 0x6e6f697365ULL;        // sample noise
constexpr std::uint64_t kSplitPurpose = 0x73706c6974ULL;        // U_A / U_B split
constexpr std::uint64_t kLeakPurpose = 0x6c65616bULL;           // leak selection
constexpr int kSinusoids = 3;
}  // namespace

Image identity_base(const SyntheticSpec& spec, int identity) {
    spec.validate();
    const int s = spec.image_size;
    CounterRng rng(derive_seed(spec.seed, kPatternPurpose), static_cast<std::uint64_t>(identity));

    // low-frequency band: identity differences live mostly in window-scale
    // luminance, where the DSSIM budget is permissive
    double fx[kSinusoids], fy[kSinusoids], phase[kSinusoids], amp[kSinusoids];
    for (int t = 0; t < kSinusoids; ++t) {
        fx[t] = rng.uniform(4 * t + 0, 0.25, 0.75);
        fy[t] = rng.uniform(4 * t + 1, 0.25, 0.75);
        phase[t] = rng.uniform(4 * t + 2, 0.0, 6.283185307179586);
        amp[t] = rng.uniform(4 * t + 3, 0.5, 1.0);
    }

    std::vector<double> raw(static_cast<std::size_t>(s) * s);
    double sq = 0.0;
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            double v = 0.0;
            for (int t = 0; t < kSinusoids; ++t)
                v += amp[t] * std::sin(6.283185307179586 * (fx[t] * x + fy[t] * y) / s + phase[t]);
            raw[static_cast<std::size_t>(y) * s + x] = v;
            sq += v * v;
        }
    }
    // normalize to a common rms amplitude so identities carry equal energy
    const double rms = std::sqrt(sq / static_cast<double>(s * s));
    const double scale = rms > 1e-12 ? spec.identity_signal / rms : 0.0;
    std::vector<double> px(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        px[i] = std::clamp(0.5 + scale * raw[i], 0.0, 1.0);
    return Image::from_pixels(s, s, std::move(px));
}

DatasetBundle generate(const SyntheticSpec& spec) {
    spec.validate();
    const int n_identities = spec.n_public_identities + spec.n_attacker_identities + 1;
    const int s = spec.image_size;
    const std::size_t npx = static_cast<std::size_t>(s) * s;

    DatasetBundle bundle;
    bundle.n_public = spec.n_public_identities;
    bundle.n_attacker = spec.n_attacker_identities;
    bundle.user_label = spec.n_public_identities + spec.n_attacker_identities;

    CounterRng noise(derive_seed(spec.seed, kNoisePurpose));
    for (int k = 0; k < n_identities; ++k) {
        Image base = identity_base(spec, k);
        LabeledDataset* split = k < bundle.n_public                        ? &bundle.public_pool
                                : k < bundle.n_public + bundle.n_attacker ? &bundle.attacker_pool
                                                                          : &bundle.user;
        for (int i = 0; i < spec.images_per_identity; ++i) {
            std::vector<double> px(npx);
            const std::uint64_t img_ctr =
                (static_cast<std::uint64_t>(k) * spec.images_per_identity + i) * npx;
            for (std::size_t p = 0; p < npx; ++p)
                px[p] = std::clamp(base.pixels()[p] + spec.noise_sigma * noise.normal(img_ctr + p),
                                   0.0, 1.0);
            split->push_back(Image::from_pixels(s, s, std::move(px)), k);
        }
    }
    return bundle;
}

UserSplit split_user(const std::vector<Image>& user_images, const SplitSpec& split,
                     std::uint64_t seed) {
    split.validate();
    const std::size_t n = user_images.size();
    if (n < 2) throw InputError("split_user: need at least 2 user images");

    // |U_A| from the ratio r = |U_A| : |U_B|, at least one image on each side
    const double r = split.train_test_ratio;
    std::size_t n_train =
        static_cast<std::size_t>(std::lround(static_cast<double>(n) * r / (1.0 + r)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    deterministic_shuffle(order, CounterRng(derive_seed(seed, kSplitPurpose)));

    UserSplit out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i < n_train)
            out.train.push_back(user_images[order[i]]);
        else
            out.test.push_back(user_images[order[i]]);
    }

    std::vector<std::size_t> leak_order(n_train);
    std::iota(leak_order.begin(), leak_order.end(), 0);
    deterministic_shuffle(leak_order, CounterRng(derive_seed(seed, kLeakPurpose)));
    const std::size_t n_leak =
        static_cast<std::size_t>(std::ceil(split.leak_ratio * static_cast<double>(n_train)));
    for (std::size_t i = 0; i < n_leak; ++i) out.leaked.push_back(out.train[leak_order[i]]);
    return out;
}

}  // namespace oriole
