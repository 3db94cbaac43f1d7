#pragma once

#include <cstdint>

#include "oriole/dataset.hpp"

namespace oriole {

/// Synthetic identity generator settings. Each identity is a deterministic
/// low-frequency sinusoid mixture (normalized to a fixed rms amplitude), and
/// samples add clamped Gaussian pixel noise.
struct SyntheticSpec {
    int n_public_identities = 20;
    int n_attacker_identities = 10;
    int images_per_identity = 100;
    int image_size = 32;
    double identity_signal = 0.08;  // rms amplitude of the per-identity pattern
    double noise_sigma = 0.02;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Leak/split settings. train_test_ratio is |U_A| : |U_B| as odds (1.0 means
/// a 50/50 split); leak_ratio is the fraction R of U_A the attacker holds.
struct SplitSpec {
    double train_test_ratio = 1.0;
    double leak_ratio = 1.0;

    void validate() const;
};

/// Deterministic base pattern of one identity (the noise-free limit).
Image identity_base(const SyntheticSpec& spec, int identity);

/// Fully deterministic dataset: public pool, attacker pool, one user.
DatasetBundle generate(const SyntheticSpec& spec);

struct UserSplit {
    std::vector<Image> train;   // U_A
    std::vector<Image> test;    // U_B
    std::vector<Image> leaked;  // first ceil(R*|U_A|) of a seeded shuffle of U_A
};

UserSplit split_user(const std::vector<Image>& user_images, const SplitSpec& split,
                     std::uint64_t seed);

}  // namespace oriole
