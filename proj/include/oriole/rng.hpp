#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace oriole {

// Counter-based generator built on the splitmix64 finalizer. Every draw is a
// pure function of (seed, stream, counter), so values can be pulled in any
// order from any thread and still come out bit-identical across runs and
// platforms.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t counter) const {
        std::uint64_t z = mix(seed_ + 0x9e3779b97f4a7c15ULL * (stream_ + 1));
        return mix(z ^ (counter + 0x632be59bd9b4e019ULL));
    }

    /// Uniform in [0, 1).
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform(counter);
    }

    /// Standard normal via Box-Muller; consumes counters 2c and 2c+1.
    double normal(std::uint64_t counter) const {
        double u1 = (static_cast<double>(bits(2 * counter) >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
        double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Integer in [0, n); fixed-point multiply keeps the draw platform-stable.
    std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(bits(counter)) * n) >> 64);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

/// Child seed for an independent named purpose.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
    return CounterRng::mix(CounterRng::mix(seed ^ 0x5851f42d4c957f2dULL) + purpose);
}

/// Deterministic Fisher-Yates shuffle driven by a counter stream.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, const CounterRng& rng) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(v.size() - 1 - i, i + 1));
        std::swap(v[i], v[j]);
    }
}

}  // namespace oriole
