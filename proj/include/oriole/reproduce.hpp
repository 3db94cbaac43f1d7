#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "oriole/sweep.hpp"

namespace oriole {

/// Committed experiment configurations. table1() is the flagship comparison
/// setup (20 public + 10 attacker identities + 1 user with 100 images split
/// 50/50); sweep_base() is a lighter dataset used by the trend sweeps.
namespace configs {
ExperimentConfig table1(std::uint64_t seed);
ExperimentConfig sweep_base(std::uint64_t seed);
ExperimentConfig fig6(std::uint64_t seed);
}  // namespace configs

/// Emits every figure/table CSV plus datasets, models, PGM dumps, and audit
/// logs under out_dir. Fully deterministic in the seed: two runs with the
/// same seed produce byte-identical trees.
void reproduce_all(std::uint64_t seed, const std::string& out_dir, std::ostream& log);

}  // namespace oriole
