#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fwdest/sequence.hpp"

namespace fwdest {

/// Identifier recorded in manifests. Bump the version if any sampling detail changes.
inline constexpr const char* kRngAlgorithm = "mt19937_64/u53-inverse-cdf/v1";

/// SplitMix64 finalizer step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for replicate `index` of a run seeded with `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// 64-bit Mersenne Twister with a fixed 53-bit mantissa mapping to [0, 1).
/// Both pieces are fully specified, so streams are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Inverse-CDF sampler over symbols. Point masses are returned without drawing.
class Categorical {
 public:
  explicit Categorical(std::span<const double> probs);

  Symbol sample(Rng& rng) const;

 private:
  std::vector<double> cumulative_;
  Symbol last_positive_ = 0;
  bool degenerate_ = false;
};

}  // namespace fwdest
