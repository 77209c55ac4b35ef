#include "fwdest/rng.hpp"

#include "fwdest/errors.hpp"

namespace fwdest {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t state = base;
  const std::uint64_t a = splitmix64(state);
  state = a ^ (index * 0xD1B54A32D192ED03ULL);
  return splitmix64(state);
}

Categorical::Categorical(std::span<const double> probs) {
  if (probs.empty()) throw DomainError("empty distribution");
  cumulative_.reserve(probs.size());
  double acc = 0.0;
  std::size_t positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cumulative_.push_back(acc);
    if (probs[i] > 0.0) {
      last_positive_ = static_cast<Symbol>(i);
      ++positive;
    }
  }
  if (positive == 0) throw DomainError("distribution has no positive mass");
  degenerate_ = positive == 1;
}

Symbol Categorical::sample(Rng& rng) const {
  if (degenerate_) return last_positive_;
  const double u = rng.uniform() * cumulative_.back();
  for (std::size_t i = 0; i < cumulative_.size(); ++i)
    if (u < cumulative_[i]) return static_cast<Symbol>(i);
  return last_positive_;
}

}  // namespace fwdest
