#include "fwdest/streaming.hpp"

#include <algorithm>
#include <string>

#include "fwdest/errors.hpp"

namespace fwdest {

namespace {

constexpr std::uint64_t kMaxBlocksPerLevel = std::uint64_t{1} << 24;

}  // namespace

StreamingEstimator::StreamingEstimator(Alphabet alphabet, std::uint64_t horizon)
    : StreamingEstimator(alphabet, horizon, Schedules::defaults(alphabet.size())) {}

StreamingEstimator::StreamingEstimator(Alphabet alphabet, std::uint64_t horizon, Schedules schedules)
    : seq_(std::move(alphabet)),
      schedules_(std::move(schedules)),
      horizon_(horizon),
      alphabet_size_(seq_.alphabet_size()) {
  k_max_ = schedules_.K(horizon_ == 0 ? 1 : horizon_);
  levels_.resize(k_max_);
  std::uint64_t blocks = 1;
  for (std::size_t k = 1; k <= k_max_; ++k) {
    blocks *= alphabet_size_;
    if (blocks > kMaxBlocksPerLevel)
      throw CapacityError("block table for k = " + std::to_string(k) + " exceeds index capacity");
    auto& level = levels_[k - 1];
    level.counts.assign(blocks, 0);
    level.histograms.assign(blocks * alphabet_size_, 0);
    level.last_end.assign(blocks, -1);
  }
  suffix_.assign(k_max_ + 1, 0);
  zeros_.assign(alphabet_size_, 0);
}

std::uint64_t StreamingEstimator::encode(std::span<const Symbol> block, std::size_t alphabet_size) {
  std::uint64_t code = 0;
  for (Symbol s : block) code = code * alphabet_size + s;
  return code;
}

std::size_t StreamingEstimator::push(Symbol x) {
  const std::size_t m = seq_.size();
  if (m > horizon_)
    throw CapacityError("position " + std::to_string(m) + " exceeds index horizon " + std::to_string(horizon_));
  seq_.push_back(x);

  // Every block ending at m-1 now has x as its successor.
  const std::size_t depth = std::min<std::size_t>(k_max_, m);
  for (std::size_t k = 1; k <= depth; ++k) {
    auto& level = levels_[k - 1];
    const std::uint64_t code = suffix_[k];
    if (level.counts[code]++ == 0) ++stored_blocks_;
    ++level.histograms[code * alphabet_size_ + x];
    level.last_end[code] = static_cast<std::int64_t>(m) - 1;
  }
  push_work_ += depth;

  for (std::size_t k = k_max_; k >= 2; --k) suffix_[k] = suffix_[k - 1] * alphabet_size_ + x;
  if (k_max_ >= 1) suffix_[1] = x;
  return seq_.size();
}

StreamingEstimator::Match StreamingEstimator::match() const {
  Match out;
  out.histogram = zeros_;
  if (seq_.size() < 2) return out;
  const std::uint64_t n = seq_.size() - 1;
  const std::uint64_t cap = schedules_.K(n);
  if (cap > k_max_)
    throw CapacityError("K(" + std::to_string(n) + ") = " + std::to_string(cap) + " exceeds indexed k_max " +
                        std::to_string(k_max_));
  const std::uint64_t threshold = schedules_.J(n);
  for (std::uint64_t k = cap; k >= 1; --k) {
    ++query_work_;
    if (k > n + 1) continue;
    const auto& level = levels_[k - 1];
    const std::uint64_t code = suffix_[k];
    if (level.counts[code] >= threshold) {
      out.kappa = k;
      out.lambda = level.counts[code];
      out.histogram = std::span<const std::uint64_t>(level.histograms).subspan(code * alphabet_size_, alphabet_size_);
      break;
    }
  }
  return out;
}

EstimateResult StreamingEstimator::current_estimate(const PayoffFunction& g) const {
  if (g.size() != alphabet_size_) throw DomainError("payoff size does not match alphabet");
  const auto m = match();
  return detail::finish_estimate(m.histogram, m.kappa, m.lambda, g);
}

DistributionEstimate StreamingEstimator::current_distribution() const {
  const auto m = match();
  return detail::finish_distribution(m.histogram, m.kappa, m.lambda);
}

BlockStats StreamingEstimator::stats(std::size_t k, std::uint64_t code) const {
  if (k == 0 || k > k_max_) throw DomainError("block length " + std::to_string(k) + " not indexed");
  const auto& level = levels_[k - 1];
  if (code >= level.counts.size()) throw DomainError("block code out of range");
  BlockStats s;
  s.count_with_successor = level.counts[code];
  s.successor_histogram = std::span<const std::uint64_t>(level.histograms).subspan(code * alphabet_size_, alphabet_size_);
  s.last_end_position = level.last_end[code];
  return s;
}

BlockStats StreamingEstimator::suffix_stats(std::size_t k) const {
  if (k == 0 || k > k_max_ || k > seq_.size())
    throw DomainError("no indexed block of length " + std::to_string(k) + " ends at the current position");
  return stats(k, suffix_[k]);
}

}  // namespace fwdest
