#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fwdest/estimator.hpp"
#include "fwdest/schedules.hpp"
#include "fwdest/sequence.hpp"

namespace fwdest {

/// Occurrence statistics of one k-block: how many times it ended at a position
/// whose successor has been observed, and what those successors were.
struct BlockStats {
  std::uint64_t count_with_successor = 0;
  std::span<const std::uint64_t> successor_histogram;
  std::int64_t last_end_position = -1;
};

/// Online forward estimator backed by an incremental occurrence index.
///
/// For every block length k <= k_max the index keeps, per k-block (encoded in
/// base |X| with the oldest symbol most significant), the histogram of symbols
/// that followed it. A push touches k_max entries; a query probes K(n) entries
/// and reads one histogram. Results are identical to the from-scratch
/// `estimate` / `estimate_distribution` on the same prefix.
///
/// k_max = K(horizon) is fixed at construction; pushing X_m with m > horizon
/// throws CapacityError. Single writer: not safe for concurrent mutation.
class StreamingEstimator {
 public:
  StreamingEstimator(Alphabet alphabet, std::uint64_t horizon, Schedules schedules);
  StreamingEstimator(Alphabet alphabet, std::uint64_t horizon);

  /// Appends x as the next symbol and returns the new sequence length.
  std::size_t push(Symbol x);

  EstimateResult current_estimate(const PayoffFunction& g) const;
  DistributionEstimate current_distribution() const;

  /// Stats of the k-block ending at the current position. Requires 1 <= k <= min(k_max, size()).
  BlockStats suffix_stats(std::size_t k) const;
  BlockStats stats(std::size_t k, std::uint64_t code) const;

  static std::uint64_t encode(std::span<const Symbol> block, std::size_t alphabet_size);

  const SymbolSequence& sequence() const noexcept { return seq_; }
  std::size_t size() const noexcept { return seq_.size(); }
  std::size_t k_max() const noexcept { return k_max_; }
  std::uint64_t horizon() const noexcept { return horizon_; }
  const Schedules& schedules() const noexcept { return schedules_; }

  /// Number of distinct blocks that have been recorded with a successor.
  std::size_t stored_blocks() const noexcept { return stored_blocks_; }

  /// Index entries touched by pushes and probes so far.
  std::uint64_t work_count() const noexcept { return push_work_ + query_work_; }

 private:
  struct Level {
    std::vector<std::uint64_t> counts;
    std::vector<std::uint64_t> histograms;
    std::vector<std::int64_t> last_end;
  };

  // kappa, lambda and the matched histogram for the current position.
  struct Match {
    std::uint64_t kappa = 0;
    std::uint64_t lambda = 0;
    std::span<const std::uint64_t> histogram;
  };
  Match match() const;

  SymbolSequence seq_;
  Schedules schedules_;
  std::uint64_t horizon_;
  std::size_t alphabet_size_;
  std::size_t k_max_;
  std::vector<Level> levels_;           // levels_[k-1] holds k-blocks
  std::vector<std::uint64_t> suffix_;   // suffix_[k] = code of the k-block ending at the last position
  std::vector<std::uint64_t> zeros_;
  std::size_t stored_blocks_ = 0;
  std::uint64_t push_work_ = 0;
  mutable std::uint64_t query_work_ = 0;
};

}  // namespace fwdest
