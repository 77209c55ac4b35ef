#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fwdest/schedules.hpp"
#include "fwdest/sequence.hpp"

namespace fwdest {

/// Forward estimate g_n together with the matched context length (kappa) and the
/// number of prior occurrences averaged over (lambda). An abstained result has
/// kappa == lambda == 0 and value 0.
struct EstimateResult {
  double value = 0.0;
  std::uint64_t kappa = 0;
  std::uint64_t lambda = 0;
  bool abstained = true;

  bool operator==(const EstimateResult&) const = default;
};

/// Estimated next-symbol distribution: the successor histogram of the matched
/// block divided by lambda, or the zero vector when abstaining.
struct DistributionEstimate {
  std::vector<double> probs;
  std::uint64_t kappa = 0;
  std::uint64_t lambda = 0;
  bool abstained = true;

  bool operator==(const DistributionEstimate&) const = default;
};

// From-scratch evaluators. Each scans X_0..X_n directly; cost O(n * K(n)).
// Positions are zero-based and n indexes the last observed symbol.

/// Backward shifts t_1 < t_2 < ... at which the k-block ending at n reappears,
/// keeping only occurrences that lie fully inside X_0..X_n. At most `count` entries.
std::vector<std::uint64_t> recurrence_times(const SymbolSequence& seq, std::size_t n, std::size_t k,
                                            std::size_t count);

/// Longest k <= K(n) whose k-block ending at n occurred at least J(n) times before; 0 if none.
std::uint64_t kappa(const SymbolSequence& seq, std::size_t n, const Schedules& sch);

/// Number of full in-segment prior occurrences of the k-block ending at n.
std::uint64_t lambda(const SymbolSequence& seq, std::size_t n, std::size_t k);

EstimateResult estimate(const SymbolSequence& seq, std::size_t n, const PayoffFunction& g,
                        const Schedules& sch);

DistributionEstimate estimate_distribution(const SymbolSequence& seq, std::size_t n, const Schedules& sch);

/// Truncated d* distance between two pasts, where coordinate i is the symbol i
/// steps back: sum_{i<depth} 2^{-i-1} [x_i != y_i]. The neglected tail is at most 2^{-depth}.
double d_star(std::span<const Symbol> x, std::span<const Symbol> y, std::size_t depth);

namespace detail {

/// Shared arithmetic for turning a successor histogram into an estimate, so the
/// from-scratch and streaming paths round identically.
EstimateResult finish_estimate(std::span<const std::uint64_t> histogram, std::uint64_t kappa,
                               std::uint64_t lambda, const PayoffFunction& g);
DistributionEstimate finish_distribution(std::span<const std::uint64_t> histogram, std::uint64_t kappa,
                                         std::uint64_t lambda);

}  // namespace detail
}  // namespace fwdest
