#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fwdest/process.hpp"
#include "fwdest/schedules.hpp"
#include "fwdest/sequence.hpp"

namespace fwdest {

/// Monte Carlo run description. Without a payoff the run scores full
/// next-symbol distributions by total-variation distance.
struct ExperimentConfig {
  explicit ExperimentConfig(ProcessSpec spec) : process(std::move(spec)) {}

  ProcessSpec process;
  ScheduleRule schedules;
  std::uint64_t horizon = 0;
  std::uint64_t replicates = 1;
  std::vector<std::uint64_t> eval_grid;  // empty: powers of two up to horizon, plus horizon
  std::vector<double> epsilons{0.05};
  std::optional<PayoffFunction> payoff;
  std::uint64_t base_seed = 0;
  unsigned workers = 1;
  bool wide = false;  // keep per-symbol vectors on the rows

  /// Throws ConfigError naming the offending field.
  void validate() const;
  std::vector<std::uint64_t> effective_grid() const;
};

std::vector<std::uint64_t> default_eval_grid(std::uint64_t horizon);

struct MetricsRow {
  std::uint64_t replicate = 0;
  std::uint64_t n = 0;
  std::uint64_t kappa = 0;
  std::uint64_t lambda = 0;
  bool abstained = true;
  double estimate_or_tv = 0.0;  // g_n, or the TV error in distribution mode
  double oracle_summary = 0.0;  // E(g(X_{n+1})|X_0^n), or the oracle's largest probability
  double abs_error = 0.0;
  double cesaro_avg = 0.0;      // mean of abs_error over all i < n
  std::vector<double> estimate_vector;  // wide / distribution mode only
  std::vector<double> oracle_vector;
};

struct TailEstimate {
  std::uint64_t n = 0;
  double epsilon = 0.0;
  double fraction = 0.0;
  double wilson_halfwidth = 0.0;
  std::uint64_t replicates = 0;
};

/// Invariants re-checked on every step of every replicate.
struct RunChecks {
  bool error_bounds = true;    // 0 <= error <= max g - min g (TV in [0, 1])
  bool estimate_range = true;  // non-abstained estimates within [min g, max g]
  bool threshold = true;       // kappa > 0 implies lambda >= J(n)
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;  // sorted by replicate, then n
  std::vector<TailEstimate> tails;
  RunChecks checks;
};

/// Runs every replicate through a streaming estimator and the exact oracle.
/// Output is a pure function of the config; `workers` only changes wall time.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Per-step error trace of one replicate: errors[i] = |g_i - E(g(X_{i+1})|X_0^i)| for i = 0..horizon.
std::vector<double> replicate_errors(const ExperimentConfig& cfg, std::uint64_t replicate);

/// 95% Wilson score half-width for `successes` out of `trials`.
double wilson_halfwidth(std::uint64_t successes, std::uint64_t trials);

std::vector<TailEstimate> tail_estimates(const std::vector<MetricsRow>& rows, std::span<const std::uint64_t> grid,
                                         std::span<const double> epsilons, std::uint64_t replicates);

enum class CheckStatus { Pass, Fail, Inconclusive, Skipped };
std::string to_string(CheckStatus s);

/// Successor-of-the-j-th-recurrence resampling: compares the law of
/// X_{n - tau^k_j(n) + 1 .. + block_length} with the stationary block law.
struct ResamplingReport {
  CheckStatus status = CheckStatus::Inconclusive;
  std::size_t k = 1, j = 1, block_length = 1;
  std::uint64_t n = 0;
  std::uint64_t usable = 0;
  std::uint64_t excluded = 0;
  double excluded_fraction = 0.0;
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double critical_value = 0.0;  // 99.9% chi-square quantile
  std::vector<double> expected;  // stationary block law, one entry per block code
  std::vector<std::uint64_t> observed;
  std::string message;
};

inline constexpr std::uint64_t kMinUsableReplicates = 50;

ResamplingReport check_lemma_resampling(const Process& process, std::size_t k, std::size_t j, std::uint64_t n,
                                        std::uint64_t replicates, std::uint64_t seed, std::size_t block_length = 1);

struct KappaRow {
  std::uint64_t n = 0;
  std::uint64_t cap = 0;        // K(n)
  std::uint64_t threshold = 0;  // J(n)
  std::uint64_t min_kappa = 0;
  double median_kappa = 0.0;
  double fraction_at_cap = 0.0;
};

struct KappaReport {
  CheckStatus status = CheckStatus::Inconclusive;
  std::vector<KappaRow> rows;
  std::uint64_t decisive_n = 0;
  double decisive_fraction = 0.0;
  std::string message;
};

inline constexpr double kKappaPassFraction = 0.95;

/// Tracks kappa along the grid. Passes when, at the largest grid n with K(n) >= 2,
/// more than 95% of replicates match the full cap. Skipped when the schedules do
/// not satisfy K -> inf, J -> inf, J/n -> 0.
KappaReport check_kappa_divergence(const Process& process, const Schedules& schedules, std::uint64_t horizon,
                                   std::uint64_t replicates, std::uint64_t seed,
                                   std::vector<std::uint64_t> grid = {});

struct ReturnTimeReport {
  CheckStatus status = CheckStatus::Inconclusive;
  std::uint64_t n = 0;
  std::uint64_t visits = 0;  // D
  std::uint64_t replicates = 0;
  std::uint64_t hits = 0;
  double frequency = 0.0;
  double bound = 0.0;   // D / n
  double margin = 0.0;  // 3 * sqrt(f (1 - f) / R)
  std::string message;
};

/// Estimates P(X_0^{k-1} = block and the block starts fewer than D times among
/// positions 0..n-1) and compares it with D / n.
ReturnTimeReport check_return_time_bound(const Process& process, std::uint64_t n, std::uint64_t visits,
                                         std::uint64_t replicates, std::span<const Symbol> block,
                                         std::uint64_t seed);

}  // namespace fwdest
