#include "fwdest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

#include "fwdest/errors.hpp"
#include "fwdest/estimator.hpp"
#include "fwdest/rng.hpp"
#include "fwdest/streaming.hpp"

namespace fwdest {

namespace {

constexpr double kWilsonZ = 1.959963984540054;
constexpr double kChiSquareLevel = 0.999;

// Runs task(i) for i in [0, count) on up to `workers` threads; rethrows the first failure.
template <typename Task>
void parallel_for(std::uint64_t count, unsigned workers, Task&& task) {
  const unsigned threads = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, count)));
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::uint64_t i; (i = next.fetch_add(1)) < count;) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

struct ReplicateOutput {
  std::vector<MetricsRow> rows;
  RunChecks checks;
};

double total_variation(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

ReplicateOutput run_replicate(const ExperimentConfig& cfg, const Process& process, const Schedules& sch,
                              std::span<const std::uint64_t> grid, std::uint64_t replicate,
                              std::vector<double>* trace) {
  ReplicateOutput out;
  const std::uint64_t horizon = cfg.horizon;
  const auto seq = process.generate(derive_seed(cfg.base_seed, replicate), horizon);
  StreamingEstimator est(process.alphabet(), horizon, sch);
  auto oracle = process.filter();
  const bool scalar = cfg.payoff.has_value();
  const double g_lo = scalar ? cfg.payoff->min() : 0.0;
  const double g_hi = scalar ? cfg.payoff->max() : 1.0;
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(g_lo), std::abs(g_hi)));
  const bool keep_vectors = cfg.wide || !scalar;

  double error_sum = 0.0;
  std::size_t next_grid = 0;
  out.rows.reserve(grid.size());
  if (trace) trace->reserve(horizon + 1);

  for (std::uint64_t n = 0; n <= horizon; ++n) {
    const Symbol x = seq[n];
    est.push(x);
    oracle.observe(x);
    const auto truth = oracle.predictive();

    std::uint64_t kappa = 0, lambda = 0;
    bool abstained = true;
    double estimate = 0.0, target = 0.0, error = 0.0;
    if (scalar) {
      const auto r = est.current_estimate(*cfg.payoff);
      kappa = r.kappa;
      lambda = r.lambda;
      abstained = r.abstained;
      estimate = r.value;
      for (std::size_t s = 0; s < truth.size(); ++s) target += truth[s] * (*cfg.payoff)(static_cast<Symbol>(s));
      error = std::abs(estimate - target);
      if (!abstained && (estimate < g_lo || estimate > g_hi)) out.checks.estimate_range = false;
      if (error > (g_hi - g_lo) + slack) out.checks.error_bounds = false;
    } else {
      const auto d = est.current_distribution();
      kappa = d.kappa;
      lambda = d.lambda;
      abstained = d.abstained;
      error = total_variation(d.probs, truth);
      estimate = error;
      target = *std::max_element(truth.begin(), truth.end());
      if (error > 1.0 + slack) out.checks.error_bounds = false;
    }
    if (kappa > 0 && lambda < sch.J(n)) out.checks.threshold = false;

    if (next_grid < grid.size() && grid[next_grid] == n) {
      MetricsRow row;
      row.replicate = replicate;
      row.n = n;
      row.kappa = kappa;
      row.lambda = lambda;
      row.abstained = abstained;
      row.estimate_or_tv = estimate;
      row.oracle_summary = target;
      row.abs_error = error;
      row.cesaro_avg = n == 0 ? 0.0 : error_sum / static_cast<double>(n);
      if (keep_vectors) {
        row.estimate_vector = est.current_distribution().probs;
        row.oracle_vector.assign(truth.begin(), truth.end());
      }
      out.rows.push_back(std::move(row));
      ++next_grid;
    }
    if (trace) trace->push_back(error);
    error_sum += error;
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Inconclusive: return "inconclusive";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

std::vector<std::uint64_t> default_eval_grid(std::uint64_t horizon) {
  std::vector<std::uint64_t> grid;
  for (std::uint64_t p = 1; p <= horizon; p *= 2) {
    grid.push_back(p);
    if (p > horizon / 2) break;
  }
  if (horizon >= 1 && (grid.empty() || grid.back() != horizon)) grid.push_back(horizon);
  return grid;
}

void ExperimentConfig::validate() const {
  if (horizon < 1) throw ConfigError("experiment.horizon", "must be at least 1");
  if (replicates < 1) throw ConfigError("experiment.replicates", "must be at least 1");
  if (workers < 1) throw ConfigError("experiment.workers", "must be at least 1");
  for (std::size_t i = 0; i < eval_grid.size(); ++i) {
    const std::string f = "experiment.eval_grid[" + std::to_string(i) + "]";
    if (eval_grid[i] < 1 || eval_grid[i] > horizon) throw ConfigError(f, "must lie in [1, horizon]");
    if (i > 0 && eval_grid[i] <= eval_grid[i - 1]) throw ConfigError(f, "grid must be strictly increasing");
  }
  const bool indicator_like = !payoff || (payoff->min() >= 0.0 && payoff->max() <= 1.0);
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const std::string f = "experiment.epsilons[" + std::to_string(i) + "]";
    if (!(epsilons[i] > 0.0)) throw ConfigError(f, "must be positive");
    if (indicator_like && epsilons[i] > 1.0) throw ConfigError(f, "must lie in (0, 1]");
  }
  if (payoff && payoff->size() != process.alphabet.size())
    throw ConfigError("experiment.payoff", "expected one value per alphabet symbol");
}

std::vector<std::uint64_t> ExperimentConfig::effective_grid() const {
  return eval_grid.empty() ? default_eval_grid(horizon) : eval_grid;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Process process(cfg.process);
  const Schedules sch = cfg.schedules.build(process.alphabet_size());
  const auto grid = cfg.effective_grid();

  std::vector<ReplicateOutput> outputs(cfg.replicates);
  parallel_for(cfg.replicates, cfg.workers, [&](std::uint64_t r) {
    outputs[r] = run_replicate(cfg, process, sch, grid, r, nullptr);
  });

  ExperimentResult result;
  result.rows.reserve(cfg.replicates * grid.size());
  for (auto& o : outputs) {
    result.checks.error_bounds &= o.checks.error_bounds;
    result.checks.estimate_range &= o.checks.estimate_range;
    result.checks.threshold &= o.checks.threshold;
    std::move(o.rows.begin(), o.rows.end(), std::back_inserter(result.rows));
  }
  result.tails = tail_estimates(result.rows, grid, cfg.epsilons, cfg.replicates);
  return result;
}

std::vector<double> replicate_errors(const ExperimentConfig& cfg, std::uint64_t replicate) {
  cfg.validate();
  const Process process(cfg.process);
  const Schedules sch = cfg.schedules.build(process.alphabet_size());
  std::vector<double> trace;
  run_replicate(cfg, process, sch, {}, replicate, &trace);
  return trace;
}

double wilson_halfwidth(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  const double r = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / r;
  const double z2 = kWilsonZ * kWilsonZ;
  return kWilsonZ * std::sqrt(p * (1.0 - p) / r + z2 / (4.0 * r * r)) / (1.0 + z2 / r);
}

std::vector<TailEstimate> tail_estimates(const std::vector<MetricsRow>& rows, std::span<const std::uint64_t> grid,
                                         std::span<const double> epsilons, std::uint64_t replicates) {
  std::vector<TailEstimate> tails;
  for (auto n : grid) {
    for (double eps : epsilons) {
      std::uint64_t exceed = 0, seen = 0;
      for (const auto& row : rows)
        if (row.n == n) {
          ++seen;
          if (row.abs_error > eps) ++exceed;
        }
      TailEstimate t;
      t.n = n;
      t.epsilon = eps;
      t.replicates = seen == 0 ? replicates : seen;
      t.fraction = seen == 0 ? 0.0 : static_cast<double>(exceed) / static_cast<double>(seen);
      t.wilson_halfwidth = wilson_halfwidth(exceed, seen);
      tails.push_back(t);
    }
  }
  return tails;
}

ResamplingReport check_lemma_resampling(const Process& process, std::size_t k, std::size_t j, std::uint64_t n,
                                        std::uint64_t replicates, std::uint64_t seed, std::size_t block_length) {
  if (k < 1) throw ConfigError("lemmas.resampling.k", "must be at least 1");
  if (j < 1) throw ConfigError("lemmas.resampling.j", "must be at least 1");
  if (block_length < 1 || block_length > 3)
    throw ConfigError("lemmas.resampling.block_length", "must lie in [1, 3]");

  ResamplingReport rep;
  rep.k = k;
  rep.j = j;
  rep.n = n;
  rep.block_length = block_length;
  const std::size_t a = process.alphabet_size();
  std::size_t cells = 1;
  for (std::size_t i = 0; i < block_length; ++i) cells *= a;
  rep.observed.assign(cells, 0);
  rep.expected.resize(cells);
  std::vector<Symbol> block(block_length);
  for (std::size_t c = 0; c < cells; ++c) {
    std::size_t code = c;
    for (std::size_t i = block_length; i-- > 0;) {
      block[i] = static_cast<Symbol>(code % a);
      code /= a;
    }
    rep.expected[c] = process.block_probability(block);
  }

  for (std::uint64_t r = 0; r < replicates; ++r) {
    const auto seq = process.generate(derive_seed(seed, r), n + block_length - 1);
    if (k > n + 1) {
      ++rep.excluded;
      continue;
    }
    const auto times = recurrence_times(seq, n, k, j);
    if (times.size() < j) {
      ++rep.excluded;
      continue;
    }
    const std::uint64_t start = n - times[j - 1] + 1;
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < block_length; ++i) code = code * a + seq[start + i];
    ++rep.observed[code];
    ++rep.usable;
  }
  rep.excluded_fraction = replicates == 0 ? 0.0 : static_cast<double>(rep.excluded) / static_cast<double>(replicates);

  if (rep.usable < kMinUsableReplicates) {
    rep.status = CheckStatus::Inconclusive;
    rep.message = "only " + std::to_string(rep.usable) + " usable replicates (need " +
                  std::to_string(kMinUsableReplicates) + ")";
    return rep;
  }

  std::size_t positive = 0;
  bool impossible = false;
  const double total = static_cast<double>(rep.usable);
  for (std::size_t c = 0; c < cells; ++c) {
    if (rep.expected[c] > 0.0) {
      ++positive;
      const double e = total * rep.expected[c];
      const double d = static_cast<double>(rep.observed[c]) - e;
      rep.statistic += d * d / e;
    } else if (rep.observed[c] > 0) {
      impossible = true;
    }
  }
  rep.degrees_of_freedom = positive == 0 ? 0 : positive - 1;
  if (impossible) {
    rep.status = CheckStatus::Fail;
    rep.statistic = INFINITY;
    rep.message = "resampled a block of stationary probability zero";
    return rep;
  }
  if (rep.degrees_of_freedom == 0) {
    rep.status = CheckStatus::Pass;
    rep.message = "single admissible block; all resampled blocks equal it";
    return rep;
  }
  const boost::math::chi_squared dist(static_cast<double>(rep.degrees_of_freedom));
  rep.critical_value = boost::math::quantile(dist, kChiSquareLevel);
  rep.status = rep.statistic <= rep.critical_value ? CheckStatus::Pass : CheckStatus::Fail;
  return rep;
}

KappaReport check_kappa_divergence(const Process& process, const Schedules& schedules, std::uint64_t horizon,
                                   std::uint64_t replicates, std::uint64_t seed, std::vector<std::uint64_t> grid) {
  KappaReport rep;
  if (!schedules.divergent) {
    rep.status = CheckStatus::Skipped;
    rep.message = "hypothesis violated: schedules must satisfy K(n) -> inf, J(n) -> inf and J(n)/n -> 0 (" +
                  schedules.description + ")";
    return rep;
  }
  if (horizon < 1) throw ConfigError("lemmas.kappa.horizon", "must be at least 1");
  if (grid.empty()) grid = default_eval_grid(horizon);
  for (auto n : grid)
    if (n < 1 || n > horizon) throw ConfigError("lemmas.kappa.eval_grid", "entries must lie in [1, horizon]");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<std::vector<std::uint64_t>> kappas(grid.size(), std::vector<std::uint64_t>(replicates));
  for (std::uint64_t r = 0; r < replicates; ++r) {
    const auto seq = process.generate(derive_seed(seed, r), horizon);
    StreamingEstimator est(process.alphabet(), horizon, schedules);
    std::size_t g = 0;
    for (std::uint64_t n = 0; n <= horizon && g < grid.size(); ++n) {
      est.push(seq[n]);
      if (grid[g] == n) kappas[g++][r] = est.current_distribution().kappa;
    }
  }

  for (std::size_t g = 0; g < grid.size(); ++g) {
    KappaRow row;
    row.n = grid[g];
    row.cap = schedules.K(row.n);
    row.threshold = schedules.J(row.n);
    const auto& ks = kappas[g];
    std::vector<double> as_double(ks.begin(), ks.end());
    row.min_kappa = ks.empty() ? 0 : *std::min_element(ks.begin(), ks.end());
    row.median_kappa = median(as_double);
    const auto at_cap = std::count(ks.begin(), ks.end(), row.cap);
    row.fraction_at_cap = ks.empty() ? 0.0 : static_cast<double>(at_cap) / static_cast<double>(ks.size());
    rep.rows.push_back(row);
  }

  const auto decisive = std::find_if(rep.rows.rbegin(), rep.rows.rend(), [](const KappaRow& r) { return r.cap >= 2; });
  if (decisive == rep.rows.rend() || replicates == 0) {
    rep.status = CheckStatus::Inconclusive;
    rep.message = "no grid point with K(n) >= 2";
    return rep;
  }
  rep.decisive_n = decisive->n;
  rep.decisive_fraction = decisive->fraction_at_cap;
  rep.status = rep.decisive_fraction > kKappaPassFraction ? CheckStatus::Pass : CheckStatus::Fail;
  return rep;
}

ReturnTimeReport check_return_time_bound(const Process& process, std::uint64_t n, std::uint64_t visits,
                                         std::uint64_t replicates, std::span<const Symbol> block,
                                         std::uint64_t seed) {
  if (n < 1) throw ConfigError("lemmas.return_time.n", "must be at least 1");
  if (visits < 1) throw ConfigError("lemmas.return_time.D", "must be at least 1");
  if (block.empty()) throw ConfigError("lemmas.return_time.block", "must contain at least one symbol");
  if (replicates < 1) throw ConfigError("lemmas.return_time.replicates", "must be at least 1");
  for (Symbol s : block)
    if (s >= process.alphabet_size()) throw ConfigError("lemmas.return_time.block", "symbol outside alphabet");

  ReturnTimeReport rep;
  rep.n = n;
  rep.visits = visits;
  rep.replicates = replicates;
  const std::size_t k = block.size();
  for (std::uint64_t r = 0; r < replicates; ++r) {
    const auto seq = process.generate(derive_seed(seed, r), n + k - 2);
    const auto x = seq.view();
    auto in_block = [&](std::uint64_t i) { return std::equal(block.begin(), block.end(), x.begin() + i); };
    if (!in_block(0)) continue;
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < n; ++i)
      if (in_block(i)) ++count;
    if (count < visits) ++rep.hits;
  }
  rep.frequency = static_cast<double>(rep.hits) / static_cast<double>(replicates);
  rep.bound = static_cast<double>(visits) / static_cast<double>(n);
  rep.margin = 3.0 * std::sqrt(rep.frequency * (1.0 - rep.frequency) / static_cast<double>(replicates));
  rep.status = rep.frequency <= rep.bound + rep.margin ? CheckStatus::Pass : CheckStatus::Fail;
  return rep;
}

}  // namespace fwdest
