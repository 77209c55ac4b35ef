#include "fwdest/estimator.hpp"

#include <algorithm>
#include <string>

#include "fwdest/errors.hpp"

namespace fwdest {

namespace {

void require_position(const SymbolSequence& seq, std::size_t n) {
  if (n >= seq.size())
    throw DomainError("position " + std::to_string(n) + " outside sequence of length " +
                      std::to_string(seq.size()));
}

bool block_matches(std::span<const Symbol> x, std::size_t end, std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i)
    if (x[end - i] != x[n - i]) return false;
  return true;
}

// Counts prior full occurrences of the k-block ending at n, stopping at `limit`.
std::uint64_t count_occurrences(std::span<const Symbol> x, std::size_t n, std::size_t k, std::uint64_t limit) {
  std::uint64_t found = 0;
  for (std::size_t end = n; end-- > k - 1 && found < limit;)
    if (block_matches(x, end, n, k)) ++found;
  return found;
}

std::vector<std::uint64_t> successor_histogram(std::span<const Symbol> x, std::size_t alphabet_size,
                                               std::size_t n, std::size_t k) {
  std::vector<std::uint64_t> hist(alphabet_size, 0);
  for (std::size_t end = n; end-- > k - 1;)
    if (block_matches(x, end, n, k)) ++hist[x[end + 1]];
  return hist;
}

struct MatchedContext {
  std::uint64_t kappa = 0;
  std::uint64_t lambda = 0;
  std::vector<std::uint64_t> histogram;
};

MatchedContext match_context(const SymbolSequence& seq, std::size_t n, const Schedules& sch) {
  MatchedContext m;
  m.histogram.assign(seq.alphabet_size(), 0);
  if (n == 0) return m;
  m.kappa = kappa(seq, n, sch);
  if (m.kappa == 0) return m;
  m.histogram = successor_histogram(seq.view(), seq.alphabet_size(), n, m.kappa);
  for (auto c : m.histogram) m.lambda += c;
  return m;
}

}  // namespace

std::vector<std::uint64_t> recurrence_times(const SymbolSequence& seq, std::size_t n, std::size_t k,
                                            std::size_t count) {
  require_position(seq, n);
  if (k == 0 || k > n + 1)
    throw DomainError("block length " + std::to_string(k) + " invalid at position " + std::to_string(n));
  std::vector<std::uint64_t> times;
  const auto x = seq.view();
  for (std::size_t end = n; end-- > k - 1 && times.size() < count;)
    if (block_matches(x, end, n, k)) times.push_back(n - end);
  return times;
}

std::uint64_t kappa(const SymbolSequence& seq, std::size_t n, const Schedules& sch) {
  require_position(seq, n);
  if (n == 0) throw DomainError("kappa requires n >= 1");
  const std::uint64_t cap = sch.K(n);
  const std::uint64_t threshold = sch.J(n);
  for (std::uint64_t k = cap; k >= 1; --k) {
    if (k > n + 1) continue;
    if (count_occurrences(seq.view(), n, k, threshold) >= threshold) return k;
  }
  return 0;
}

std::uint64_t lambda(const SymbolSequence& seq, std::size_t n, std::size_t k) {
  require_position(seq, n);
  if (k == 0 || k > n + 1)
    throw DomainError("block length " + std::to_string(k) + " invalid at position " + std::to_string(n));
  return count_occurrences(seq.view(), n, k, UINT64_MAX);
}

EstimateResult estimate(const SymbolSequence& seq, std::size_t n, const PayoffFunction& g,
                        const Schedules& sch) {
  require_position(seq, n);
  if (g.size() != seq.alphabet_size()) throw DomainError("payoff size does not match alphabet");
  const auto m = match_context(seq, n, sch);
  return detail::finish_estimate(m.histogram, m.kappa, m.lambda, g);
}

DistributionEstimate estimate_distribution(const SymbolSequence& seq, std::size_t n, const Schedules& sch) {
  require_position(seq, n);
  const auto m = match_context(seq, n, sch);
  return detail::finish_distribution(m.histogram, m.kappa, m.lambda);
}

double d_star(std::span<const Symbol> x, std::span<const Symbol> y, std::size_t depth) {
  if (depth == 0) throw DomainError("d_star depth must be positive");
  if (x.size() < depth || y.size() < depth) throw DomainError("d_star inputs shorter than depth");
  double d = 0.0;
  double w = 0.5;
  for (std::size_t i = 0; i < depth; ++i, w *= 0.5)
    if (x[i] != y[i]) d += w;
  return d;
}

namespace detail {

EstimateResult finish_estimate(std::span<const std::uint64_t> histogram, std::uint64_t kappa,
                               std::uint64_t lambda, const PayoffFunction& g) {
  if (kappa == 0 || lambda == 0) return EstimateResult{};
  double total = 0.0;
  for (std::size_t x = 0; x < histogram.size(); ++x)
    if (histogram[x] != 0) total += static_cast<double>(histogram[x]) * g(static_cast<Symbol>(x));
  // A weighted average cannot leave [min g, max g]; clamp away rounding spill.
  const double value = std::clamp(total / static_cast<double>(lambda), g.min(), g.max());
  return EstimateResult{value, kappa, lambda, false};
}

DistributionEstimate finish_distribution(std::span<const std::uint64_t> histogram, std::uint64_t kappa,
                                         std::uint64_t lambda) {
  DistributionEstimate d;
  d.probs.assign(histogram.size(), 0.0);
  if (kappa == 0 || lambda == 0) return d;
  d.kappa = kappa;
  d.lambda = lambda;
  d.abstained = false;
  for (std::size_t x = 0; x < histogram.size(); ++x)
    d.probs[x] = static_cast<double>(histogram[x]) / static_cast<double>(lambda);
  return d;
}

}  // namespace detail
}  // namespace fwdest
