#include "fwdest/verify.hpp"

#include <algorithm>
#include <sstream>

#include "fwdest/estimator.hpp"
#include "fwdest/rng.hpp"
#include "fwdest/schedules.hpp"
#include "fwdest/streaming.hpp"

namespace fwdest {

namespace {

std::vector<Symbol> random_sequence(Rng& rng, std::size_t alphabet_size, std::size_t length, int style) {
  std::vector<Symbol> x(length);
  auto draw = [&] { return static_cast<Symbol>(rng.next() % alphabet_size); };
  for (std::size_t i = 0; i < length; ++i) {
    switch (style) {
      case 0:  // uniform i.i.d.
        x[i] = draw();
        break;
      case 1:  // sticky: repeat the previous symbol most of the time
        x[i] = (i > 0 && rng.uniform() < 0.8) ? x[i - 1] : draw();
        break;
      default:  // short period with noise
        x[i] = rng.uniform() < 0.9 ? static_cast<Symbol>((i % 3) % alphabet_size) : draw();
        break;
    }
  }
  return x;
}

Schedules stress_schedules(std::size_t alphabet_size) {
  ScheduleRule rule;
  rule.cap = ScheduleRule::CapKind::Constant;
  rule.cap_value = 3;
  rule.threshold = ScheduleRule::ThresholdKind::Power;
  rule.threshold_exponent = 0.3;
  return rule.build(alphabet_size);
}

Schedules off_by_one(Schedules s) {
  auto j = s.min_occurrences;
  s.min_occurrences = [j](std::uint64_t n) { return j(n) + 1; };
  s.description += " [threshold +1 injected]";
  return s;
}

std::string format_probs(const std::vector<double>& p) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << "]";
  return os.str();
}

std::string format(const DistributionEstimate& d) {
  std::ostringstream os;
  os << "kappa=" << d.kappa << " lambda=" << d.lambda << " abstained=" << d.abstained
     << " probs=" << format_probs(d.probs);
  return os.str();
}

// Empty when every quantity agrees at position n.
std::string compare_at(const SymbolSequence& seq, std::size_t n, const Schedules& sch,
                       const StreamingEstimator& est, const PayoffFunction& g) {
  const auto core_d = estimate_distribution(seq, n, sch);
  const auto fast_d = est.current_distribution();
  if (!(core_d == fast_d)) return "distribution: from-scratch {" + format(core_d) + "} vs streaming {" + format(fast_d) + "}";

  const auto core_e = estimate(seq, n, g, sch);
  const auto fast_e = est.current_estimate(g);
  if (!(core_e == fast_e)) {
    std::ostringstream os;
    os.precision(17);
    os << "estimate: from-scratch value=" << core_e.value << " kappa=" << core_e.kappa << " vs streaming value="
       << fast_e.value << " kappa=" << fast_e.kappa;
    return os.str();
  }
  if (n >= 1 && core_d.kappa != kappa(seq, n, sch)) return "kappa operation disagrees with estimate";

  const std::size_t depth = std::min<std::size_t>(est.k_max(), n + 1);
  for (std::size_t k = 1; k <= depth; ++k) {
    const auto count = est.suffix_stats(k).count_with_successor;
    const auto expected = lambda(seq, n, k);
    if (count != expected)
      return "occurrence count for k=" + std::to_string(k) + ": streaming " + std::to_string(count) +
             " vs lambda " + std::to_string(expected);
  }
  if (core_d.kappa > 0) {
    const auto times = recurrence_times(seq, n, core_d.kappa, SIZE_MAX);
    if (times.size() != core_d.lambda) return "recurrence-time list length differs from lambda";
    std::vector<std::uint64_t> hist(seq.alphabet_size(), 0);
    for (auto t : times) ++hist[seq[n - t + 1]];
    const auto stored = est.suffix_stats(core_d.kappa).successor_histogram;
    if (!std::equal(hist.begin(), hist.end(), stored.begin(), stored.end()))
      return "successor histogram differs from recurrence-time successors";
  }
  return {};
}

}  // namespace

std::string VerifyReport::describe() const {
  std::ostringstream os;
  os << (passed ? "PASS" : "FAIL") << ": " << cases << " cases, " << prefixes << " prefixes checked";
  if (counterexample) {
    const auto& c = *counterexample;
    os << "\ncounterexample: case " << c.case_index << ", |X|=" << c.alphabet_size << ", n=" << c.n << ", "
       << c.schedules << "\nprefix:";
    for (auto s : c.prefix) os << ' ' << s;
    os << "\n" << c.detail;
  }
  return os.str();
}

VerifyReport verify_equivalence(const VerifyOptions& options) {
  VerifyReport report;
  for (std::uint64_t c = 0; c < options.cases; ++c) {
    Rng rng(derive_seed(options.seed, c));
    const std::size_t a = 2 + c % 3;
    const int style = static_cast<int>((c / 3) % 3);
    const Alphabet alphabet = Alphabet::numbered(a);
    const SymbolSequence seq(alphabet, random_sequence(rng, a, options.max_n + 1, style));
    std::vector<double> payoff(a);
    for (auto& v : payoff) v = rng.uniform() * 4.0 - 2.0;
    const PayoffFunction g(payoff);

    const Schedules sch = c % 2 == 0 ? Schedules::defaults(a) : stress_schedules(a);
    const Schedules fast_sch = options.inject_off_by_one ? off_by_one(sch) : sch;
    StreamingEstimator est(alphabet, options.max_n, fast_sch);

    // A later case only matters if it fails earlier than the best counterexample so far.
    const std::uint64_t limit = report.counterexample ? report.counterexample->n : options.max_n + 1;
    for (std::uint64_t n = 0; n <= options.max_n && n < limit; ++n) {
      est.push(seq[n]);
      ++report.prefixes;
      auto diff = compare_at(seq, n, sch, est, g);
      if (!diff.empty()) {
        report.passed = false;
        Counterexample cx;
        cx.case_index = c;
        cx.alphabet_size = a;
        cx.schedules = fast_sch.description;
        cx.n = n;
        cx.prefix.assign(seq.view().begin(), seq.view().begin() + static_cast<std::ptrdiff_t>(n + 1));
        cx.detail = std::move(diff);
        report.counterexample = std::move(cx);
        break;
      }
    }
    ++report.cases;
  }
  return report;
}

}  // namespace fwdest
