// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fwdest/estimator.hpp"
#include "fwdest/harness.hpp"
#include "fwdest/output.hpp"
#include "fwdest/process.hpp"
#include "fwdest/schedules.hpp"
#include "fwdest/streaming.hpp"
#include "naive_oracle.hpp"

using namespace fwdest;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ProcessSpec markov37() {
  return {Alphabet::numbered(2), MarkovModel{1, Matrix::from_rows({{0.7, 0.3}, {0.3, 0.7}})}};
}

ProcessSpec order2() {
  return {Alphabet::numbered(2), MarkovModel{2, Matrix::from_rows({{0.9, 0.1}, {0.6, 0.4}, {0.4, 0.6}, {0.1, 0.9}})}};
}

ExperimentConfig scalar_run(ProcessSpec spec, std::uint64_t horizon, std::uint64_t replicates,
                            std::vector<std::uint64_t> grid, std::uint64_t seed) {
  ExperimentConfig cfg{std::move(spec)};
  cfg.horizon = horizon;
  cfg.replicates = replicates;
  cfg.eval_grid = std::move(grid);
  cfg.payoff = PayoffFunction::indicator(2, 1);
  cfg.base_seed = seed;
  return cfg;
}

std::vector<const MetricsRow*> rows_at(const ExperimentResult& res, std::uint64_t n, std::uint64_t max_rep = ~0ull) {
  std::vector<const MetricsRow*> out;
  for (const auto& r : res.rows)
    if (r.n == n && r.replicate < max_rep) out.push_back(&r);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double mean_error(const std::vector<const MetricsRow*>& rows) {
  double s = 0.0;
  for (auto* r : rows) s += r->abs_error;
  return s / static_cast<double>(rows.size());
}

// 1. Brute-force scan vs streaming index, every prefix.
Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20050101);
  ScheduleRule stress;
  stress.cap = ScheduleRule::CapKind::Constant;
  stress.cap_value = 3;
  stress.threshold_exponent = 0.3;
  std::uint64_t prefixes = 0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t a = 2 + c % 3;
    const auto sch = c % 2 == 0 ? Schedules::defaults(a) : stress.build(a);
    const std::uint64_t max_n = 2000;
    std::vector<double> gv(a);
    for (auto& v : gv) v = std::uniform_real_distribution<double>(-2.0, 3.0)(rng);
    const PayoffFunction g(gv);
    StreamingEstimator est(Alphabet::numbered(a), max_n, sch);
    std::vector<std::uint32_t> raw;
    const int style = (c / 3) % 3;
    for (std::uint64_t n = 0; n <= max_n; ++n) {
      Symbol x;
      if (style == 0) x = static_cast<Symbol>(rng() % a);
      else if (style == 1) x = n > 0 && rng() % 10 < 8 ? raw.back() : static_cast<Symbol>(rng() % a);
      else x = static_cast<Symbol>((n % (2 + c % 5)) % a);
      raw.push_back(x);
      est.push(x);
      const auto want = testing::naive_estimate(raw, n, a, sch, gv);
      const auto got = est.current_estimate(g);
      const auto dist = est.current_distribution();
      bool ok = got.kappa == want.kappa && got.lambda == want.lambda && got.abstained == want.abstained &&
                got.value == want.value && dist.probs == want.probs && dist.kappa == want.kappa;
      if (ok && n > 0) {
        const std::uint64_t k = std::min<std::uint64_t>(sch.K(n), n + 1);
        const auto taus = testing::naive_taus(raw, n, k);
        ok = recurrence_times(est.sequence(), n, k, taus.size() + 1) == taus;
        if (ok && k <= est.k_max()) ok = est.suffix_stats(k).count_with_successor == taus.size();
      }
      if (!ok) return {false, "mismatch in case " + std::to_string(c) + " at n=" + std::to_string(n)};
      ++prefixes;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {secs < 60.0, std::to_string(prefixes) + " prefixes identical in " + fmt("%.1f s", secs) + " (limit 60 s)"};
}

// 2 and 4 share the first-order chain run.
struct MarkovRun {
  ExperimentResult res;
  std::uint64_t replicates = 20;
};

const MarkovRun& markov_run() {
  static const MarkovRun run{run_experiment(scalar_run(markov37(), 100000, 20, {1000, 100000}, 1001)), 20};
  return run;
}

Outcome pointwise_markov() {
  const auto& res = markov_run().res;
  const auto fin = rows_at(res, 100000), early = rows_at(res, 1000);
  std::vector<double> ef, ee;
  for (auto* r : fin) ef.push_back(r->abs_error);
  for (auto* r : early) ee.push_back(r->abs_error);
  const double m = mean_error(fin), mf = median(ef), me = median(ee);
  return {m < 0.02 && mf < me, "mean error at 1e5 " + fmt("%.5f", m) + " (< 0.02); median " + fmt("%.5f", mf) +
                                   " at 1e5 vs " + fmt("%.5f", me) + " at 1e3"};
}

Outcome cesaro_markov() {
  const auto& res = markov_run().res;
  const auto fin = rows_at(res, 100000), early = rows_at(res, 1000);
  double worst = 0.0;
  bool ok = fin.size() == 20 && early.size() == 20;
  for (std::size_t i = 0; ok && i < fin.size(); ++i) {
    worst = std::max(worst, fin[i]->cesaro_avg);
    ok = fin[i]->cesaro_avg < 0.05 && fin[i]->cesaro_avg < early[i]->cesaro_avg;
  }
  return {ok, "largest Cesaro average at 1e5 " + fmt("%.5f", worst) + " (< 0.05, and below each n=1e3 value)"};
}

// 3 and 5 share the order-2 run; criterion 3 reads its first 10 replicates.
constexpr std::uint64_t kOrder2Horizon = std::uint64_t{1} << 21;

const ExperimentResult& order2_run() {
  static const ExperimentResult res =
      run_experiment(scalar_run(order2(), kOrder2Horizon, 50, {kOrder2Horizon / 128, kOrder2Horizon}, 2002));
  return res;
}

Outcome growing_context() {
  const auto fin = rows_at(order2_run(), kOrder2Horizon, 10);
  std::size_t at_two = 0;
  for (auto* r : fin) at_two += r->kappa == 2;
  const double m = mean_error(fin);
  const double frac = static_cast<double>(at_two) / static_cast<double>(fin.size());
  return {fin.size() == 10 && m < 0.05 && frac >= 0.95,
          "mean error at 2^21 " + fmt("%.5f", m) + " (< 0.05); kappa = 2 in " + fmt("%.0f%%", 100 * frac) +
              " of 10 replicates (>= 95%)"};
}

Outcome weak_tail() {
  const auto& res = order2_run();
  const std::vector<std::uint64_t> grid{kOrder2Horizon / 128, kOrder2Horizon};
  const std::vector<double> eps{0.05};
  const auto tails = tail_estimates(res.rows, grid, eps, 50);
  const auto& early = tails[0];
  const auto& fin = tails[1];
  return {fin.fraction <= 0.1 && fin.fraction < early.fraction,
          "tail fraction at 2^21 " + fmt("%.3f", fin.fraction) + " +/- " + fmt("%.3f", fin.wilson_halfwidth) +
              " (<= 0.1), at 2^14 " + fmt("%.3f", early.fraction) + " +/- " + fmt("%.3f", early.wilson_halfwidth)};
}

Outcome resampling() {
  const Process coin({Alphabet::numbered(2), IidModel{{0.5, 0.5}}});
  const Process constant({Alphabet::numbered(2), IidModel{{1.0, 0.0}}});
  const Process chain(markov37());
  const auto a = check_lemma_resampling(coin, 1, 1, 100, 5000, 61);
  const auto b = check_lemma_resampling(constant, 1, 1, 100, 5000, 62);
  const auto c = check_lemma_resampling(chain, 2, 3, 200, 5000, 63);
  const bool ok = a.status == CheckStatus::Pass && b.status == CheckStatus::Pass && b.observed[1] == 0 &&
                  b.observed[0] == b.usable && c.status == CheckStatus::Pass;
  return {ok, "coin chi2 " + fmt("%.3f", a.statistic) + " / " + fmt("%.3f", a.critical_value) + "; constant " +
                  std::to_string(b.observed[0]) + " of " + std::to_string(b.usable) + " equal; chain chi2 " +
                  fmt("%.3f", c.statistic) + " / " + fmt("%.3f", c.critical_value)};
}

Outcome return_time() {
  const Process coin({Alphabet::numbered(2), IidModel{{0.5, 0.5}}});
  const std::vector<Symbol> block{1};
  const auto r = check_return_time_bound(coin, 100, 30, 20000, block, 71);
  return {r.status == CheckStatus::Pass, "frequency " + fmt("%.2e", r.frequency) + " vs bound " +
                                             fmt("%.2f", r.bound) + " + " + fmt("%.2e", r.margin)};
}

Outcome schedule_examples() {
  const bool ok = schedule_K(1024, 2) == 1 && schedule_K(1u << 20, 2) == 2 && schedule_K(1u << 30, 2) == 3 &&
                  schedule_K(5, 2) == 1 && schedule_J(1) == 1 && schedule_J(100) == 10 && schedule_J(101) == 11;
  return {ok, "K(1024)=" + std::to_string(schedule_K(1024, 2)) + " K(2^20)=" + std::to_string(schedule_K(1u << 20, 2)) +
                  " K(2^30)=" + std::to_string(schedule_K(1u << 30, 2)) + " K(5)=" + std::to_string(schedule_K(5, 2)) +
                  " J(1)=" + std::to_string(schedule_J(1)) + " J(100)=" + std::to_string(schedule_J(100)) +
                  " J(101)=" + std::to_string(schedule_J(101))};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "fwdest_acceptance_det";
  fs::remove_all(root);
  const auto doc = nlohmann::json::parse(R"({
    "process": {"type": "hmm", "hidden_transition": [[0.9, 0.1], [0.2, 0.8]],
                "emission": [[0.8, 0.1, 0.1], [0.1, 0.3, 0.6]]},
    "experiment": {"horizon": 20000, "replicates": 12, "seed": 5, "epsilons": [0.02, 0.05]}})");
  simulate(doc, root / "a", {std::nullopt, 1u, true});
  simulate(doc, root / "b", {std::nullopt, 1u, true});
  simulate(doc, root / "c", {std::nullopt, 8u, true});
  bool ok = true;
  for (const char* f : {"metrics.csv", "tails.csv"}) {
    const auto a = slurp(root / "a" / f);
    ok = ok && !a.empty() && a == slurp(root / "b" / f) && a == slurp(root / "c" / f);
  }
  const auto bytes = fs::file_size(root / "a" / "metrics.csv");
  fs::remove_all(root);
  return {ok, "metrics.csv (" + std::to_string(bytes) + " bytes) and tails.csv identical across reruns and workers 1/8"};
}

Outcome invariants() {
  std::mt19937_64 rng(4242);
  const std::size_t cases = 10000;
  std::size_t range = 0, threshold = 0, sums = 0, monotone = 0, dominance = 0;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t a = 2 + rng() % 3;
    const std::uint64_t len = 1 + rng() % 300;
    SymbolSequence seq(Alphabet::numbered(a));
    for (std::uint64_t i = 0; i < len; ++i)
      seq.push_back(rng() % 4 == 0 || i == 0 ? static_cast<Symbol>(rng() % a) : seq[i - 1 - rng() % std::min<std::uint64_t>(i, 3)]);
    const std::uint64_t n = rng() % len;
    const auto sch = Schedules::defaults(a);
    std::vector<double> gv(a);
    for (auto& v : gv) v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const PayoffFunction g(gv);

    const auto e = estimate(seq, n, g, sch);
    range += e.abstained ? e.value == 0.0 : (e.value >= g.min() && e.value <= g.max());
    threshold += e.kappa == 0 || (n > 0 && e.lambda >= sch.J(n));

    const auto d = estimate_distribution(seq, n, sch);
    double total = 0.0;
    bool nonneg = true;
    for (double p : d.probs) {
      total += p;
      nonneg = nonneg && p >= 0.0;
    }
    sums += nonneg && (d.abstained ? total == 0.0 : std::abs(total - 1.0) <= 1e-12);

    const std::size_t k = 1 + rng() % std::min<std::uint64_t>(n + 1, 4);
    const auto taus = recurrence_times(seq, n, k, 1000);
    monotone += std::adjacent_find(taus.begin(), taus.end(), std::greater_equal<>()) == taus.end() &&
                (taus.empty() || taus.back() <= n - k + 1);
    dominance += k > n || lambda(seq, n, k + 1) <= lambda(seq, n, k);
  }
  const bool ok = range == cases && threshold == cases && sums == cases && monotone == cases && dominance == cases;
  return {ok, "range " + std::to_string(range) + ", threshold " + std::to_string(threshold) + ", sum-to-one " +
                  std::to_string(sums) + ", tau monotone " + std::to_string(monotone) + ", suffix dominance " +
                  std::to_string(dominance) + " of " + std::to_string(cases)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 oracle equivalence (200 sequences, n <= 2000)", oracle_equivalence},
      {"2 pointwise error, first-order chain", pointwise_markov},
      {"3 growing context, order-2 chain", growing_context},
      {"4 Cesaro average, first-order chain", cesaro_markov},
      {"5 weak consistency tail, order-2 chain", weak_tail},
      {"6 resampling law (three configurations)", resampling},
      {"7 return-time bound", return_time},
      {"8 schedule examples", schedule_examples},
      {"9 determinism across reruns and workers", determinism},
      {"10 estimator invariants (10^4 cases)", invariants},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
