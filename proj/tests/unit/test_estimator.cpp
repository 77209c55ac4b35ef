#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../support/naive_oracle.hpp"
#include "fwdest/errors.hpp"
#include "fwdest/estimator.hpp"

using namespace fwdest;
using fwdest::testing::naive_estimate;
using fwdest::testing::naive_taus;

namespace {

SymbolSequence binary(std::vector<Symbol> xs) { return SymbolSequence(Alphabet::numbered(2), xs); }

SymbolSequence constant_zero(std::size_t length) { return binary(std::vector<Symbol>(length, 0)); }

}  // namespace

TEST(Alphabet, RejectsDegenerate) {
  EXPECT_THROW(Alphabet({"a"}), DomainError);
  EXPECT_THROW(Alphabet({"a", "a"}), DomainError);
  const Alphabet ab({"a", "b"});
  EXPECT_EQ(ab.find("b"), Symbol{1});
  EXPECT_FALSE(ab.find("c").has_value());
}

TEST(SymbolSequence, RejectsInvalidSymbols) {
  SymbolSequence s(Alphabet::numbered(3));
  s.push_back(2);
  EXPECT_THROW(s.push_back(3), DomainError);
  EXPECT_EQ(s.size(), 1u);
}

TEST(RecurrenceTimes, Examples) {
  const auto s = binary({0, 1, 0, 1, 0});
  EXPECT_EQ(recurrence_times(s, 4, 1, 5), (std::vector<std::uint64_t>{2, 4}));
  EXPECT_EQ(recurrence_times(s, 4, 2, 5), (std::vector<std::uint64_t>{2}));
  EXPECT_EQ(recurrence_times(constant_zero(4), 3, 1, 10), (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(recurrence_times(constant_zero(4), 3, 1, 2), (std::vector<std::uint64_t>{1, 2}));
}

TEST(RecurrenceTimes, OverlappingMatchesCount) {
  // "00" ending at 4 recurs at shifts 1, 2, 3 (overlapping windows).
  EXPECT_EQ(recurrence_times(constant_zero(5), 4, 2, 10), (std::vector<std::uint64_t>{1, 2, 3}));
}

TEST(RecurrenceTimes, DomainErrors) {
  const auto s = binary({0, 1, 0});
  EXPECT_THROW(recurrence_times(s, 2, 4, 1), DomainError);
  EXPECT_THROW(recurrence_times(s, 3, 1, 1), DomainError);
  EXPECT_THROW(recurrence_times(s, 2, 0, 1), DomainError);
  EXPECT_NO_THROW(recurrence_times(s, 2, 3, 1));
}

TEST(Kappa, Examples) {
  const auto sch = Schedules::defaults(2);
  EXPECT_EQ(kappa(binary({0, 1, 0, 1, 0}), 4, sch), 1u);
  EXPECT_EQ(kappa(binary({0, 1}), 1, sch), 0u);
  EXPECT_EQ(kappa(constant_zero(11), 10, sch), 1u);
  EXPECT_THROW(kappa(binary({0, 1}), 0, sch), DomainError);
}

TEST(Lambda, Examples) {
  EXPECT_EQ(lambda(binary({0, 1, 0, 1, 0}), 4, 1), 2u);
  EXPECT_EQ(lambda(constant_zero(11), 10, 1), 10u);
  EXPECT_EQ(lambda(binary({0, 1}), 1, 1), 0u);
  EXPECT_THROW(lambda(binary({0, 1}), 1, 3), DomainError);
}

TEST(Estimate, Examples) {
  const auto sch = Schedules::defaults(2);
  const auto one = PayoffFunction::indicator(2, 1);
  EXPECT_EQ(estimate(binary({0, 1, 0, 1, 0}), 4, one, sch), (EstimateResult{1.0, 1, 2, false}));
  EXPECT_EQ(estimate(binary({0, 1}), 1, one, sch), (EstimateResult{0.0, 0, 0, true}));
  EXPECT_EQ(estimate(constant_zero(11), 10, PayoffFunction::indicator(2, 0), sch), (EstimateResult{1.0, 1, 10, false}));
}

TEST(Estimate, ZeroPositionAbstains) {
  const auto r = estimate(binary({1}), 0, PayoffFunction::constant(2, 7.0), Schedules::defaults(2));
  EXPECT_TRUE(r.abstained);
  EXPECT_EQ(r.value, 0.0);
}

TEST(EstimateDistribution, Examples) {
  const auto sch = Schedules::defaults(2);
  const auto d = estimate_distribution(binary({0, 1, 0, 1, 0}), 4, sch);
  EXPECT_EQ(d.probs, (std::vector<double>{0.0, 1.0}));
  EXPECT_FALSE(d.abstained);

  const auto none = estimate_distribution(binary({0, 1}), 1, sch);
  EXPECT_TRUE(none.abstained);
  EXPECT_EQ(none.probs, (std::vector<double>{0.0, 0.0}));

  const auto seq = binary({0, 0, 1, 0, 0, 1, 0, 0, 1, 0});
  const auto expect = naive_estimate({0, 0, 1, 0, 0, 1, 0, 0, 1, 0}, 9, 2, sch, {0.0, 1.0});
  const auto got = estimate_distribution(seq, 9, sch);
  EXPECT_EQ(got.kappa, expect.kappa);
  EXPECT_EQ(got.lambda, expect.lambda);
  EXPECT_EQ(got.probs, expect.probs);
  // Frozen from the brute-force scan: block "0" recurs 6 times, successors 0,1,0,1,0,1.
  EXPECT_EQ(got.lambda, 6u);
  EXPECT_EQ(got.probs, (std::vector<double>{0.5, 0.5}));
}

TEST(DStar, Examples) {
  const std::vector<Symbol> x(20, 0), y(20, 1);
  EXPECT_EQ(d_star(x, x, 20), 0.0);
  std::vector<Symbol> z = x;
  z[0] = 1;
  EXPECT_EQ(d_star(x, z, 1), 0.5);
  EXPECT_EQ(d_star(x, z, 20), 0.5);
  EXPECT_EQ(d_star(x, y, 20), 1.0 - std::ldexp(1.0, -20));
  EXPECT_THROW(d_star(x, y, 0), DomainError);
  EXPECT_THROW(d_star(x, y, 21), DomainError);
}

// Randomized properties against the brute-force reference.
class EstimatorProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{12345};

  std::vector<Symbol> random_sequence(std::size_t a, std::size_t len) {
    std::vector<Symbol> x(len);
    const bool sticky = rng() % 2;
    for (std::size_t i = 0; i < len; ++i)
      x[i] = (sticky && i > 0 && rng() % 4 != 0) ? x[i - 1] : static_cast<Symbol>(rng() % a);
    return x;
  }

  Schedules random_schedules(std::size_t a) {
    ScheduleRule r;
    if (rng() % 2) {
      r.cap = ScheduleRule::CapKind::Constant;
      r.cap_value = 1 + rng() % 4;
    }
    if (rng() % 2) {
      r.threshold = ScheduleRule::ThresholdKind::Constant;
      r.threshold_value = 1 + rng() % 5;
    }
    return r.build(a);
  }
};

TEST_F(EstimatorProperties, MatchesNaiveReference) {
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t a = 2 + rng() % 3;
    const auto x = random_sequence(a, 1 + rng() % 120);
    const SymbolSequence seq(Alphabet::numbered(a), x);
    const auto sch = random_schedules(a);
    std::vector<double> g(a);
    for (auto& v : g) v = static_cast<double>(static_cast<int>(rng() % 200) - 100) / 7.0;
    const PayoffFunction payoff(g);
    for (std::size_t n = 0; n < x.size(); ++n) {
      for (std::size_t k = 1; k <= std::min<std::size_t>(4, n + 1); ++k)
        ASSERT_EQ(recurrence_times(seq, n, k, SIZE_MAX), naive_taus(x, n, k));
      const auto ref = naive_estimate(x, n, a, sch, g);
      const auto e = estimate(seq, n, payoff, sch);
      ASSERT_EQ(e.kappa, ref.kappa);
      ASSERT_EQ(e.lambda, ref.lambda);
      ASSERT_EQ(e.abstained, ref.abstained);
      ASSERT_EQ(e.value, ref.value);
      ASSERT_EQ(estimate_distribution(seq, n, sch).probs, ref.probs);
    }
  }
}

TEST_F(EstimatorProperties, Invariants) {
  for (int iter = 0; iter < 10000; ++iter) {
    const std::size_t a = 2 + rng() % 3;
    const auto x = random_sequence(a, 2 + rng() % 150);
    const SymbolSequence seq(Alphabet::numbered(a), x);
    const std::size_t n = 1 + rng() % (x.size() - 1);
    const auto sch = random_schedules(a);
    std::vector<double> g(a);
    for (auto& v : g) v = static_cast<double>(static_cast<int>(rng() % 2000) - 1000) / 37.0;
    const PayoffFunction payoff(g);

    const auto e = estimate(seq, n, payoff, sch);
    ASSERT_EQ(e.abstained, e.kappa == 0);
    if (e.abstained) {
      ASSERT_EQ(e.value, 0.0);
      ASSERT_EQ(e.lambda, 0u);
    } else {
      ASSERT_GE(e.value, payoff.min());
      ASSERT_LE(e.value, payoff.max());
      ASSERT_GE(e.lambda, sch.J(n));
      ASSERT_LE(e.kappa, sch.K(n));
    }

    const auto d = estimate_distribution(seq, n, sch);
    double sum = 0.0;
    for (double p : d.probs) {
      ASSERT_GE(p, 0.0);
      sum += p;
    }
    ASSERT_NEAR(sum, d.abstained ? 0.0 : 1.0, 1e-12);

    const std::size_t kmax = std::min<std::size_t>(6, n + 1);
    const std::size_t k = 1 + rng() % kmax;
    const auto taus = recurrence_times(seq, n, k, SIZE_MAX);
    for (std::size_t i = 0; i < taus.size(); ++i) {
      if (i > 0) ASSERT_LT(taus[i - 1], taus[i]);
      ASSERT_LE(taus[i], n - k + 1);
      ASSERT_TRUE(std::equal(x.begin() + (n - k + 1 - taus[i]), x.begin() + (n - taus[i] + 1), x.begin() + (n - k + 1)));
    }
    for (std::size_t shorter = 1; shorter < k; ++shorter) ASSERT_GE(lambda(seq, n, shorter), lambda(seq, n, k));

    // Only X_0..X_n matters.
    auto tail = x;
    tail.resize(n + 1);
    for (int extra = 0; extra < 3; ++extra) tail.push_back(static_cast<Symbol>(rng() % a));
    ASSERT_EQ(estimate(SymbolSequence(Alphabet::numbered(a), tail), n, payoff, sch), e);
  }
}
