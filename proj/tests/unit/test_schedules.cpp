#include <gtest/gtest.h>

#include "fwdest/errors.hpp"
#include "fwdest/schedules.hpp"

using namespace fwdest;

TEST(ScheduleK, ExactAtPowersOfTwo) {
  EXPECT_EQ(schedule_K(1024, 2), 1u);
  EXPECT_EQ(schedule_K(std::uint64_t{1} << 20, 2), 2u);
  EXPECT_EQ(schedule_K(std::uint64_t{1} << 30, 2), 3u);
  EXPECT_EQ(schedule_K(5, 2), 1u);
}

TEST(ScheduleK, BoundaryNeighbours) {
  EXPECT_EQ(schedule_K((std::uint64_t{1} << 20) - 1, 2), 1u);
  EXPECT_EQ(schedule_K((std::uint64_t{1} << 30) - 1, 2), 2u);
  EXPECT_EQ(schedule_K(1, 2), 1u);
  EXPECT_EQ(schedule_K((std::uint64_t{1} << 40) - 1, 2), 3u);
  EXPECT_EQ(schedule_K(std::uint64_t{1} << 40, 2), 4u);
  EXPECT_EQ(schedule_K((std::uint64_t{1} << 20) + 1, 2), 2u);
  EXPECT_EQ(schedule_K(3486784400ULL, 3), 1u);
  EXPECT_EQ(schedule_K(~std::uint64_t{0}, 2), 6u);
  // 3^20 and 4^30
  EXPECT_EQ(schedule_K(3486784401ULL, 3), 2u);
  EXPECT_EQ(schedule_K(std::uint64_t{1} << 60, 4), 3u);
}

TEST(ScheduleK, DomainErrors) {
  EXPECT_THROW(schedule_K(0, 2), DomainError);
  EXPECT_THROW(schedule_K(10, 1), DomainError);
}

TEST(ScheduleJ, Examples) {
  EXPECT_EQ(schedule_J(1), 1u);
  EXPECT_EQ(schedule_J(100), 10u);
  EXPECT_EQ(schedule_J(101), 11u);
  EXPECT_EQ(schedule_J(std::uint64_t{1} << 21), 1449u);
  EXPECT_THROW(schedule_J(0), DomainError);
}

TEST(Schedules, DefaultsAreNondecreasingAndGrow) {
  for (std::size_t a : {2, 3, 4, 7}) {
    const auto s = Schedules::defaults(a);
    EXPECT_TRUE(s.divergent);
    std::uint64_t prev_k = 0, prev_j = 0;
    for (std::uint64_t n = 1; n < (std::uint64_t{1} << 62); n = n * 3 / 2 + 1) {
      const auto k = s.K(n);
      const auto j = s.J(n);
      EXPECT_GE(k, prev_k) << "n=" << n;
      EXPECT_GE(j, prev_j) << "n=" << n;
      prev_k = k;
      prev_j = j;
    }
    EXPECT_GE(prev_k, 2u);
    EXPECT_GT(prev_j, 1000000u);
  }
}

TEST(Schedules, RuleKindsAndDivergenceFlag) {
  ScheduleRule linear;
  linear.threshold = ScheduleRule::ThresholdKind::Linear;
  const auto s = linear.build(2);
  EXPECT_FALSE(s.divergent);
  EXPECT_EQ(s.J(37), 37u);

  ScheduleRule fixed;
  fixed.cap = ScheduleRule::CapKind::Constant;
  fixed.cap_value = 3;
  EXPECT_FALSE(fixed.build(2).divergent);
  EXPECT_EQ(fixed.build(2).K(5), 3u);

  ScheduleRule bad;
  bad.threshold_exponent = 1.5;
  EXPECT_THROW(bad.build(2), ConfigError);
}

TEST(PowerThreshold, ExactPowersNotOvershot) {
  EXPECT_EQ(power_threshold(1000, 1.0 / 3.0), 10u);
  EXPECT_EQ(power_threshold(1001, 1.0 / 3.0), 11u);
  EXPECT_EQ(power_threshold(1024, 0.3), 8u);  // 2^(10 * 0.3)
}
