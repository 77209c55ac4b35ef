#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace fwdest {

/// K(n) = max(1, floor(0.1 * log_{alphabet_size} n)). Exact at powers of the alphabet size.
/// Throws DomainError for n == 0 or alphabet_size < 2.
std::uint64_t schedule_K(std::uint64_t n, std::size_t alphabet_size);

/// J(n) = max(1, ceil(sqrt(n))). Throws DomainError for n == 0.
std::uint64_t schedule_J(std::uint64_t n);

/// max(1, floor(coefficient * log_{alphabet_size} n)).
std::uint64_t log_context_cap(std::uint64_t n, std::size_t alphabet_size, double coefficient);

/// max(1, ceil(n^exponent)).
std::uint64_t power_threshold(std::uint64_t n, double exponent);

/// Growth functions for the context-length cap K(n) and the occurrence threshold J(n).
///
/// Both must be nondecreasing positive integer functions of n >= 1. The defaults
/// are K(n) = max(1, floor(0.1 log_|X| n)) and J(n) = max(1, ceil(n^0.5)).
/// `divergent` records whether K -> inf, J -> inf and J(n)/n -> 0 all hold;
/// the kappa divergence check refuses to run otherwise.
struct Schedules {
  std::function<std::uint64_t(std::uint64_t)> context_cap;
  std::function<std::uint64_t(std::uint64_t)> min_occurrences;
  bool divergent = true;
  std::string description;

  std::uint64_t K(std::uint64_t n) const { return context_cap(n); }
  std::uint64_t J(std::uint64_t n) const { return min_occurrences(n); }

  static Schedules defaults(std::size_t alphabet_size);
};

/// Declarative schedule choice, as it appears in configuration documents.
struct ScheduleRule {
  enum class CapKind { Logarithmic, Constant };
  enum class ThresholdKind { Power, Linear, Constant };

  CapKind cap = CapKind::Logarithmic;
  double cap_coefficient = 0.1;
  std::uint64_t cap_value = 1;

  ThresholdKind threshold = ThresholdKind::Power;
  double threshold_exponent = 0.5;
  std::uint64_t threshold_value = 1;

  Schedules build(std::size_t alphabet_size) const;
};

}  // namespace fwdest
