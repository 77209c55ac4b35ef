#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fwdest/sequence.hpp"

namespace fwdest {

struct VerifyOptions {
  std::uint64_t max_n = 2000;
  std::uint64_t cases = 200;
  std::uint64_t seed = 20050101;
  /// Self-test: feed the streaming side a threshold J(n) + 1 so the check must fail.
  bool inject_off_by_one = false;
};

struct Counterexample {
  std::uint64_t case_index = 0;
  std::size_t alphabet_size = 0;
  std::string schedules;
  std::uint64_t n = 0;
  std::vector<Symbol> prefix;  // X_0 .. X_n
  std::string detail;
};

struct VerifyReport {
  bool passed = true;
  std::uint64_t cases = 0;
  std::uint64_t prefixes = 0;
  std::optional<Counterexample> counterexample;  // the failing prefix with the smallest n

  std::string describe() const;
};

/// Checks the streaming estimator against the from-scratch evaluator on random
/// sequences (alphabet sizes 2-4, every prefix up to max_n) for exact agreement
/// of kappa, lambda, estimates, distributions and per-length occurrence counts.
/// Even cases use the default schedules; odd cases a stress schedule with longer contexts.
VerifyReport verify_equivalence(const VerifyOptions& options);

}  // namespace fwdest
