#include "fwdest/schedules.hpp"

#include <cmath>
#include <sstream>

#include "fwdest/errors.hpp"

namespace fwdest {

namespace {

constexpr double kRoundingSlack = 1e-9;

// base^e <= n, without overflow.
bool power_at_most(std::uint64_t base, std::uint64_t e, std::uint64_t n) {
  std::uint64_t p = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (p > n / base) return false;
    p *= base;
  }
  return p <= n;
}

std::uint64_t isqrt_ceil(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r * r == n ? r : r + 1;
}

}  // namespace

std::uint64_t log_context_cap(std::uint64_t n, std::size_t alphabet_size, double coefficient) {
  if (n == 0) throw DomainError("context cap undefined at n = 0");
  if (alphabet_size < 2) throw DomainError("alphabet size must be at least 2");
  const double v = coefficient * std::log(static_cast<double>(n)) / std::log(static_cast<double>(alphabet_size));
  double m = std::floor(v);
  // Near an integer m with 1/coefficient = q integral, floor(v) >= m iff a^(q m) <= n.
  const double nearest = std::round(v);
  const double q = std::round(1.0 / coefficient);
  if (std::abs(v - nearest) < 1e-6 && std::abs(q * coefficient - 1.0) < 1e-12 && nearest >= 1.0)
    m = power_at_most(alphabet_size, static_cast<std::uint64_t>(q * nearest), n) ? nearest : nearest - 1.0;
  return m < 1.0 ? 1 : static_cast<std::uint64_t>(m);
}

std::uint64_t power_threshold(std::uint64_t n, double exponent) {
  if (n == 0) throw DomainError("occurrence threshold undefined at n = 0");
  if (exponent == 0.5) return std::max<std::uint64_t>(1, isqrt_ceil(n));
  const double r = std::pow(static_cast<double>(n), exponent);
  const double nearest = std::round(r);
  const double v = std::abs(r - nearest) <= kRoundingSlack * std::max(1.0, r) ? nearest : std::ceil(r);
  return v < 1.0 ? 1 : static_cast<std::uint64_t>(v);
}

std::uint64_t schedule_K(std::uint64_t n, std::size_t alphabet_size) {
  return log_context_cap(n, alphabet_size, 0.1);
}

std::uint64_t schedule_J(std::uint64_t n) { return power_threshold(n, 0.5); }

Schedules Schedules::defaults(std::size_t alphabet_size) {
  if (alphabet_size < 2) throw DomainError("alphabet size must be at least 2");
  return ScheduleRule{}.build(alphabet_size);
}

Schedules ScheduleRule::build(std::size_t alphabet_size) const {
  if (alphabet_size < 2) throw DomainError("alphabet size must be at least 2");
  Schedules s;
  std::ostringstream desc;
  bool cap_diverges = false;
  bool threshold_diverges = false;
  bool sublinear = false;

  switch (cap) {
    case CapKind::Logarithmic: {
      if (!(cap_coefficient > 0.0)) throw ConfigError("schedules.K.coefficient", "must be positive");
      const double c = cap_coefficient;
      s.context_cap = [alphabet_size, c](std::uint64_t n) { return log_context_cap(n, alphabet_size, c); };
      desc << "K(n)=max(1,floor(" << c << "*log_" << alphabet_size << "(n)))";
      cap_diverges = true;
      break;
    }
    case CapKind::Constant: {
      if (cap_value == 0) throw ConfigError("schedules.K.value", "must be at least 1");
      const std::uint64_t v = cap_value;
      s.context_cap = [v](std::uint64_t n) -> std::uint64_t {
        if (n == 0) throw DomainError("context cap undefined at n = 0");
        return v;
      };
      desc << "K(n)=" << v;
      break;
    }
  }
  desc << "; ";
  switch (threshold) {
    case ThresholdKind::Power: {
      if (!(threshold_exponent > 0.0) || threshold_exponent > 1.0)
        throw ConfigError("schedules.J.exponent", "must lie in (0, 1]");
      const double e = threshold_exponent;
      s.min_occurrences = [e](std::uint64_t n) { return power_threshold(n, e); };
      desc << "J(n)=max(1,ceil(n^" << e << "))";
      threshold_diverges = true;
      sublinear = e < 1.0;
      break;
    }
    case ThresholdKind::Linear:
      s.min_occurrences = [](std::uint64_t n) -> std::uint64_t {
        if (n == 0) throw DomainError("occurrence threshold undefined at n = 0");
        return n;
      };
      desc << "J(n)=n";
      threshold_diverges = true;
      break;
    case ThresholdKind::Constant: {
      if (threshold_value == 0) throw ConfigError("schedules.J.value", "must be at least 1");
      const std::uint64_t v = threshold_value;
      s.min_occurrences = [v](std::uint64_t n) -> std::uint64_t {
        if (n == 0) throw DomainError("occurrence threshold undefined at n = 0");
        return v;
      };
      desc << "J(n)=" << v;
      sublinear = true;
      break;
    }
  }
  s.divergent = cap_diverges && threshold_diverges && sublinear;
  s.description = desc.str();
  return s;
}

}  // namespace fwdest
