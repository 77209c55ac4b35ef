#pragma once

#include <stdexcept>
#include <string>

namespace fwdest {

/// Argument outside an operation's domain (bad index, invalid symbol, n == 0 for a schedule).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A streaming estimator was pushed past the horizon it was sized for.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Invalid model or configuration. `field()` names the offending entry,
/// e.g. "process.transition[1]".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace fwdest
