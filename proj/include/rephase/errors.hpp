#pragma once

#include <stdexcept>
#include <string>

namespace rephase {

/// Bad input to an operation: out-of-range sizes, length mismatches,
/// invariant violations in user-supplied values.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The numerics could not produce a trustworthy answer: unstable step,
/// non-finite state, fit non-convergence.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A contrast curve has no local minimum followed by a maximum.
class NoRevivalError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Exponential fit found no decay (flat or growing data).
class NonDecayingError : public NumericError {
 public:
  using NumericError::NumericError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration rejected; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace rephase
