#pragma once

#include <stdexcept>
#include <string>

namespace mdd {

/// Argument outside the support or parameter domain of a density.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation not defined for the given family (e.g. sampling an improper prior).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Data that make a closed-form estimate degenerate (zero mean for an
/// exponential rate, all-failure binomial data, ...).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid search did not bracket a minimum; the caller should enlarge the grid.
class RangeExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mdd
