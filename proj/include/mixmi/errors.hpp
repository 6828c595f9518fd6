#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mixmi {

/// Precondition failure on a public entry point (bad dimension, empty sample,
/// invalid parameter). Always a caller bug.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A class has too few members for its leave-one-out estimate
/// (denominator N p_i - 1 <= 0).
class DegenerateClass : public std::runtime_error {
 public:
  DegenerateClass(std::size_t class_index, std::size_t class_count,
                  std::optional<std::size_t> replicate = std::nullopt);

  std::size_t class_index() const noexcept { return class_index_; }
  std::size_t class_count() const noexcept { return class_count_; }
  std::optional<std::size_t> replicate() const noexcept { return replicate_; }

  DegenerateClass in_replicate(std::size_t replicate) const {
    return DegenerateClass(class_index_, class_count_, replicate);
  }

 private:
  std::size_t class_index_;
  std::size_t class_count_;
  std::optional<std::size_t> replicate_;
};

/// Adaptive quadrature ran out of subdivisions before reaching tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double value, double error)
      : std::runtime_error(what), value_(value), error_(error) {}

  double value() const noexcept { return value_; }
  double error() const noexcept { return error_; }

 private:
  double value_;
  double error_;
};

/// A variance came out clearly negative, which only an integration bug can do.
class NegativeVariance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration / data file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mixmi
