#pragma once

#include <stdexcept>
#include <string>

namespace claytobit {

/// Argument outside the mathematical domain of an operation (non-finite
/// input, theta <= 0, sigma <= 0, probability outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The optimizer could not be started (objective non-finite at the start
/// point, inconsistent bounds, invalid settings).
class SetupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data violates a structural invariant (shape mismatch, negative
/// responses, rank-deficient covariates).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fit, resampling run or study could not produce a usable estimate.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or command-line values. `field` names the
/// offending key when one is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace claytobit
