#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace etasol {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in an expression string.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// An expression or spec refers to something that is not declared, or violates a static rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A function was evaluated outside its domain (ln of a non-positive value, division by zero, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operands of incompatible dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The metric cannot be inverted (or is not positive definite) at a point.
class SingularMetricError : public Error {
 public:
  SingularMetricError(const std::string& message, std::vector<double> point, double condition)
      : Error(message), point_(std::move(point)), condition_(condition) {}

  const std::vector<double>& point() const noexcept { return point_; }
  double condition() const noexcept { return condition_; }

 private:
  std::vector<double> point_;
  double condition_;
};

/// An operation's precondition does not hold (missing frame, mu = 0, non-Einstein fiber, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed spec document; the message carries the JSON location.
class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace etasol
