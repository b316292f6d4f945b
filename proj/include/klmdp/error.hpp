#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace klmdp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of incompatible sizes, or an index outside the state space.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates the invariants of its type (negative mass, bad row sum, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A modelling assumption does not hold (ergodicity, cost cap, contraction).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

/// The kernel has more than one recurrent class, so its invariant law is not unique.
class NotUnichainError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when no line applies.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
        message_(message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }
  /// The message without the line prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t line_;
};

}  // namespace klmdp
