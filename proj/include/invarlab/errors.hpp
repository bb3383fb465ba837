#pragma once

#include <stdexcept>
#include <string>

namespace invarlab {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (bad axis set, alphabet mismatch, ...).
struct UsageError : Error {
  using Error::Error;
};

/// Numeric input is malformed (negative mass, sum far from 1, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// Conditioning on an event with zero probability.
struct UnsupportedConditionError : UsageError {
  using UsageError::UsageError;
};

/// An internal quantity left its mathematically guaranteed range.
struct NumericalError : Error {
  using Error::Error;
};

/// A tensor or enumeration would exceed the configured size cap.
struct CapacityError : Error {
  using Error::Error;
};

/// Scenario or encoder text could not be parsed.
struct ParseError : Error {
  ParseError(const std::string& what, int line)
      : Error(what), line_number(line) {}
  int line_number = 0;
};

}  // namespace invarlab
