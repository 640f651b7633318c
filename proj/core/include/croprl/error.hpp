#pragma once

#include <stdexcept>
#include <string>

namespace croprl {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing configuration: parameter files, scenario files, invariants.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (weather CSV, checkpoint files).
class DataError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition (stepping a finished episode,
// asking for yield before maturity, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A computation produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Throws NumericError naming `what` when `value` is NaN or infinite.
double require_finite(double value, const std::string& what);

}  // namespace croprl
