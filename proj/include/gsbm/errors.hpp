#pragma once

#include <stdexcept>
#include <string>

namespace gsbm {

// Invalid model, parameter or input file. CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A proven inequality was violated numerically. CLI exit code 3.
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An exact enumeration would exceed its configured budget. CLI exit code 4.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested bound does not apply to the model (e.g. wrong marginal order).
class UnsupportedRegime : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace gsbm
