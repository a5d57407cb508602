#pragma once

#include <stdexcept>
#include <string>

namespace hetmarket {

/// Base of every error the engine raises. The CLI maps each subclass to an
/// exit code (config 2, data 3, numerical 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, configuration or call arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed, misaligned or insufficient input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Least-squares design matrix without full column rank.
class DegenerateFitError : public DataError {
 public:
  using DataError::DataError;
};

/// Integration blow-up, invariant violation, or a math-domain failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (e.g. arctanh at |x| >= 1).
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hetmarket
