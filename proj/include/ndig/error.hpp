#pragma once

#include <stdexcept>
#include <string>

namespace ndig {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// Argument outside the domain of a function (negative radical, bad parameter).
class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

/// The parameter set cannot support the requested pricing operation.
class InfeasibleError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "infeasible"; }
};

/// Series too short or with zero dispersion.
class DegenerateSeriesError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate_series"; }
};

/// Malformed input data (CSV, configuration).
class DataError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "data"; }
};

/// Non-finite or out-of-range result from a numerical routine.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

}  // namespace ndig
