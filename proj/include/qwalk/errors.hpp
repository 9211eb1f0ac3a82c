#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// Bad input: maps to CLI exit code 1.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: maps to CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct GapClosed : NumericalError {
  using NumericalError::NumericalError;
};

struct OrthogonalLink : NumericalError {
  OrthogonalLink(const std::string& what, int i, int j = -1)
      : NumericalError(what), index_i(i), index_j(j) {}
  int index_i;
  int index_j;
};

struct NoBracket : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateCoin : ValidationError {
  using ValidationError::ValidationError;
};

struct InvalidRegion : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace qwalk
