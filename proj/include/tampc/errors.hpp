#pragma once

#include <stdexcept>
#include <string>

namespace tampc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: malformed grids, out-of-range parameters, bad config files.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Failures of the numerical pipeline (singular systems, stalled loops).
class NumericalError : public Error {
public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class NonConvergenceError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class StagnationError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace tampc
