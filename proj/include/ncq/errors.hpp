#pragma once

#include <stdexcept>
#include <string>

namespace ncq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point lies outside the region where an operation is defined (e.g. e(x) <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Deformation parameters are incompatible with the requested operation.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Quadrature did not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Empty or degenerate evaluation grid.
class GridError : public Error {
 public:
  using Error::Error;
};

/// A symbolic expression cannot be represented in the target function class.
class RepresentationError : public Error {
 public:
  using Error::Error;
};

/// An asserted numerical check exceeded its tolerance.
class AssertionFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ncq
