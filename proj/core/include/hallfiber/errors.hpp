#pragma once

#include <stdexcept>
#include <string>

namespace hallfiber {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGridError : public Error {
 public:
  using Error::Error;
};

/// Requested more eigenvalues than the matrix dimension.
class SizeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The discretization cannot resolve the request (index too high for the
/// grid, or a spurious negative eigenvalue of a non-negative form).
class RefineGridError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Root bracketing failed. Existence of the root is guaranteed analytically,
/// so this signals a solver or grid fault.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// A property that holds analytically was violated numerically.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// A spectral window overlaps neighbouring levels or a curve leaves the
/// integration window inside the support of F'.
class WindowError : public Error {
 public:
  using Error::Error;
};

}  // namespace hallfiber
