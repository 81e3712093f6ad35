#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtomo {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong dimensions, unknown names, invalid files, a POVM
/// that does not sum to the identity. The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// The input was well formed but the computation cannot proceed (singular
/// frame superoperator, state on the boundary of the state space, ...).
/// The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Some outcome probability tr(Pi_k rho) is not strictly positive, or the
/// state has a vanishing eigenvalue where the figure of merit needs a full
/// rank state.
class BoundaryStateError : public NumericalError {
 public:
  BoundaryStateError(const std::string& what, std::ptrdiff_t outcome = -1)
      : NumericalError(what), outcome_(outcome) {}

  /// Index of the offending outcome, or -1 when the failure is not tied to a
  /// particular outcome.
  std::ptrdiff_t outcome() const noexcept { return outcome_; }

 private:
  std::ptrdiff_t outcome_;
};

/// The frame superoperator is singular: the measurement does not determine
/// the state.
class NotInformationallyComplete : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qtomo
