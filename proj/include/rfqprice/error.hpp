#pragma once

#include <stdexcept>
#include <string>

namespace rfqprice {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed data, violated preconditions, inconsistent dimensions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Dimension mismatch between the pieces of a model.
class StructuralError : public InputError {
 public:
  using InputError::InputError;
};

/// Argument outside the domain of an operation (negative time step, ...).
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

/// A computation produced a non-finite value, failed to converge or diverged.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, long step = -1)
      : Error(step >= 0 ? what + " (at step " + std::to_string(step) + ")" : what),
        step_(step) {}

  /// Index of the step (event, interval, iterate) where the failure happened, or -1.
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace rfqprice
