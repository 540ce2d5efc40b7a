#pragma once

#include <stdexcept>
#include <string>

namespace gpk {

// Base of every exception thrown by the library. The CLI maps
// InputError/DomainError/UnsupportedError to usage failures and the rest to
// numerical failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: non-finite values, length mismatches, bad ranges.
class InputError : public Error {
 public:
  using Error::Error;
};

// A point lies outside the kernel's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The requested (kernel, measure, functional) combination has no closed form.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of the operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double last_jitter)
      : Error(what), last_jitter_(last_jitter) {}
  double last_jitter() const noexcept { return last_jitter_; }

 private:
  double last_jitter_;
};

// Internal-consistency failure (e.g. a posterior variance far below zero).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpk
