#pragma once

#include <stdexcept>
#include <string>

namespace gevfit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// A parameter point places at least one observation outside the support.
class OutOfSupport : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An operation that needs beta = mu - tau/xi was called with xi == 0.
class ZeroShape : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Fewer than two observations, or all observations equal.
class DegenerateData : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

// Numerical failures. The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class BracketFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoCandidate : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularInformation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gevfit
