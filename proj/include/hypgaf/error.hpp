#pragma once

#include <stdexcept>
#include <string>

namespace hypgaf {

// Invalid argument for a function with a restricted domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Base for failures of a numerical procedure on valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceFailure : public NumericalError {
 public:
  ConvergenceFailure(const std::string& what, double tolerance)
      : NumericalError(what), tolerance_(tolerance) {}
  double tolerance() const noexcept { return tolerance_; }

 private:
  double tolerance_;
};

class NumericalInstability : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnsupportedIntensity : public DomainError {
 public:
  using DomainError::DomainError;
};

class RegimeMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

// Zero counting: |f| nearly vanishes somewhere on the contour.
class CircleTooClose : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Zero counting: phase increments never dropped below the acceptance bound.
class RefinementExhausted : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hypgaf
