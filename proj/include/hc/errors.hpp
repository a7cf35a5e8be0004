#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hc {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (|p| > 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// Parameters on or inside the critical cone ω² = ac − b² ≤ 0.
class ConeSingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnsupportedRegimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UndefinedAngleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// αγ = β²: the phase-locked fixed-point formulas divide by zero.
class SingularDenominatorError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Point outside a coordinate chart, or at a coordinate degeneracy.
class ChartError : public DomainError {
 public:
  using DomainError::DomainError;
};

class SurfaceConstructionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Grid too coarse or too short for the requested discretization.
class DiscretizationError : public InvalidInputError {
 public:
  using InvalidInputError::InvalidInputError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Step-size underflow during time integration. Carries the last accepted
/// state so callers can inspect or resume.
class IntegrationFailure : public NumericalError {
 public:
  IntegrationFailure(const std::string& what, double last_time,
                     std::vector<double> last_state)
      : NumericalError(what), last_time_(last_time),
        last_state_(std::move(last_state)) {}

  double last_time() const noexcept { return last_time_; }
  const std::vector<double>& last_state() const noexcept { return last_state_; }

 private:
  double last_time_;
  std::vector<double> last_state_;
};

/// The trajectory left the flow's domain (|p| → 1 for the p–θ chart).
class PoleError : public IntegrationFailure {
 public:
  using IntegrationFailure::IntegrationFailure;
};

}  // namespace hc
