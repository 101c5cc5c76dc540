#pragma once

#include <stdexcept>
#include <string>

namespace syncnet {

/// Caller supplied something outside an operation's contract. Maps to CLI exit code 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base of all numerical failures (solver divergence, blow-up). Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalBlowup : public NumericalError {
 public:
  NumericalBlowup(const std::string& what, double time)
      : NumericalError(what + " at t=" + std::to_string(time)), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankDeficient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// An analytic condition required by the operation does not hold (e.g. K <= K_critical).
class ConditionViolated : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Fixed-point iteration did not converge. Inconclusive: not a proof that no equilibrium exists.
class NoEquilibriumFound : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace syncnet
