#pragma once

#include <stdexcept>
#include <string>

namespace cellwarm {

// Input outside its physical domain (negative concentration, stoichiometry
// off [0,1], temperature off (0, 2000] K, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Inconsistent configuration: bad file syntax, missing key, values that fail
// cross-validation.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Nonlinear or linear solve did not converge. residual is the scaled
// max-norm at the point of failure.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual_, int iterations_)
      : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
  double residual;
  int iterations;
};

// The reaction-rate exponent left the representable range.
class OverpotentialOverflowError : public DomainError {
 public:
  explicit OverpotentialOverflowError(const std::string& what) : DomainError(what) {}
};

}  // namespace cellwarm
