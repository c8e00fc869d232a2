#pragma once

#include <stdexcept>
#include <string>

namespace ptqm {

// Invalid run configuration: grid constraints, unknown catalog names, bad arity.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A potential produced a non-finite sample on the grid.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Base for failures of the numerical pipeline itself.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContinuationError : public SolverError {
 public:
  ContinuationError(const std::string& what, double last_good_lambda)
      : SolverError(what), last_good_lambda_(last_good_lambda) {}
  double last_good_lambda() const noexcept { return last_good_lambda_; }

 private:
  double last_good_lambda_;
};

class TrackingError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Complex eigenvalue without a conjugate partner.
class ConsistencyError : public SolverError {
 public:
  using SolverError::SolverError;
};

class NotPTEigenstateError : public SolverError {
 public:
  NotPTEigenstateError(const std::string& what, double residual)
      : SolverError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class AnsatzViolationError : public SolverError {
 public:
  using SolverError::SolverError;
};

// PT normalization is (numerically) zero, so the PT expectation is undefined.
class SelfOrthogonalError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace ptqm
