#pragma once

#include <stdexcept>
#include <string>

namespace kmu {

/// Base class for all workbench errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluation point lies outside the chart domain of the model.
struct ChartDomainError : Error {
  using Error::Error;
};

/// Metric singular (or not positive definite where required) at a point.
struct SingularMetricError : Error {
  using Error::Error;
};

/// Operator fed to the metric eigensolver fails the symmetry tolerance.
struct SymmetryError : Error {
  using Error::Error;
};

/// Structure is Sasakian-degenerate (lambda below threshold) where the
/// operation needs distinct h-eigendistributions.
struct SasakianDegenerateError : Error {
  using Error::Error;
};

/// Operation needs curvature but the structure is a pointwise (synthetic)
/// tangent-space model that carries none.
struct NoCurvatureError : Error {
  using Error::Error;
};

/// Boeckx-index regime makes the requested solve infeasible.
struct InfeasibleRegimeError : Error {
  using Error::Error;
};

/// A documented precondition on an argument was violated.
struct PreconditionError : Error {
  using Error::Error;
};

/// Config file failed validation; carries the offending field name.
struct ConfigError : Error {
  std::string field;
  ConfigError(std::string field_name, const std::string& message)
      : Error(field_name + ": " + message), field(std::move(field_name)) {}
};

}  // namespace kmu
