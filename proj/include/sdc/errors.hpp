#pragma once

#include <stdexcept>
#include <string>

namespace sdc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent user configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A plant model violates a registration invariant, e.g. f(0,0) != 0.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Numerical integration produced a non-finite or absurdly large value.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Generic numerical-solver failure (singular systems, iteration limits).
class SolverError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Riccati solve finished but the closed loop is not stable.
class StabilizationError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Shooting damping loop exhausted without improving the distance.
class StallError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Shooting target unreachable in the linearization (singular Y_0).
class GeometryError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Least-squares fit cannot identify the requested coefficients.
class FitError : public Error {
 public:
  using Error::Error;
};

// Closed-loop state escaped the sanity bound during simulation.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

// Replayed trajectory disagrees with its stored states.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

// A required input artifact (e.g. control-law file) is absent (exit code 3).
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

// An input file does not match the expected schema (exit code 4).
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdc
