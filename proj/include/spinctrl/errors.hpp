// Error taxonomy.
//
// ConfigError marks bad user input (CLI exit code 1).  ComputationError and
// its named subclasses mark well-formed requests whose computation cannot
// succeed (CLI exit code 2).
#pragma once

#include <stdexcept>
#include <string>

namespace spinctrl {

/// Invalid configuration or arguments; maps to CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Base for runtime computation failures; maps to CLI exit code 2.
struct ComputationError : std::runtime_error {
  explicit ComputationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Hyperfine inversion has no real solution for the given frequencies.
struct NoRealSolution : ComputationError {
  using ComputationError::ComputationError;
};

/// A swept signal never crosses the requested level.
struct NoCrossing : ComputationError {
  using ComputationError::ComputationError;
};

/// A fit failed to converge or the data carry no information for the model.
struct FitDiverged : ComputationError {
  using ComputationError::ComputationError;
};

/// Pulse schedule timing is inconsistent (overlap, negative duration, ...).
struct InvalidTiming : ComputationError {
  using ComputationError::ComputationError;
};

/// Full-drive integration step does not resolve the fastest drive period.
struct StepTooCoarse : ComputationError {
  using ComputationError::ComputationError;
};

/// A required control amplitude exceeds the allowed search range.
struct Infeasible : ComputationError {
  using ComputationError::ComputationError;
};

/// No candidate gate satisfies all constraints.
struct NoFeasiblePoint : ComputationError {
  using ComputationError::ComputationError;
};

/// A value lies outside its physically meaningful range.
struct OutOfRange : ComputationError {
  using ComputationError::ComputationError;
};

}  // namespace spinctrl
