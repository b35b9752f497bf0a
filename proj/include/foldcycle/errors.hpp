#pragma once

#include <stdexcept>
#include <string>

namespace foldcycle {

// Root of the library's failure taxonomy. Everything thrown on purpose
// derives from this; std exceptions indicate programming errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Trajectory left the model's working box (treated as blow-up).
struct OutOfBox : Error {
  using Error::Error;
};

// Adaptive step size collapsed below the representable floor.
struct StepUnderflow : Error {
  using Error::Error;
};

// No crossing of the requested line within the time budget.
struct NoCrossing : Error {
  using Error::Error;
};

// Crossing found but |f| at the root is below the transversality tolerance.
struct TangentialCrossing : Error {
  using Error::Error;
};

// |f_y| or |g| at the fold is too small for the coefficient formulas.
struct DegenerateJet : Error {
  using Error::Error;
};

// f does not vanish at the fold point for one of the modes.
struct NotFoldFold : Error {
  using Error::Error;
};

// Single-mode variant of NotFoldFold.
struct NotFold : Error {
  using Error::Error;
};

// Iterative solve (nullcline Newton) failed to converge.
struct NoConvergence : Error {
  using Error::Error;
};

// Input lies outside the wedge / interval the operation is defined on.
struct DomainViolation : Error {
  using Error::Error;
};

// Bracketing endpoints gave the same sign of the fixed-point residual.
struct NoSignChange : Error {
  using Error::Error;
};

// Requested prediction needs conditions that do not hold for this model.
struct InconclusiveVerdict : Error {
  using Error::Error;
};

// Malformed or inconsistent model/run configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace foldcycle
