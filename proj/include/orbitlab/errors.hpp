#pragma once

#include <stdexcept>
#include <string>

namespace orbitlab {

// Base type for every failure raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed minor spec, bad family parameters, non-convex samples, ...
struct InvalidSpecError : Error {
  using Error::Error;
};

// Permutation sums past the factorial guard (l > 8).
struct ComplexityGuardError : Error {
  using Error::Error;
};

// Operation asked for a dimension outside its supported desk-scale range.
struct DimensionGuardError : Error {
  using Error::Error;
};

// hess_xx stopped being positive definite at an evaluated point.
struct ConvexityError : Error {
  using Error::Error;
};

// Newton failed to reach the requested residual within max_iters.
struct SolverError : Error {
  using Error::Error;
};

// Point outside the working box, or momentum outside the interior margin.
struct DomainError : Error {
  using Error::Error;
};

// Density at the grid boundary too large relative to its peak.
struct TruncationError : Error {
  using Error::Error;
};

// Vanishing or negative density where positivity is required.
struct DegenerateDensityError : Error {
  using Error::Error;
};

// Unparseable or invalid run configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace orbitlab
