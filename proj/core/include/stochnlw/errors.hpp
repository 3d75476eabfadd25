#pragma once

#include <stdexcept>
#include <string>

namespace stochnlw {

// Base class for all library errors so callers can catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid grid parameters (dimension, mode count, multiplier, size guard).
struct GridError : Error {
    using Error::Error;
};

// Two operands live on different grids.
struct GridMismatch : Error {
    using Error::Error;
};

// analyze() received samples whose transform is not Hermitian within tolerance,
// i.e. the input was not (numerically) real-valued.
struct AsymmetryError : Error {
    using Error::Error;
};

// An operation that requires a Hermitian (real-valued) field got a field with
// the Hermitian flag cleared.
struct NotHermitian : Error {
    using Error::Error;
};

// Time interval is empty, inverted, or not aligned with a required time grid.
struct IntervalError : Error {
    using Error::Error;
};

// Extended torus too small to contain the cutoff support plus propagation slack.
struct ExtensionTooSmall : Error {
    using Error::Error;
};

// Sup-norm ceiling exceeded during time stepping.
struct BlowupGuard : Error {
    using Error::Error;
};

// Fixed-point iteration failed to contract (empirical factor above threshold).
struct NoContraction : Error {
    using Error::Error;
};

// Greedy interval partition cannot advance: a single-step interval already
// violates its budget.
struct DegenerateInterval : Error {
    using Error::Error;
};

// Tail fit window contains too few usable points.
struct InsufficientTail : Error {
    using Error::Error;
};

// Operation restricted to a specific spatial dimension.
struct DimensionError : Error {
    using Error::Error;
};

// A coefficient sequence that must be Hermitian is not.
struct SymmetryError : Error {
    using Error::Error;
};

// Mixed-norm exponent pair fails the admissibility conditions it was tagged with.
struct AdmissibilityError : Error {
    using Error::Error;
};

// Bad run configuration (CLI / experiment level).
struct ConfigError : Error {
    using Error::Error;
};

} // namespace stochnlw
