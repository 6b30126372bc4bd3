#pragma once

#include <stdexcept>
#include <string>

namespace tgk {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (inner dimension, depth, block sizes, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Fourier data that cannot be the transform of a real tensor.
class FourierSymmetryError : public Error {
 public:
  using Error::Error;
};

/// A tensor that was required to be symmetric positive definite is not.
/// `face()` is the zero-based Fourier face that failed, or -1 for the
/// spatial first face.
class NotSpdError : public Error {
 public:
  NotSpdError(const std::string& what, long face) : Error(what), face_(face) {}
  long face() const noexcept { return face_; }

 private:
  long face_;
};

/// A test oracle was asked to materialize something larger than its cap.
class OracleCapError : public Error {
 public:
  using Error::Error;
};

/// Normalization of a numerically zero lateral slice.
class ZeroInputError : public Error {
 public:
  using Error::Error;
};

/// A bidiagonalization process hit a zero coefficient at `step()`
/// (one-based, counted as in the recurrences: step i produces Q_{i+1}).
class BreakdownError : public Error {
 public:
  BreakdownError(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// The monotone discrepancy function has no sign change on the interval.
class BracketError : public Error {
 public:
  enum class Side { below_lower, above_upper };
  BracketError(const std::string& what, Side side) : Error(what), side_(side) {}
  /// below_lower: f(lo) is already under the target; above_upper: f(hi) is
  /// still above it (more Krylov steps may help).
  Side side() const noexcept { return side_; }

 private:
  Side side_;
};

/// The discrepancy principle could not be satisfied within the step cap.
class DiscrepancyError : public Error {
 public:
  using Error::Error;
};

/// Malformed files or images.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace tgk
