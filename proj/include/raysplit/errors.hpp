#pragma once

#include <stdexcept>
#include <string>

namespace raysplit {

/// Base class for every condition the engine reports by throwing.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Curve fails the strict-convexity requirement (curvature below tolerance).
class NonConvexError : public Error {
 public:
  using Error::Error;
};

/// Tangent construction asked from a point inside or on the curve.
class InsidePointError : public Error {
 public:
  using Error::Error;
};

/// A traced ray advanced less than the geometric tolerance.
class StuckRayError : public Error {
 public:
  using Error::Error;
};

/// Interior-launched ray met the outer wall tangentially.
class GrazingWallError : public Error {
 public:
  using Error::Error;
};

/// Trace exceeded its event budget.
class EventBudgetError : public Error {
 public:
  using Error::Error;
};

/// Scenario file or values failed validation.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// Config text is malformed; carries the 1-based line number.
class ParseError : public ScenarioError {
 public:
  ParseError(const std::string& what, int line)
      : ScenarioError("line " + std::to_string(line) + ": " + what), line_no(line) {}
  int line_no;
};

/// Iterative arc construction exceeded its iteration budget.
class IterationBudgetError : public Error {
 public:
  using Error::Error;
};

/// Boundary point handed to a quadrant-restricted construction lies outside
/// the required quadrant.
class BadQuadrantError : public Error {
 public:
  using Error::Error;
};

/// An output file or directory could not be created or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Arc construction reached a state strict convexity rules out.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Witness verification failed; carries the parameter-space Hausdorff gap.
class WitnessMismatchError : public Error {
 public:
  WitnessMismatchError(const std::string& what, double hausdorff)
      : Error(what), hausdorff_param(hausdorff) {}
  double hausdorff_param;
};

}  // namespace raysplit
