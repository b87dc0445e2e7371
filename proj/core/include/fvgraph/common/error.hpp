#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fvg {

enum class ErrorCode {
  Usage,
  Io,
  Parse,
  MissingMeshFile,
  UnsupportedFormat,
  MeshConsistency,
  MissingBoundarySpec,
  UnsupportedScheme,
  InvalidConfig,
  DegenerateFace,
  InvertedCell,
  UnsupportedCellType,
  InvalidResolution,
  NonConvexPair,
  ExtremeNonOrthogonality,
  NumericalBlowup,
  SingularDiagonal,
  PivotBreakdown,
  NotConverged,
  SolverBreakdown,
  ExtrapolationError,
  InvalidWindkesselParams,
  DecayFitError,
  InvalidCoefficients,
  ContinuityViolation,
  NonDifferentiableOp,
  InvalidBudget,
  InvalidProbe,
  ShapeError,
  GradientBlowup,
  InvalidReference,
};

std::string_view error_name(ErrorCode code);

/// Process exit status used by the command line tool for each error class.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace fvg
