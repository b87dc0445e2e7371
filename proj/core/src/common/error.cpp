#include "fvgraph/common/error.hpp"

namespace fvg {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return "UsageError";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::MissingMeshFile: return "MissingMeshFile";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::MeshConsistency: return "MeshConsistencyError";
    case ErrorCode::MissingBoundarySpec: return "MissingBoundarySpec";
    case ErrorCode::UnsupportedScheme: return "UnsupportedScheme";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::InvertedCell: return "InvertedCell";
    case ErrorCode::UnsupportedCellType: return "UnsupportedCellType";
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::NonConvexPair: return "NonConvexPairError";
    case ErrorCode::ExtremeNonOrthogonality: return "ExtremeNonOrthogonality";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::SingularDiagonal: return "SingularDiagonal";
    case ErrorCode::PivotBreakdown: return "PivotBreakdown";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SolverBreakdown: return "SolverBreakdown";
    case ErrorCode::ExtrapolationError: return "ExtrapolationError";
    case ErrorCode::InvalidWindkesselParams: return "InvalidWindkesselParams";
    case ErrorCode::DecayFitError: return "DecayFitError";
    case ErrorCode::InvalidCoefficients: return "InvalidCoefficients";
    case ErrorCode::ContinuityViolation: return "ContinuityViolation";
    case ErrorCode::NonDifferentiableOp: return "NonDifferentiableOp";
    case ErrorCode::InvalidBudget: return "InvalidBudget";
    case ErrorCode::InvalidProbe: return "InvalidProbe";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::GradientBlowup: return "GradientBlowup";
    case ErrorCode::InvalidReference: return "InvalidReference";
  }
  return "Error";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return 2;
    case ErrorCode::Io: return 3;
    case ErrorCode::MissingMeshFile: return 10;
    case ErrorCode::UnsupportedFormat: return 11;
    case ErrorCode::MeshConsistency: return 12;
    case ErrorCode::Parse: return 13;
    case ErrorCode::MissingBoundarySpec: return 14;
    case ErrorCode::UnsupportedScheme: return 15;
    case ErrorCode::InvalidConfig: return 16;
    case ErrorCode::DegenerateFace:
    case ErrorCode::InvertedCell:
    case ErrorCode::NonConvexPair:
    case ErrorCode::ExtremeNonOrthogonality: return 20;
    case ErrorCode::UnsupportedCellType: return 21;
    case ErrorCode::InvalidResolution: return 22;
    case ErrorCode::NumericalBlowup: return 30;
    case ErrorCode::SingularDiagonal:
    case ErrorCode::PivotBreakdown:
    case ErrorCode::SolverBreakdown: return 31;
    case ErrorCode::NotConverged: return 32;
    case ErrorCode::ContinuityViolation: return 33;
    case ErrorCode::ExtrapolationError:
    case ErrorCode::InvalidWindkesselParams:
    case ErrorCode::DecayFitError: return 40;
    case ErrorCode::InvalidCoefficients: return 41;
    case ErrorCode::NonDifferentiableOp:
    case ErrorCode::InvalidBudget:
    case ErrorCode::ShapeError:
    case ErrorCode::GradientBlowup: return 50;
    case ErrorCode::InvalidProbe:
    case ErrorCode::InvalidReference: return 51;
  }
  return 1;
}

}  // namespace fvg
