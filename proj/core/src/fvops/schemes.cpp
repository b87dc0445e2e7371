#include "fvgraph/fvops/schemes.hpp"

#include "fvgraph/common/error.hpp"

namespace fvg::fvops {

std::string to_string(ConvectionScheme s) {
  switch (s) {
    case ConvectionScheme::Upwind: return "upwind";
    case ConvectionScheme::Central: return "central";
    case ConvectionScheme::SOU: return "sou";
    case ConvectionScheme::QUICK: return "quick";
  }
  return "?";
}

std::string to_string(DiffusionMode m) {
  switch (m) {
    case DiffusionMode::None: return "none";
    case DiffusionMode::Minimum: return "minimum";
    case DiffusionMode::Orthogonal: return "orthogonal";
    case DiffusionMode::OverRelaxed: return "over-relaxed";
  }
  return "?";
}

std::string to_string(TimeScheme t) {
  switch (t) {
    case TimeScheme::BackwardEuler: return "be";
    case TimeScheme::CrankNicolson: return "cn";
    case TimeScheme::ForwardEuler: return "fe";
  }
  return "?";
}

ConvectionScheme parse_convection(const std::string& name) {
  if (name == "upwind") return ConvectionScheme::Upwind;
  if (name == "central" || name == "linear") return ConvectionScheme::Central;
  if (name == "sou" || name == "linearUpwind") return ConvectionScheme::SOU;
  if (name == "quick" || name == "QUICK") return ConvectionScheme::QUICK;
  fail(ErrorCode::UnsupportedScheme,
       "convection scheme '" + name + "' is not supported (upwind, linear/central, linearUpwind/sou, QUICK)");
}

DiffusionMode parse_diffusion(const std::string& name) {
  if (name == "none" || name == "uncorrected") return DiffusionMode::None;
  if (name == "minimum" || name == "minimumCorrected") return DiffusionMode::Minimum;
  if (name == "orthogonal" || name == "orthogonalCorrected") return DiffusionMode::Orthogonal;
  if (name == "over-relaxed" || name == "overRelaxed" || name == "corrected") return DiffusionMode::OverRelaxed;
  fail(ErrorCode::UnsupportedScheme, "non-orthogonal correction '" + name +
                                         "' is not supported (uncorrected, minimum, orthogonal, corrected)");
}

TimeScheme parse_time_scheme(const std::string& name) {
  if (name == "be" || name == "Euler" || name == "backwardEuler") return TimeScheme::BackwardEuler;
  if (name == "cn" || name == "CrankNicolson") return TimeScheme::CrankNicolson;
  if (name == "fe" || name == "forwardEuler") return TimeScheme::ForwardEuler;
  fail(ErrorCode::UnsupportedScheme,
       "time scheme '" + name + "' is not supported (Euler, CrankNicolson, forwardEuler)");
}

}  // namespace fvg::fvops
