#include "fvgraph/linalg/settings.hpp"

namespace fvg::linalg {

std::string to_string(KrylovMethod m) {
  switch (m) {
    case KrylovMethod::CG: return "CG";
    case KrylovMethod::BiCGStab: return "BiCGStab";
    case KrylovMethod::GMRES: return "GMRES";
  }
  return "?";
}

}  // namespace fvg::linalg
