#pragma once

#include <cstddef>
#include <limits>
#include <string>

namespace fvg::linalg {

enum class KrylovMethod { CG, BiCGStab, GMRES };
enum class Preconditioner { None, ILU0 };
enum class NullSpace { None, PinCell, ProjectMean };

/// Convergence requires ||r||_2 <= tol ||b||_2 and ||r||_1 <= abs_tol.
struct SolverSettings {
  KrylovMethod method = KrylovMethod::BiCGStab;
  Preconditioner preconditioner = Preconditioner::ILU0;
  double tol = 1e-7;
  double abs_tol = std::numeric_limits<double>::infinity();
  int max_iter = 500;
  int restart = 30;
};

inline SolverSettings pressure_defaults() {
  return {KrylovMethod::CG, Preconditioner::ILU0, 1e-8, 1e-8, 1000, 30};
}
inline SolverSettings momentum_defaults() {
  return {KrylovMethod::BiCGStab, Preconditioner::ILU0, 1e-7, std::numeric_limits<double>::infinity(), 500, 30};
}
inline SolverSettings scalar_defaults() {
  return {KrylovMethod::BiCGStab, Preconditioner::ILU0, 1e-10, std::numeric_limits<double>::infinity(), 1000, 30};
}

std::string to_string(KrylovMethod m);

}  // namespace fvg::linalg
