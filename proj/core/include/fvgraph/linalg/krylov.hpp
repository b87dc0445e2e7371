#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fvgraph/linalg/ilu.hpp"
#include "fvgraph/linalg/settings.hpp"
#include "fvgraph/linalg/sparse.hpp"

namespace fvg::linalg {

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;      // ||r||_2 / ||b||_2
  double abs_residual = 0.0;  // ||r||_1
  bool converged = false;
  KrylovMethod method = KrylovMethod::CG;

  std::string summary() const;
};

struct SolveResult {
  std::vector<double> x;
  SolveReport report;
};

/// Preconditioned Krylov solve of A x = b from x0 (zeros if empty).
/// Returns the best iterate with converged = false when max_iter is reached.
SolveResult krylov_solve(const CsrMatrix& a, std::span<const double> b, const SolverSettings& s,
                         std::span<const double> x0 = {}, const Ilu0* precond = nullptr, bool transpose = false);

/// Row/column elimination of `cell` (value `ref`) so the singular Neumann operator becomes SPD.
struct Deflated {
  CsrMatrix a;
  std::vector<double> b;
};
Deflated deflate_nullspace(const CsrMatrix& a, std::span<const double> b, NullSpace mode, std::size_t pin_cell = 0,
                           double ref = 0.0);

/// Solve with null-space handling. ProjectMean projects b onto the range and shifts x to zero mean.
SolveResult solve_system(const CsrMatrix& a, std::span<const double> b, const SolverSettings& s,
                         NullSpace mode = NullSpace::None, std::size_t pin_cell = 0, double ref = 0.0,
                         std::span<const double> x0 = {});

/// Throws NotConverged carrying the report summary.
void require_converged(const SolveReport& r, const std::string& what);

}  // namespace fvg::linalg
