#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fvgraph/ad/tape.hpp"
#include "fvgraph/graph/mesh_graph.hpp"
#include "fvgraph/linalg/ilu.hpp"
#include "fvgraph/linalg/krylov.hpp"
#include "fvgraph/linalg/sparse.hpp"

namespace fvg::linalg {

using ad::Var;

/// A cell-graph matrix whose coefficients live on a tape: diag per cell, upper
/// A[owner][neighbour] and lower A[neighbour][owner] per edge. Factorised once,
/// shared by every right-hand side solved against it and by their adjoints.
struct LinearSystem {
  const GraphPattern* pattern = nullptr;
  Var diag, upper, lower;
  SolverSettings settings;
  NullSpace null_space = NullSpace::None;
  std::size_t pin_cell = 0;
  double pin_value = 0.0;

  CsrMatrix matrix;  // after null-space elimination
  std::vector<std::pair<std::size_t, double>> pinned_column;  // (row, original A[row][pin]) moved to the rhs
  std::optional<Ilu0> ilu;
};

std::shared_ptr<const LinearSystem> make_system(const GraphPattern& pattern, const Var& diag, const Var& upper,
                                                const Var& lower, const SolverSettings& s,
                                                NullSpace mode = NullSpace::None, std::size_t pin_cell = 0,
                                                double pin_value = 0.0);

/// x = A^{-1} b. Throws NotConverged when the forward solve misses its tolerance.
/// The VJP solves A^T lambda = xbar with the same method and preconditioner.
Var sparse_solve(const std::shared_ptr<const LinearSystem>& sys, const Var& b, SolveReport* report = nullptr,
                 std::span<const double> x0 = {});

/// y = A x for A given by (diag, upper, lower) on the graph edges.
Var matvec(const graph::MeshGraph& g, const Var& diag, const Var& upper, const Var& lower, const Var& x);
/// y = (A - diag(A)) x.
Var offdiag_matvec(const graph::MeshGraph& g, const Var& upper, const Var& lower, const Var& x);

}  // namespace fvg::linalg
