#pragma once

#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "fvgraph/graph/mesh_graph.hpp"

namespace fvg::linalg {

/// Compressed sparse rows with sorted column indices and a stored diagonal in every row.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col;
  std::vector<double> val;
  std::vector<std::size_t> diag_pos;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;
  /// Position of (i, j) or SIZE_MAX.
  std::size_t find(std::size_t i, std::size_t j) const;
  CsrMatrix transpose() const;

  static CsrMatrix from_triplets(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& t);
};

/// Sparsity of a cell-graph operator: diagonal plus (owner, neighbour) and (neighbour, owner) per edge.
struct GraphPattern {
  CsrMatrix structure;  // values unused
  std::vector<std::size_t> upper_pos;  // edge -> position of A[owner][neighbour]
  std::vector<std::size_t> lower_pos;  // edge -> position of A[neighbour][owner]
  std::vector<std::size_t> owner;
  std::vector<std::size_t> neighbour;

  static GraphPattern from_graph(const graph::MeshGraph& g);
  /// Throws SingularDiagonal on a zero diagonal entry.
  CsrMatrix assemble(std::span<const double> diag, std::span<const double> upper, std::span<const double> lower) const;
};

}  // namespace fvg::linalg
