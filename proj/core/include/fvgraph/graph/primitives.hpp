#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fvgraph/common/error.hpp"
#include "fvgraph/graph/mesh_graph.hpp"
#include "fvgraph/graph/parallel.hpp"

namespace fvg::graph {

std::vector<double> gather(std::span<const double> src, std::span<const std::size_t> index);

/// out[index[i]] += values[i], applied in ascending i.
void scatter_add(std::span<const double> values, std::span<const std::size_t> index, std::span<double> out);

/// out[t] = sum of values[items of segment t], in item order.
std::vector<double> segment_sum(std::span<const double> values, const Segments& seg);

/// Net outward message per cell: +m to owner, -m to neighbour, +m_b to the boundary cell.
/// Each cell sums its owner edges, neighbour edges, then boundary faces in index order.
std::vector<double> assemble_residual(const MeshGraph& g, std::span<const double> edge_msg,
                                      std::span<const double> boundary_msg);

/// Generic gather -> edge map -> scatter; fn(edge, phi_owner, phi_neighbour) -> message.
template <class Fn>
std::vector<double> fvm_residual(const MeshGraph& g, std::span<const double> phi, std::span<const double> boundary_msg,
                                 Fn&& fn) {
  std::vector<double> msg(g.n_edges);
  for (std::size_t e = 0; e < g.n_edges; ++e) msg[e] = fn(e, phi[g.owner[e]], phi[g.neighbour[e]]);
  return assemble_residual(g, msg, boundary_msg);
}

/// Throws NumericalBlowup naming the first non-finite entry.
void check_finite(std::span<const double> v, const std::string& what);

}  // namespace fvg::graph
