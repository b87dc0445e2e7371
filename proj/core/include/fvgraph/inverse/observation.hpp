#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fvgraph/ad/tape.hpp"
#include "fvgraph/graph/mesh_graph.hpp"
#include "fvgraph/solvers/flow.hpp"

namespace fvg::inverse {

using ad::Var;
using Vector = std::vector<double>;

/// Velocities at probe cells, laid out [ux at probes, uy at probes, uz at probes].
/// Throws InvalidProbe for an index outside the mesh.
Var observe_probes(const graph::MeshGraph& g, const solvers::FlowVars& s, std::span<const std::size_t> cells);

/// sum_k p_k A_k / sum_k A_k over the patch faces, p_k the owner-cell value times `scale`.
Var area_average(const graph::MeshGraph& g, const Var& cell_field, const std::string& patch, double scale = 1.0);

/// Net outward flux through a patch.
Var patch_flow(const graph::MeshGraph& g, const Var& mdot_b, const std::string& patch);

/// Trapezoidal weights w with sum_k w_k q_k = (1/T) integral of q over the sample times.
Vector time_average_weights(std::span<const double> t);
double time_average(std::span<const double> t, std::span<const double> q);

/// `count` distinct cells drawn from a seeded generator, ascending.
std::vector<std::size_t> random_probes(std::size_t n_cells, std::size_t count, std::uint64_t seed);

}  // namespace fvg::inverse
