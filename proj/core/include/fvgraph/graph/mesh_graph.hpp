#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fvgraph/common/vec3.hpp"
#include "fvgraph/meshio/geometry.hpp"
#include "fvgraph/meshio/raw_mesh.hpp"

namespace fvg::graph {

/// CSR grouping of items (edges or boundary faces) by target cell, items ascending.
struct Segments {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> items;
};

struct BoundaryPatch {
  std::string name;
  std::string type;
  std::size_t start = 0;  // into the boundary-face arrays
  std::size_t size = 0;
  bool is_empty() const { return type == "empty"; }
};

/// Static cell graph: cells are nodes, internal faces are directed edges
/// owner -> neighbour, boundary faces are half-edges. Built once, never mutated.
struct MeshGraph {
  std::size_t n_cells = 0;
  std::size_t n_edges = 0;
  std::size_t n_boundary = 0;

  std::vector<Vec3> cell_centroid;
  std::vector<double> volume;

  std::vector<std::size_t> owner;
  std::vector<std::size_t> neighbour;
  std::vector<Vec3> sf;      // area vector, owner -> neighbour
  std::vector<Vec3> xf;      // face centroid
  std::vector<Vec3> d;       // x_N - x_O
  std::vector<double> weight;  // owner weight |xf - xN| / (|xf - xO| + |xf - xN|)
  std::vector<Vec3> skew;      // xf minus the linear interpolation point on the owner-neighbour segment
  bool skewed = false;         // some |skew| above 1e-10 |d|

  std::vector<std::size_t> bcell;
  std::vector<Vec3> bsf;   // outward
  std::vector<Vec3> bxf;
  std::vector<Vec3> bd;    // xf - x_P
  std::vector<std::uint8_t> bactive;  // 0 on empty patches
  std::vector<BoundaryPatch> patches;

  Segments by_owner;
  Segments by_neighbour;
  Segments by_bcell;

  /// Throws NonConvexPairError when Sf . d <= 0.
  static MeshGraph build(const meshio::RawMesh& mesh, const meshio::MeshGeometry& geo);
  static std::shared_ptr<const MeshGraph> from_mesh(const meshio::RawMesh& mesh);

  const BoundaryPatch* find_patch(const std::string& name) const;
  const BoundaryPatch& patch(const std::string& name) const;
  double total_volume() const;
};

}  // namespace fvg::graph
