#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fvgraph/common/vec3.hpp"

namespace fvg::meshio {

/// Contiguous run of boundary faces. `start` indexes the global face list.
struct Patch {
  std::string name;
  std::string type;  // "patch", "wall", "empty", ...
  std::size_t start = 0;
  std::size_t size = 0;
};

/// Face-based polyhedral mesh in polyMesh order: internal faces first
/// (owner < neighbour), then boundary faces tiled by `patches`.
struct RawMesh {
  std::vector<Vec3> points;
  std::vector<std::vector<std::size_t>> faces;
  std::vector<std::size_t> owner;
  std::vector<std::size_t> neighbour;
  std::vector<Patch> patches;
  std::size_t n_cells = 0;

  std::size_t n_faces() const { return faces.size(); }
  std::size_t n_internal_faces() const { return neighbour.size(); }
  std::size_t n_boundary_faces() const { return faces.size() - neighbour.size(); }
  const Patch* find_patch(const std::string& name) const;
};

/// Throws MeshConsistencyError describing the first violated invariant.
void validate(const RawMesh& mesh);

}  // namespace fvg::meshio
