#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fvgraph/common/vec3.hpp"
#include "fvgraph/meshio/raw_mesh.hpp"

namespace fvg::meshio {

/// VTK cell type ids for the supported shapes.
enum class CellType : int { Tet = 10, Hex = 12, Wedge = 13, Pyramid = 14 };

struct CellShape {
  CellType type;
  std::vector<std::size_t> vertices;  // VTK vertex order
};

struct PatchInfo {
  std::string name;
  std::string type;
};

/// Chooses a patch index for a boundary face from its centroid and outward normal.
using PatchClassifier = std::function<std::size_t(const Vec3& centroid, const Vec3& normal)>;

/// Assembles a polyMesh-ordered RawMesh from cell vertex lists by matching shared faces.
/// Faces are oriented outward from the owner using the cell vertex mean.
RawMesh build_from_cells(const std::vector<Vec3>& points, const std::vector<CellShape>& cells,
                         const std::vector<PatchInfo>& patches, const PatchClassifier& classify);

/// Recovers VTK-ordered cell shapes from a face-based mesh. Throws UnsupportedCellType
/// for anything other than tet, hex, wedge and pyramid.
std::vector<CellShape> cell_shapes(const RawMesh& mesh);

}  // namespace fvg::meshio
