#pragma once

#include <cstddef>
#include <vector>

#include "fvgraph/common/vec3.hpp"
#include "fvgraph/meshio/raw_mesh.hpp"

namespace fvg::meshio {

struct MeshGeometry {
  std::vector<Vec3> face_centroid;
  std::vector<Vec3> face_area_vector;  // points out of the owner cell
  std::vector<double> face_area;
  std::vector<Vec3> cell_centroid;
  std::vector<double> cell_volume;
};

/// Face quantities by fan triangulation about the vertex mean; cell
/// quantities by pyramid decomposition. Throws DegenerateFace / InvertedCell.
MeshGeometry compute_geometry(const RawMesh& mesh);

struct ClosednessReport {
  double max_ratio = 0.0;  // max over cells of |sum S_out| / sum |S|
  std::size_t worst_cell = 0;
};

ClosednessReport closedness(const RawMesh& mesh, const MeshGeometry& geo);

}  // namespace fvg::meshio
