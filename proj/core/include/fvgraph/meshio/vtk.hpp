#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fvgraph/common/vec3.hpp"
#include "fvgraph/meshio/cell_mesh.hpp"
#include "fvgraph/meshio/raw_mesh.hpp"

namespace fvg::meshio {

/// Legacy ASCII UNSTRUCTURED_GRID contents with CELL_DATA.
struct VtkGrid {
  std::vector<Vec3> points;
  std::vector<CellShape> cells;
  std::vector<std::pair<std::string, std::vector<double>>> cell_scalars;
  std::vector<std::pair<std::string, std::vector<Vec3>>> cell_vectors;
};

VtkGrid read_vtk(const std::string& path);
VtkGrid parse_vtk(const std::string& text, const std::string& source);
void write_vtk(const std::string& path, const VtkGrid& grid);
std::string format_vtk(const VtkGrid& grid);

/// All boundary faces go to one patch named "boundary".
RawMesh to_raw_mesh(const VtkGrid& grid);
VtkGrid from_raw_mesh(const RawMesh& mesh);

}  // namespace fvg::meshio
