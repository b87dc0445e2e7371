#pragma once

#include <vector>

#include "fvgraph/meshio/cell_mesh.hpp"
#include "fvgraph/meshio/raw_mesh.hpp"

namespace fvg::testing {

/// Unit-section hex boxes laid end to end along x; lengths[i] is the x extent of box i.
inline meshio::RawMesh box_row(const std::vector<double>& lengths) {
  std::vector<Vec3> pts;
  std::vector<meshio::CellShape> cells;
  double x = 0.0;
  const auto add_slice = [&pts](double at) {
    for (const Vec3& q : {Vec3{at, 0, 0}, Vec3{at, 1, 0}, Vec3{at, 1, 1}, Vec3{at, 0, 1}}) pts.push_back(q);
  };
  add_slice(x);
  for (double len : lengths) {
    x += len;
    add_slice(x);
    const std::size_t a = pts.size() - 8, b = pts.size() - 4;
    // VTK hex: bottom quad (z = 0) then top quad
    cells.push_back({meshio::CellType::Hex, {a, b, b + 1, a + 1, a + 3, b + 3, b + 2, a + 2}});
  }
  return meshio::build_from_cells(pts, cells, {{"walls", "wall"}},
                                  [](const Vec3&, const Vec3&) { return std::size_t{0}; });
}

/// Box [0,lx] x [0,1] x [0,1] of nx*ny*nz hexes. Patches: left (x = 0), right (x = lx), sides.
inline meshio::RawMesh hex_block(int nx, int ny, int nz, double lx = 1.0) {
  std::vector<Vec3> pts;
  const auto id = [&](int i, int j, int k) { return static_cast<std::size_t>((k * (ny + 1) + j) * (nx + 1) + i); };
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) pts.push_back({lx * i / nx, 1.0 * j / ny, 1.0 * k / nz});
    }
  }
  std::vector<meshio::CellShape> cells;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        cells.push_back({meshio::CellType::Hex,
                         {id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k), id(i, j, k + 1),
                          id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)}});
      }
    }
  }
  return meshio::build_from_cells(pts, cells, {{"left", "patch"}, {"right", "patch"}, {"sides", "wall"}},
                                  [](const Vec3&, const Vec3& n) -> std::size_t {
                                    if (n.x < -0.5) return 0;
                                    if (n.x > 0.5) return 1;
                                    return 2;
                                  });
}

}  // namespace fvg::testing
