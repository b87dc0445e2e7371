#pragma once

#include <string>
#include <vector>

#include "fvgraph/meshio/raw_mesh.hpp"

namespace fvg::meshio {

/// Unit cube, n^3 hexes each split into 6 tetrahedra. One patch "boundary".
RawMesh generate_cube_tet(int n);
/// Unit cube of n^3 hexes. One patch "boundary".
RawMesh generate_cube_hex(int n);
/// Unit square slab of 2n^2 triangular prisms. Patches inletLower, inletUpper,
/// bottom, outlet, frontAndBack.
RawMesh generate_square_tri(int n);
/// Unit square slab of n^2 hexes. Patches movingWall, fixedWalls, frontAndBack.
RawMesh generate_cavity(int n);
/// Y-shaped channel (trunk plus two sheared branches), 16n^2 cells, in cm.
/// Patches inlet, outlet1, outlet2, walls, frontAndBack.
RawMesh generate_bifurcation(int n);
/// L-shaped duct of unit blocks with n cells per unit, 12n^2 cells.
/// Patches inlet1, inlet2, outlet, walls, frontAndBack.
RawMesh generate_elbow(int n);

/// Dispatch by name: cube-tet, cube-hex, square-tri, cavity, bifurcation, elbow.
RawMesh generate_mesh(const std::string& kind, int n);
std::vector<std::string> generator_names();

struct BifurcationDims {
  double trunk_length = 2.0;
  double half_width = 0.5;
  double branch_length = 2.0;
  double branch_offset = 1.0;
  double thickness = 0.1;
};
inline constexpr BifurcationDims kBifurcation{};

inline constexpr double kSlabThickness = 0.1;

}  // namespace fvg::meshio
