#include "fvgraph/meshio/generators.hpp"

#include <array>
#include <cmath>
#include <map>
#include <tuple>

#include "fvgraph/common/error.hpp"
#include "fvgraph/meshio/cell_mesh.hpp"

namespace fvg::meshio {

namespace {

void check_resolution(int n) {
  if (n < 2) fail(ErrorCode::InvalidResolution, "resolution must be at least 2, got " + std::to_string(n));
}

class PointPool {
 public:
  std::size_t add(const Vec3& p) {
    auto key = std::make_tuple(std::llround(p.x * 1e9), std::llround(p.y * 1e9), std::llround(p.z * 1e9));
    auto [it, inserted] = index_.try_emplace(key, points.size());
    if (inserted) points.push_back(p);
    return it->second;
  }
  std::vector<Vec3> points;

 private:
  std::map<std::tuple<long long, long long, long long>, std::size_t> index_;
};

struct Block2D {
  std::array<Vec3, 4> corner;  // (0,0), (1,0), (1,1), (0,1) in local coordinates
  int nx;
  int ny;
};

void extrude_blocks(const std::vector<Block2D>& blocks, double thickness, bool triangles, PointPool& pool,
                    std::vector<CellShape>& cells) {
  for (const auto& b : blocks) {
    auto node = [&](int i, int j, int k) {
      const double s = static_cast<double>(i) / b.nx;
      const double t = static_cast<double>(j) / b.ny;
      Vec3 p = (1 - s) * (1 - t) * b.corner[0] + s * (1 - t) * b.corner[1] + s * t * b.corner[2] +
               (1 - s) * t * b.corner[3];
      p.z = k * thickness;
      return pool.add(p);
    };
    for (int j = 0; j < b.ny; ++j) {
      for (int i = 0; i < b.nx; ++i) {
        std::array<std::size_t, 4> lo{node(i, j, 0), node(i + 1, j, 0), node(i + 1, j + 1, 0), node(i, j + 1, 0)};
        std::array<std::size_t, 4> hi{node(i, j, 1), node(i + 1, j, 1), node(i + 1, j + 1, 1), node(i, j + 1, 1)};
        if (triangles) {
          cells.push_back({CellType::Wedge, {lo[0], lo[1], lo[2], hi[0], hi[1], hi[2]}});
          cells.push_back({CellType::Wedge, {lo[0], lo[2], lo[3], hi[0], hi[2], hi[3]}});
        } else {
          cells.push_back({CellType::Hex, {lo[0], lo[1], lo[2], lo[3], hi[0], hi[1], hi[2], hi[3]}});
        }
      }
    }
  }
}

Block2D rect(double x0, double y0, double x1, double y1, int nx, int ny) {
  return {{Vec3{x0, y0, 0}, Vec3{x1, y0, 0}, Vec3{x1, y1, 0}, Vec3{x0, y1, 0}}, nx, ny};
}

constexpr double kTol = 1e-9;

RawMesh cube(int n, bool tets) {
  check_resolution(n);
  std::vector<Vec3> pts;
  const int m = n + 1;
  pts.reserve(static_cast<std::size_t>(m) * m * m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) pts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n,
                                                 static_cast<double>(k) / n});
  auto id = [&](int i, int j, int k) { return static_cast<std::size_t>((k * m + j) * m + i); };
  std::vector<CellShape> cells;
  cells.reserve(static_cast<std::size_t>(n) * n * n * (tets ? 6 : 1));
  static const std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (!tets) {
          cells.push_back({CellType::Hex,
                           {id(i, j, k), id(i + 1, j, k), id(i + 1, j + 1, k), id(i, j + 1, k), id(i, j, k + 1),
                            id(i + 1, j, k + 1), id(i + 1, j + 1, k + 1), id(i, j + 1, k + 1)}});
          continue;
        }
        for (const auto& p : perms) {
          std::array<int, 3> v{0, 0, 0};
          std::vector<std::size_t> verts{id(i, j, k)};
          for (int step = 0; step < 3; ++step) {
            v[static_cast<std::size_t>(p[static_cast<std::size_t>(step)])] = 1;
            verts.push_back(id(i + v[0], j + v[1], k + v[2]));
          }
          cells.push_back({CellType::Tet, std::move(verts)});
        }
      }
    }
  }
  return build_from_cells(pts, cells, {{"boundary", "patch"}}, [](const Vec3&, const Vec3&) { return std::size_t{0}; });
}

}  // namespace

RawMesh generate_cube_tet(int n) { return cube(n, true); }
RawMesh generate_cube_hex(int n) { return cube(n, false); }

RawMesh generate_square_tri(int n) {
  check_resolution(n);
  PointPool pool;
  std::vector<CellShape> cells;
  extrude_blocks({rect(0, 0, 1, 1, n, n)}, kSlabThickness, true, pool, cells);
  const std::vector<PatchInfo> patches = {{"inletLower", "patch"}, {"inletUpper", "patch"}, {"bottom", "wall"},
                                          {"outlet", "patch"}, {"frontAndBack", "empty"}};
  return build_from_cells(pool.points, cells, patches, [](const Vec3& c, const Vec3& nrm) -> std::size_t {
    if (std::abs(nrm.z) > 0.5) return 4;
    if (c.x < kTol) return c.y < 0.5 ? 0 : 1;
    if (c.y < kTol) return 2;
    return 3;
  });
}

RawMesh generate_cavity(int n) {
  check_resolution(n);
  PointPool pool;
  std::vector<CellShape> cells;
  extrude_blocks({rect(0, 0, 1, 1, n, n)}, kSlabThickness, false, pool, cells);
  const std::vector<PatchInfo> patches = {{"movingWall", "wall"}, {"fixedWalls", "wall"}, {"frontAndBack", "empty"}};
  return build_from_cells(pool.points, cells, patches, [](const Vec3& c, const Vec3& nrm) -> std::size_t {
    if (std::abs(nrm.z) > 0.5) return 2;
    if (c.y > 1.0 - kTol) return 0;
    return 1;
  });
}

RawMesh generate_bifurcation(int n) {
  check_resolution(n);
  const auto& d = kBifurcation;
  const double l1 = d.trunk_length, h = d.half_width, l2 = d.branch_length, a = d.branch_offset;
  const double xe = l1 + l2;
  std::vector<Block2D> blocks;
  blocks.push_back(rect(0, -h, l1, h, 4 * n, 2 * n));
  blocks.push_back({{Vec3{l1, 0, 0}, Vec3{xe, a, 0}, Vec3{xe, a + h, 0}, Vec3{l1, h, 0}}, 4 * n, n});
  blocks.push_back({{Vec3{l1, -h, 0}, Vec3{xe, -a - h, 0}, Vec3{xe, -a, 0}, Vec3{l1, 0, 0}}, 4 * n, n});
  PointPool pool;
  std::vector<CellShape> cells;
  extrude_blocks(blocks, d.thickness, false, pool, cells);
  const std::vector<PatchInfo> patches = {
      {"inlet", "patch"}, {"outlet1", "patch"}, {"outlet2", "patch"}, {"walls", "wall"}, {"frontAndBack", "empty"}};
  return build_from_cells(pool.points, cells, patches, [=](const Vec3& c, const Vec3& nrm) -> std::size_t {
    if (std::abs(nrm.z) > 0.5) return 4;
    if (c.x < kTol && nrm.x < -0.5) return 0;
    if (c.x > xe - kTol && nrm.x > 0.5) return c.y > 0 ? 1 : 2;
    return 3;
  });
}

RawMesh generate_elbow(int n) {
  check_resolution(n);
  std::vector<Block2D> blocks;
  blocks.push_back(rect(0, 1, 2, 2, 2 * n, n));
  blocks.push_back(rect(2, 0, 4, 5, 2 * n, 5 * n));
  PointPool pool;
  std::vector<CellShape> cells;
  extrude_blocks(blocks, 0.2, false, pool, cells);
  const std::vector<PatchInfo> patches = {
      {"inlet1", "patch"}, {"inlet2", "patch"}, {"outlet", "patch"}, {"walls", "wall"}, {"frontAndBack", "empty"}};
  return build_from_cells(pool.points, cells, patches, [](const Vec3& c, const Vec3& nrm) -> std::size_t {
    if (std::abs(nrm.z) > 0.5) return 4;
    if (c.x < kTol && nrm.x < -0.5) return 0;
    if (c.y < kTol && nrm.y < -0.5 && c.x < 3.0) return 1;
    if (c.y > 5.0 - kTol && nrm.y > 0.5) return 2;
    return 3;
  });
}

RawMesh generate_mesh(const std::string& kind, int n) {
  if (kind == "cube-tet") return generate_cube_tet(n);
  if (kind == "cube-hex") return generate_cube_hex(n);
  if (kind == "square-tri") return generate_square_tri(n);
  if (kind == "cavity") return generate_cavity(n);
  if (kind == "bifurcation") return generate_bifurcation(n);
  if (kind == "elbow") return generate_elbow(n);
  fail(ErrorCode::Usage, "unknown mesh generator '" + kind + "'");
}

std::vector<std::string> generator_names() {
  return {"cube-tet", "cube-hex", "square-tri", "cavity", "bifurcation", "elbow"};
}

}  // namespace fvg::meshio
