#include "fvgraph/meshio/cell_mesh.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>

#include "fvgraph/common/error.hpp"

namespace fvg::meshio {

namespace {

using Ring = std::vector<std::size_t>;

const std::vector<Ring>& templates(CellType type) {
  static const std::vector<Ring> tet = {{0, 1, 2}, {0, 1, 3}, {1, 2, 3}, {0, 2, 3}};
  static const std::vector<Ring> hex = {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                        {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  static const std::vector<Ring> wedge = {{0, 1, 2}, {3, 4, 5}, {0, 1, 4, 3}, {1, 2, 5, 4}, {2, 0, 3, 5}};
  static const std::vector<Ring> pyramid = {{0, 1, 2, 3}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  switch (type) {
    case CellType::Tet: return tet;
    case CellType::Hex: return hex;
    case CellType::Wedge: return wedge;
    case CellType::Pyramid: return pyramid;
  }
  fail(ErrorCode::UnsupportedCellType, "unknown cell type");
}

std::size_t expected_vertices(CellType type) {
  switch (type) {
    case CellType::Tet: return 4;
    case CellType::Hex: return 8;
    case CellType::Wedge: return 6;
    case CellType::Pyramid: return 5;
  }
  return 0;
}

Vec3 newell(const std::vector<Vec3>& pts, const Ring& ring) {
  Vec3 n;
  for (std::size_t i = 0; i < ring.size(); ++i) n += cross(pts[ring[i]], pts[ring[(i + 1) % ring.size()]]);
  return 0.5 * n;
}

Vec3 mean(const std::vector<Vec3>& pts, const Ring& ring) {
  Vec3 c;
  for (auto v : ring) c += pts[v];
  return c / static_cast<double>(ring.size());
}

struct KeyHash {
  std::size_t operator()(const Ring& k) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct FaceRec {
  Ring ring;
  std::size_t owner;
  std::size_t neighbour;
  bool internal;
  std::size_t patch;
  std::size_t order;
};

}  // namespace

RawMesh build_from_cells(const std::vector<Vec3>& points, const std::vector<CellShape>& cells,
                         const std::vector<PatchInfo>& patches, const PatchClassifier& classify) {
  std::vector<FaceRec> faces;
  std::unordered_map<Ring, std::size_t, KeyHash> index;
  index.reserve(cells.size() * 4);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& cell = cells[c];
    if (cell.vertices.size() != expected_vertices(cell.type)) {
      fail(ErrorCode::UnsupportedCellType, "cell " + std::to_string(c) + " has " +
                                               std::to_string(cell.vertices.size()) + " vertices for its type");
    }
    for (auto v : cell.vertices) {
      if (v >= points.size()) fail(ErrorCode::MeshConsistency, "cell " + std::to_string(c) + " vertex out of range");
    }
    const Vec3 centre = mean(points, cell.vertices);
    for (const auto& local : templates(cell.type)) {
      Ring ring(local.size());
      for (std::size_t i = 0; i < local.size(); ++i) ring[i] = cell.vertices[local[i]];
      if (dot(newell(points, ring), mean(points, ring) - centre) < 0.0) std::reverse(ring.begin(), ring.end());
      Ring key = ring;
      std::sort(key.begin(), key.end());
      auto [it, inserted] = index.try_emplace(std::move(key), faces.size());
      if (inserted) {
        faces.push_back({std::move(ring), c, 0, false, 0, faces.size()});
      } else {
        FaceRec& rec = faces[it->second];
        if (rec.internal) fail(ErrorCode::MeshConsistency, "face shared by more than two cells");
        rec.internal = true;
        // the first visitor has the lower cell index and is therefore the owner
        rec.neighbour = c;
      }
    }
  }
  for (auto& rec : faces) {
    if (!rec.internal) {
      const Vec3 n = newell(points, rec.ring);
      rec.patch = classify(mean(points, rec.ring), n / norm(n));
      if (rec.patch >= patches.size()) fail(ErrorCode::MeshConsistency, "boundary face classified to unknown patch");
    }
  }
  std::vector<std::size_t> internal_ids, boundary_ids;
  for (std::size_t i = 0; i < faces.size(); ++i) (faces[i].internal ? internal_ids : boundary_ids).push_back(i);
  std::sort(internal_ids.begin(), internal_ids.end(), [&](std::size_t a, std::size_t b) {
    const auto& fa = faces[a];
    const auto& fb = faces[b];
    return std::tie(fa.owner, fa.neighbour) < std::tie(fb.owner, fb.neighbour);
  });
  std::stable_sort(boundary_ids.begin(), boundary_ids.end(), [&](std::size_t a, std::size_t b) {
    const auto& fa = faces[a];
    const auto& fb = faces[b];
    return std::tie(fa.patch, fa.owner, fa.order) < std::tie(fb.patch, fb.owner, fb.order);
  });

  RawMesh mesh;
  mesh.points = points;
  mesh.n_cells = cells.size();
  mesh.faces.reserve(faces.size());
  for (auto i : internal_ids) {
    mesh.faces.push_back(faces[i].ring);
    mesh.owner.push_back(faces[i].owner);
    mesh.neighbour.push_back(faces[i].neighbour);
  }
  std::vector<std::size_t> counts(patches.size(), 0);
  for (auto i : boundary_ids) {
    mesh.faces.push_back(faces[i].ring);
    mesh.owner.push_back(faces[i].owner);
    ++counts[faces[i].patch];
  }
  std::size_t start = internal_ids.size();
  for (std::size_t p = 0; p < patches.size(); ++p) {
    mesh.patches.push_back({patches[p].name, patches[p].type, start, counts[p]});
    start += counts[p];
  }
  validate(mesh);
  return mesh;
}

std::vector<CellShape> cell_shapes(const RawMesh& mesh) {
  std::vector<std::vector<Ring>> cell_faces(mesh.n_cells);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    cell_faces[mesh.owner[f]].push_back(mesh.faces[f]);
    if (f < mesh.neighbour.size()) {
      Ring r = mesh.faces[f];
      std::reverse(r.begin(), r.end());
      cell_faces[mesh.neighbour[f]].push_back(std::move(r));
    }
  }
  std::vector<CellShape> shapes(mesh.n_cells);
  for (std::size_t c = 0; c < mesh.n_cells; ++c) {
    const auto& fl = cell_faces[c];
    std::size_t tris = 0, quads = 0;
    for (const auto& r : fl) {
      if (r.size() == 3) ++tris;
      else if (r.size() == 4) ++quads;
    }
    auto adjacent_off = [&](std::size_t v, const Ring& base) -> std::size_t {
      for (const auto& r : fl) {
        for (std::size_t i = 0; i < r.size(); ++i) {
          const std::size_t a = r[i], b = r[(i + 1) % r.size()];
          std::size_t other = a == v ? b : (b == v ? a : SIZE_MAX);
          if (other != SIZE_MAX && std::find(base.begin(), base.end(), other) == base.end()) return other;
        }
      }
      fail(ErrorCode::UnsupportedCellType, "cell " + std::to_string(c) + " is not a valid prism or hexahedron");
    };
    auto first_of_size = [&](std::size_t n) -> Ring {
      for (const auto& r : fl) if (r.size() == n) return r;
      return {};
    };
    CellShape& s = shapes[c];
    if (fl.size() == 4 && tris == 4) {
      Ring base = first_of_size(3);
      std::reverse(base.begin(), base.end());
      std::size_t apex = SIZE_MAX;
      for (const auto& r : fl) {
        for (auto v : r) if (std::find(base.begin(), base.end(), v) == base.end()) apex = v;
      }
      s.type = CellType::Tet;
      s.vertices = {base[0], base[1], base[2], apex};
    } else if (fl.size() == 6 && quads == 6) {
      Ring base = first_of_size(4);
      std::reverse(base.begin(), base.end());
      s.type = CellType::Hex;
      s.vertices = base;
      for (std::size_t i = 0; i < 4; ++i) s.vertices.push_back(adjacent_off(base[i], base));
    } else if (fl.size() == 5 && tris == 2 && quads == 3) {
      Ring base = first_of_size(3);
      s.type = CellType::Wedge;
      s.vertices = base;
      for (std::size_t i = 0; i < 3; ++i) s.vertices.push_back(adjacent_off(base[i], base));
    } else if (fl.size() == 5 && tris == 4 && quads == 1) {
      Ring base = first_of_size(4);
      std::reverse(base.begin(), base.end());
      std::size_t apex = SIZE_MAX;
      for (const auto& r : fl) {
        for (auto v : r) if (std::find(base.begin(), base.end(), v) == base.end()) apex = v;
      }
      s.type = CellType::Pyramid;
      s.vertices = base;
      s.vertices.push_back(apex);
    } else {
      fail(ErrorCode::UnsupportedCellType, "cell " + std::to_string(c) + " with " + std::to_string(fl.size()) +
                                               " faces is not a tet, hex, wedge or pyramid");
    }
  }
  return shapes;
}

}  // namespace fvg::meshio
