#include "fvgraph/graph/mesh_graph.hpp"

#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::graph {

namespace {

Segments group(const std::vector<std::size_t>& target, std::size_t n) {
  Segments s;
  s.offsets.assign(n + 1, 0);
  for (auto t : target) ++s.offsets[t + 1];
  for (std::size_t i = 0; i < n; ++i) s.offsets[i + 1] += s.offsets[i];
  s.items.resize(target.size());
  std::vector<std::size_t> fill(s.offsets.begin(), s.offsets.end() - 1);
  for (std::size_t i = 0; i < target.size(); ++i) s.items[fill[target[i]]++] = i;
  return s;
}

}  // namespace

MeshGraph MeshGraph::build(const meshio::RawMesh& mesh, const meshio::MeshGeometry& geo) {
  MeshGraph g;
  g.n_cells = mesh.n_cells;
  g.n_edges = mesh.n_internal_faces();
  g.n_boundary = mesh.n_boundary_faces();
  g.cell_centroid = geo.cell_centroid;
  g.volume = geo.cell_volume;

  g.owner.assign(mesh.owner.begin(), mesh.owner.begin() + static_cast<std::ptrdiff_t>(g.n_edges));
  g.neighbour = mesh.neighbour;
  g.sf.resize(g.n_edges);
  g.xf.resize(g.n_edges);
  g.d.resize(g.n_edges);
  g.weight.resize(g.n_edges);
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    const auto o = g.owner[e];
    const auto n = g.neighbour[e];
    g.sf[e] = geo.face_area_vector[e];
    g.xf[e] = geo.face_centroid[e];
    g.d[e] = g.cell_centroid[n] - g.cell_centroid[o];
    if (!(dot(g.sf[e], g.d[e]) > 0.0)) {
      fail(ErrorCode::NonConvexPair, "face " + std::to_string(e) + " between cells " + std::to_string(o) + " and " +
                                         std::to_string(n) + " has Sf.d <= 0");
    }
    const double a = norm(g.xf[e] - g.cell_centroid[o]);
    const double b = norm(g.xf[e] - g.cell_centroid[n]);
    g.weight[e] = b / (a + b);
  }
  g.skew.resize(g.n_edges);
  g.skewed = false;
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    const double w = g.weight[e];
    g.skew[e] = g.xf[e] - (w * g.cell_centroid[g.owner[e]] + (1.0 - w) * g.cell_centroid[g.neighbour[e]]);
    if (norm(g.skew[e]) > 1e-10 * norm(g.d[e])) g.skewed = true;
  }

  g.bcell.resize(g.n_boundary);
  g.bsf.resize(g.n_boundary);
  g.bxf.resize(g.n_boundary);
  g.bd.resize(g.n_boundary);
  g.bactive.assign(g.n_boundary, 1);
  for (std::size_t b = 0; b < g.n_boundary; ++b) {
    const std::size_t f = g.n_edges + b;
    g.bcell[b] = mesh.owner[f];
    g.bsf[b] = geo.face_area_vector[f];
    g.bxf[b] = geo.face_centroid[f];
    g.bd[b] = g.bxf[b] - g.cell_centroid[g.bcell[b]];
  }
  for (const auto& p : mesh.patches) {
    BoundaryPatch bp{p.name, p.type, p.start - g.n_edges, p.size};
    if (bp.is_empty()) {
      for (std::size_t b = bp.start; b < bp.start + bp.size; ++b) g.bactive[b] = 0;
    }
    g.patches.push_back(std::move(bp));
  }

  g.by_owner = group(g.owner, g.n_cells);
  g.by_neighbour = group(g.neighbour, g.n_cells);
  g.by_bcell = group(g.bcell, g.n_cells);
  return g;
}

std::shared_ptr<const MeshGraph> MeshGraph::from_mesh(const meshio::RawMesh& mesh) {
  return std::make_shared<const MeshGraph>(build(mesh, meshio::compute_geometry(mesh)));
}

const BoundaryPatch* MeshGraph::find_patch(const std::string& name) const {
  for (const auto& p : patches) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const BoundaryPatch& MeshGraph::patch(const std::string& name) const {
  const auto* p = find_patch(name);
  if (!p) fail(ErrorCode::MissingBoundarySpec, "no patch named '" + name + "'");
  return *p;
}

double MeshGraph::total_volume() const {
  double v = 0.0;
  for (double x : volume) v += x;
  return v;
}

}  // namespace fvg::graph
