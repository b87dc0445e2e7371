#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "commands.hpp"
#include "fvgraph/common/error.hpp"
#include "fvgraph/graph/mesh_graph.hpp"
#include "fvgraph/meshio/generators.hpp"
#include "fvgraph/meshio/geometry.hpp"
#include "fvgraph/meshio/polymesh.hpp"
#include "fvgraph/meshio/vtk.hpp"
#include "fvgraph/solvers/cases.hpp"

namespace fvg::cli {

namespace fs = std::filesystem;

namespace {

bool is_vtk(const std::string& path) { return fs::path(path).extension() == ".vtk"; }

meshio::RawMesh load_mesh(const std::string& source) {
  if (source.rfind("generator:", 0) == 0) {
    const std::string rest = source.substr(10);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) fail(ErrorCode::Usage, "expected generator:<kind>:<n>");
    int n = 0;
    try {
      n = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::Usage, "generator resolution must be an integer");
    }
    return meshio::generate_mesh(rest.substr(0, colon), n);
  }
  if (is_vtk(source)) return meshio::to_raw_mesh(meshio::read_vtk(source));
  return meshio::read_polymesh(source);
}

}  // namespace

int cmd_convert(const ConvertArgs& a, const Output& out) {
  const meshio::RawMesh mesh = load_mesh(a.input);
  if (is_vtk(a.output)) {
    meshio::write_vtk(a.output, meshio::from_raw_mesh(mesh));
  } else {
    meshio::write_polymesh(a.output, mesh);
  }
  out.info("wrote " + a.output + " (" + std::to_string(mesh.n_cells) + " cells)");
  out.emit({{"command", "convert"}, {"status", "ok"}, {"input", a.input}, {"output", a.output},
            {"cells", mesh.n_cells}, {"faces", mesh.n_faces()}});
  return 0;
}

int cmd_mesh_info(const MeshInfoArgs& a, const Output& out) {
  const meshio::RawMesh mesh = load_mesh(a.source);
  const auto geo = meshio::compute_geometry(mesh);
  const auto closed = meshio::closedness(mesh, geo);
  const auto g = graph::MeshGraph::build(mesh, geo);
  double max_nonorth = 0.0, volume = 0.0;
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    const double c = dot(g.sf[e], g.d[e]) / (norm(g.sf[e]) * norm(g.d[e]));
    max_nonorth = std::max(max_nonorth, std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI);
  }
  for (double v : g.volume) volume += v;
  json patches = json::array();
  for (const auto& p : mesh.patches) {
    patches.push_back({{"name", p.name}, {"type", p.type}, {"faces", p.size}});
    out.info("  patch " + p.name + " (" + p.type + "): " + std::to_string(p.size) + " faces");
  }
  out.info(std::to_string(mesh.n_cells) + " cells, " + std::to_string(mesh.n_faces()) + " faces (" +
           std::to_string(mesh.n_internal_faces()) + " internal), max non-orthogonality " +
           std::to_string(max_nonorth) + " deg, closedness " + std::to_string(closed.max_ratio));
  out.emit({{"command", "mesh-info"}, {"status", "ok"}, {"source", a.source}, {"cells", mesh.n_cells},
            {"points", mesh.points.size()}, {"faces", mesh.n_faces()}, {"internal_faces", mesh.n_internal_faces()},
            {"volume", volume}, {"max_non_orthogonality_deg", max_nonorth}, {"closedness", closed.max_ratio},
            {"patches", patches}});
  return 0;
}

int cmd_perf(const PerfArgs& a, const Output& out) {
  if (a.resolutions.empty()) fail(ErrorCode::Usage, "perf needs at least one resolution");
  std::vector<std::vector<double>> rows;
  double prev_rate = 0.0;
  bool monotone = true;
  for (int n : a.resolutions) {
    if (n < 1) fail(ErrorCode::Usage, "resolutions must be positive");
    const auto P = a.kind == "cavity" ? solvers::cavity_problem(n) : solvers::bifurcation_problem(n);
    const std::vector<Vec3> u0{{0, 0, 0}};
    const std::vector<double> p0{0.0};
    auto s = solvers::initial_flow_state(P, u0, p0, 0.0);
    const double dt = a.kind == "cavity" ? 0.01 : 1e-3;
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < a.steps; ++k) s = solvers::piso_step(P, s, dt);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double rate = a.steps / sec;
    if (!rows.empty()) monotone = monotone && rate < prev_rate;
    prev_rate = rate;
    rows.push_back({static_cast<double>(n), static_cast<double>(P.graph->n_cells), static_cast<double>(a.steps), sec, rate});
    out.info(a.kind + " n=" + std::to_string(n) + ": " + std::to_string(P.graph->n_cells) + " cells, " +
             std::to_string(rate) + " steps/s");
    out.emit({{"command", "perf"}, {"case", a.kind}, {"n", n}, {"cells", P.graph->n_cells}, {"steps", a.steps},
              {"seconds", sec}, {"steps_per_second", rate}});
  }
  if (!a.csv.empty()) write_csv(a.csv, {"n", "cells", "steps", "seconds", "steps_per_second"}, rows);
  out.emit({{"command", "perf"}, {"status", "ok"}, {"rate_decreases_with_cells", monotone}});
  return 0;
}

}  // namespace fvg::cli
