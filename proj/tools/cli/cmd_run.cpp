#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "commands.hpp"
#include "fvgraph/common/error.hpp"
#include "fvgraph/meshio/vtk.hpp"
#include "fvgraph/solvers/run.hpp"

namespace fvg::cli {

namespace fs = std::filesystem;

int cmd_run(const RunArgs& a, const Output& out) {
  const auto t0 = std::chrono::steady_clock::now();
  meshio::CaseConfig cfg = meshio::parse_case(a.case_dir);
  if (a.dt) {
    if (!(*a.dt > 0.0)) fail(ErrorCode::Usage, "--dt must be positive");
    cfg.dt = *a.dt;
  }
  if (a.end_time) cfg.end_time = *a.end_time;
  if (a.write_every) cfg.write_every = *a.write_every;
  if (a.convection) {
    cfg.convection_U = fvops::parse_convection(*a.convection);
    cfg.convection_T = cfg.convection_U;
  }
  const double span = cfg.end_time - cfg.start_time;
  const long long rounded = std::llround(span / cfg.dt);
  const std::size_t n_steps = rounded > 0 ? static_cast<std::size_t>(rounded) : 0;
  const auto g = graph::MeshGraph::from_mesh(cfg.mesh);

  solvers::RunOptions opt;
  opt.n_steps = n_steps;
  opt.dt = cfg.dt;
  opt.write_every = cfg.write_every > 0 ? static_cast<std::size_t>(cfg.write_every) : 0;
  opt.steady_tol = a.steady_tol.value_or(0.0);
  opt.on_step = [&](const solvers::StepLog& l) {
    if (out.verbosity() == Verbosity::Debug || l.step % 100 == 0) {
      out.debug("step " + std::to_string(l.step) + " t=" + std::to_string(l.t) + " change=" + std::to_string(l.change));
    }
  };
  out.info("case " + a.case_dir + ": " + cfg.application + ", " + std::to_string(g->n_cells) + " cells, " +
           std::to_string(n_steps) + " steps of " + std::to_string(cfg.dt));

  const std::string residuals = a.residuals.empty() ? (fs::path(a.case_dir) / "residuals.csv").string() : a.residuals;
  json summary{{"command", "run"}, {"case", a.case_dir}, {"application", cfg.application}, {"cells", g->n_cells}};
  std::vector<solvers::StepLog> log;
  std::size_t steps = 0;
  bool steady = false;
  double t_end = cfg.start_time;
  meshio::VtkGrid vtk;
  if (a.vtk) vtk = meshio::from_raw_mesh(cfg.mesh);

  if (cfg.application == "icoFoam" || cfg.application == "pisoFoam") {
    const auto P = solvers::flow_problem_from_case(cfg, g);
    auto r = solvers::run_transient(P, solvers::flow_state_from_case(P, cfg), opt, [&](const solvers::FlowState& s) {
      if (!a.no_foam) write_flow_fields(a.case_dir, cfg.mesh, s, P.rho);
    });
    log = std::move(r.log);
    steps = r.steps;
    steady = r.steady;
    t_end = r.state.t;
    double max_div = 0.0;
    for (const auto& l : log) max_div = std::max(max_div, l.max_divergence);
    summary["max_divergence"] = max_div;
    if (a.vtk) {
      std::vector<Vec3> U(g->n_cells);
      std::vector<double> p(g->n_cells);
      for (std::size_t c = 0; c < g->n_cells; ++c) {
        U[c] = {r.state.ux[c], r.state.uy[c], r.state.uz[c]};
        p[c] = P.rho * r.state.p[c];
      }
      vtk.cell_vectors.emplace_back("U", U);
      vtk.cell_scalars.emplace_back("p", p);
    }
  } else {
    const auto P = solvers::scalar_problem_from_case(cfg, g);
    auto r = solvers::run_transient(P, solvers::scalar_state_from_case(*g, cfg), cfg.start_time, opt,
                                    [&](double t, const std::vector<double>& phi) {
                                      if (!a.no_foam) write_scalar_field(a.case_dir, cfg.mesh, "T", t, phi);
                                    });
    log = std::move(r.log);
    steps = r.steps;
    steady = r.steady;
    t_end = r.t;
    summary["min"] = *std::min_element(r.phi.begin(), r.phi.end());
    summary["max"] = *std::max_element(r.phi.begin(), r.phi.end());
    if (a.vtk) vtk.cell_scalars.emplace_back("T", r.phi);
  }
  solvers::write_residual_csv(residuals, log);
  if (a.vtk) {
    const std::string path = (fs::path(a.case_dir) / (fs::path(a.case_dir).filename().string() + ".vtk")).string();
    meshio::write_vtk(path, vtk);
    summary["vtk"] = path;
  }
  summary["status"] = "ok";
  summary["steps"] = steps;
  summary["end_time"] = t_end;
  summary["steady"] = steady;
  summary["residuals"] = residuals;
  summary["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.info("done: " + std::to_string(steps) + " steps, t=" + std::to_string(t_end) + (steady ? " (steady)" : ""));
  out.emit(summary);
  return 0;
}

}  // namespace fvg::cli
