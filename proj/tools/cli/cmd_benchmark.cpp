#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "commands.hpp"
#include "fvgraph/common/error.hpp"
#include "fvgraph/inverse/drivers.hpp"
#include "fvgraph/meshio/generators.hpp"
#include "fvgraph/meshio/polymesh.hpp"
#include "fvgraph/solvers/benchmarks.hpp"

namespace fvg::cli {

namespace fs = std::filesystem;

namespace {

int resolution_or(const BenchmarkArgs& a, int fallback) {
  if (a.resolutions.size() > 1) fail(ErrorCode::Usage, "benchmark " + a.id + " takes a single resolution");
  return a.resolutions.empty() ? fallback : a.resolutions.front();
}

std::vector<std::vector<double>> profile_rows(const solvers::LineSample& s) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < s.s.size(); ++k) rows.push_back({s.s[k], s.value[k]});
  return rows;
}

int poisson3d(const BenchmarkArgs& a, const Output& out) {
  const std::vector<int> ns = a.resolutions.empty() ? std::vector<int>{6, 12, 24} : a.resolutions;
  const auto study = solvers::poisson_convergence(ns);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    const auto& r = study.rows[i];
    const double order = i == 0 ? std::nan("") : study.orders[i - 1];
    rows.push_back({static_cast<double>(r.n), static_cast<double>(r.cells), r.l2_error, order, r.seconds});
    out.info("n=" + std::to_string(r.n) + " cells=" + std::to_string(r.cells) + " L2=" + std::to_string(r.l2_error) +
             (i ? " order=" + std::to_string(order) : ""));
    json row{{"n", r.n}, {"cells", r.cells}, {"l2_error", r.l2_error}, {"seconds", r.seconds}};
    if (i) row["order"] = order;
    out.emit({{"benchmark", "poisson3d"}, {"row", row}});
  }
  write_csv((fs::path(a.out_dir) / "poisson3d.csv").string(), {"n", "cells", "l2_error", "order", "seconds"}, rows);
  if (!study.rows.empty()) {
    const auto& finest = study.rows.back();
    const auto mesh = meshio::generate_cube_tet(finest.n);
    const fs::path dir = fs::path(a.out_dir) / "poisson3d";
    meshio::write_polymesh(dir.string(), mesh);
    write_scalar_field(dir.string(), mesh, "phi", 0.0, finest.phi);
  }
  json summary{{"benchmark", "poisson3d"}, {"status", "ok"}, {"monotone", study.monotone}};
  if (!study.orders.empty()) summary["order"] = study.orders.back();
  out.emit(summary);
  return 0;
}

int step_advection(const BenchmarkArgs& a, const Output& out) {
  const int n = resolution_or(a, 32);
  std::vector<fvops::ConvectionScheme> schemes{fvops::ConvectionScheme::Upwind, fvops::ConvectionScheme::SOU};
  if (a.scheme) schemes = {fvops::parse_convection(*a.scheme)};
  const auto mesh = meshio::generate_square_tri(n);
  for (auto s : schemes) {
    const auto r = solvers::run_step_advection(n, s, a.dt.value_or(0.05), a.steps ? *a.steps : 4000);
    const std::string name = fvops::to_string(s);
    write_csv((fs::path(a.out_dir) / ("step_advection_" + name + "_x0.3.csv")).string(), {"y", "phi"},
              profile_rows(r.profile));
    const fs::path dir = fs::path(a.out_dir) / ("step_advection_" + name);
    meshio::write_polymesh(dir.string(), mesh);
    write_scalar_field(dir.string(), mesh, "T", 0.0, r.phi);
    const bool bounded = r.min >= -1e-9 && r.max <= 1.0 + 1e-9;
    out.info(name + ": min=" + std::to_string(r.min) + " max=" + std::to_string(r.max) + " peak(x=0.3)=" +
             std::to_string(r.peak) + (bounded ? " bounded" : " unbounded"));
    out.emit({{"benchmark", "step-advection"}, {"scheme", name}, {"n", n}, {"min", r.min}, {"max", r.max},
              {"peak_x0.3", r.peak}, {"bounded", bounded}, {"steps", r.steps}, {"steady", r.steady}});
  }
  out.emit({{"benchmark", "step-advection"}, {"status", "ok"}});
  return 0;
}

int cavity(const BenchmarkArgs& a, const Output& out) {
  const int n = resolution_or(a, 32);
  const auto r = solvers::run_cavity(n, a.dt.value_or(0.01), a.steps ? *a.steps : 5000);
  write_csv((fs::path(a.out_dir) / "cavity_u_x0.5.csv").string(), {"y", "u"}, profile_rows(r.profiles.u));
  write_csv((fs::path(a.out_dir) / "cavity_v_y0.5.csv").string(), {"x", "v"}, profile_rows(r.profiles.v));
  const auto mesh = meshio::generate_cavity(n);
  const fs::path dir = fs::path(a.out_dir) / "cavity";
  meshio::write_polymesh(dir.string(), mesh);
  write_flow_fields(dir.string(), mesh, r.run.state, 1.0);
  solvers::write_residual_csv((dir / "residuals.csv").string(), r.run.log);
  double max_div = 0.0;
  for (const auto& l : r.run.log) max_div = std::max(max_div, l.max_divergence);
  out.info("cavity n=" + std::to_string(n) + ": " + std::to_string(r.run.steps) + " steps" +
           (r.run.steady ? ", steady" : ", not steady"));
  out.emit({{"benchmark", "cavity"}, {"status", "ok"}, {"n", n}, {"steps", r.run.steps}, {"steady", r.run.steady},
            {"t", r.run.state.t}, {"max_divergence", max_div}});
  return 0;
}

int elbow(const BenchmarkArgs& a, const Output& out) {
  const int n = resolution_or(a, 8);
  const auto P = solvers::elbow_problem(n);
  const std::vector<Vec3> u0{{0, 0, 0}};
  const std::vector<double> p0{0.0};
  solvers::RunOptions opt;
  opt.dt = a.dt.value_or(0.01);
  opt.n_steps = a.steps ? static_cast<std::size_t>(*a.steps) : 1000;
  opt.steady_tol = 1e-4;
  const auto r = solvers::run_transient(P, solvers::initial_flow_state(P, u0, p0, 0.0), opt);
  const auto mesh = meshio::generate_elbow(n);
  const fs::path dir = fs::path(a.out_dir) / "elbow";
  meshio::write_polymesh(dir.string(), mesh);
  write_flow_fields(dir.string(), mesh, r.state, 1.0);
  solvers::write_residual_csv((dir / "residuals.csv").string(), r.log);
  const auto& g = *P.graph;
  json flows;
  for (const auto& patch : g.patches) {
    if (patch.is_empty()) continue;
    double q = 0.0;
    for (std::size_t b = patch.start; b < patch.start + patch.size; ++b) q += r.state.mdot_b[b];
    flows[patch.name] = q;
  }
  out.info("elbow n=" + std::to_string(n) + ": " + std::to_string(r.steps) + " steps");
  out.emit({{"benchmark", "elbow"}, {"status", "ok"}, {"n", n}, {"steps", r.steps}, {"steady", r.steady},
            {"patch_flux", flows}});
  return 0;
}

int bifurcation(const BenchmarkArgs& a, const Output& out) {
  const int n = resolution_or(a, 2);
  const solvers::BifurcationSetup setup;
  const auto P = solvers::bifurcation_problem(n, setup);
  const double dt = a.dt.value_or(1e-3);
  const auto per_cycle = static_cast<std::size_t>(std::lround(setup.period / dt));
  const std::vector<Vec3> u0{{0, 0, 0}};
  const std::vector<double> p0{0.0};
  auto s = solvers::initial_flow_state(P, u0, p0, 0.0);
  ad::Tape tape(false);
  std::vector<std::vector<double>> rows;
  std::vector<double> p_in;
  double max_div = 0.0;
  const std::size_t total = per_cycle * static_cast<std::size_t>(a.cycles);
  for (std::size_t k = 1; k <= total; ++k) {
    solvers::StepReport rep;
    s = solvers::piso_step(P, s, dt, {}, &rep);
    max_div = std::max(max_div, rep.max_divergence);
    const auto obs = inverse::bifurcation_observation(P, solvers::to_vars(tape, s)).value();
    p_in.push_back(obs[0]);
    rows.push_back({s.t, obs[0], obs[1], obs[2], rep.outlet_po[0], rep.outlet_po[1], s.windkessel_pc[0],
                    s.windkessel_pc[1]});
  }
  write_csv((fs::path(a.out_dir) / "bifurcation_waveforms.csv").string(),
            {"t", "p_inlet", "q_outlet1", "q_outlet2", "po_outlet1", "po_outlet2", "pc_outlet1", "pc_outlet2"}, rows);
  // Cycle-to-cycle change of the inlet pressure, relative to the last cycle's range.
  json cycles = json::array();
  for (std::size_t c = 1; c < static_cast<std::size_t>(a.cycles); ++c) {
    double diff = 0.0, lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 0; k < per_cycle; ++k) {
      const double cur = p_in[c * per_cycle + k];
      diff = std::max(diff, std::abs(cur - p_in[(c - 1) * per_cycle + k]));
      lo = std::min(lo, cur);
      hi = std::max(hi, cur);
    }
    cycles.push_back(diff / (hi - lo));
  }
  const auto mesh = meshio::generate_bifurcation(n);
  const fs::path dir = fs::path(a.out_dir) / "bifurcation";
  meshio::write_polymesh(dir.string(), mesh);
  write_flow_fields(dir.string(), mesh, s, setup.rho);
  out.info("bifurcation n=" + std::to_string(n) + ": " + std::to_string(total) + " steps");
  out.emit({{"benchmark", "bifurcation-rcr"}, {"status", "ok"}, {"n", n}, {"cells", P.graph->n_cells},
            {"steps", total}, {"max_divergence", max_div}, {"cycle_change", cycles}});
  return 0;
}

}  // namespace

int cmd_benchmark(const BenchmarkArgs& a, const Output& out) {
  for (int n : a.resolutions) {
    if (n < 1) fail(ErrorCode::Usage, "resolutions must be positive");
  }
  fs::create_directories(a.out_dir);
  if (a.id == "poisson3d") return poisson3d(a, out);
  if (a.id == "step-advection") return step_advection(a, out);
  if (a.id == "cavity") return cavity(a, out);
  if (a.id == "elbow") return elbow(a, out);
  if (a.id == "bifurcation-rcr") return bifurcation(a, out);
  fail(ErrorCode::Usage, "unknown benchmark '" + a.id + "'");
}

}  // namespace fvg::cli
