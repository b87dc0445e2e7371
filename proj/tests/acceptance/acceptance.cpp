// Acceptance runner. Prints one "criterion N: PASS|FAIL ..." line per selected criterion.
// Usage: fvgraph_acceptance [--only N]...

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adjoint_cases.hpp"
#include "fvgraph/adjoint/checkpoint.hpp"
#include "fvgraph/bc/windkessel.hpp"
#include "fvgraph/common/error.hpp"
#include "fvgraph/inverse/drivers.hpp"
#include "fvgraph/meshio/case_config.hpp"
#include "fvgraph/meshio/field_io.hpp"
#include "fvgraph/meshio/generators.hpp"
#include "fvgraph/meshio/geometry.hpp"
#include "fvgraph/meshio/polymesh.hpp"
#include "fvgraph/meshio/vtk.hpp"
#include "fvgraph/solvers/benchmarks.hpp"
#include "gradcheck.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fvg;
using Clock = std::chrono::steady_clock;

const std::string kFixtures = FVGRAPH_FIXTURE_DIR;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "" : "!") + what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Removes itself on scope exit.
struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string& tag) {
    std::random_device rd;
    path = fs::temp_directory_path() / ("fvgraph_acc_" + tag + "_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Relative path -> bytes of every regular file below `root`.
std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

bool same_mesh(const meshio::RawMesh& a, const meshio::RawMesh& b) {
  if (a.points != b.points || a.faces != b.faces || a.owner != b.owner || a.neighbour != b.neighbour ||
      a.n_cells != b.n_cells || a.patches.size() != b.patches.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.patches.size(); ++i) {
    const auto &p = a.patches[i], &q = b.patches[i];
    if (p.name != q.name || p.type != q.type || p.start != q.start || p.size != q.size) return false;
  }
  return true;
}

bc::FieldBoundary uniform_dirichlet(const graph::MeshGraph& g, double v) {
  bc::FieldBoundary f{"phi", {}};
  for (const auto& p : g.patches) {
    f.patch.push_back(p.is_empty() ? bc::BoundarySpec::empty() : bc::BoundarySpec::fixed(v));
  }
  return f;
}

meshio::FieldOutput scalar_field(const std::string& name, const std::vector<double>& v) {
  meshio::FieldOutput f{name, false, {}};
  for (double x : v) f.values.push_back({x, 0, 0});
  return f;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const std::vector<int> ns{6, 12, 24};
  const auto study = solvers::poisson_convergence(ns);
  std::string errs;
  for (const auto& r : study.rows) errs += (errs.empty() ? "" : "/") + fmt("%.3e", r.l2_error);
  o.check(study.monotone, "monotone L2 " + errs);
  const double order = study.orders.empty() ? 0.0 : study.orders.back();
  o.check(order >= 1.5, "order(12->24)=" + fmt("%.3f", order));
  const double t = seconds_since(t0);
  o.check(t < 120.0, "time " + fmt("%.1fs", t) + " < 120s");
  return o;
}

Outcome criterion2() {
  Outcome o;
  double worst = 0.0;
  for (const auto& kind : meshio::generator_names()) {
    for (int n : {2, 4}) {
      const auto g = graph::MeshGraph::from_mesh(meshio::generate_mesh(kind, n));
      const std::vector<double> f(g->n_cells, 0.0);
      const auto res = solvers::solve_poisson(*g, f, uniform_dirichlet(*g, 10.0));
      for (double v : res.phi) worst = std::max(worst, std::abs(v - 10.0));
    }
  }
  o.check(worst <= 1e-10, "max|phi-10|=" + fmt("%.2e", worst) + " over all generators n=2,4");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto up = solvers::run_step_advection(32, fvops::ConvectionScheme::Upwind);
  const auto sou = solvers::run_step_advection(32, fvops::ConvectionScheme::SOU);
  o.check(up.steady && sou.steady, "steady (" + std::to_string(up.steps) + ", " + std::to_string(sou.steps) + " steps)");
  o.check(up.min >= -1e-9 && up.max <= 1.0 + 1e-9,
          "upwind range [" + fmt("%.3e", up.min) + ", " + fmt("%.12f", up.max) + "]");
  o.check(sou.peak > up.peak, "peak SOU " + fmt("%.4f", sou.peak) + " > upwind " + fmt("%.4f", up.peak));
  const double t = seconds_since(t0);
  o.check(t < 60.0, "time " + fmt("%.1fs", t) + " < 60s");
  return o;
}

/// Runs `steps` PISO steps and returns the worst per-cell and net boundary imbalance.
std::pair<double, double> mass_history(const solvers::FlowProblem& P, double dt, int steps) {
  const std::size_t n = P.graph->n_cells;
  auto s = solvers::initial_flow_state(P, std::vector<Vec3>(n), std::vector<double>(n, 0.0), 0.0);
  double cell = 0.0, net = 0.0;
  for (int k = 0; k < steps; ++k) {
    solvers::StepReport rep;
    s = solvers::piso_step(P, s, dt, {}, &rep);
    cell = std::max(cell, rep.max_divergence);
    net = std::max(net, std::abs(rep.net_boundary_flux));
  }
  return {cell, net};
}

Outcome criterion4() {
  Outcome o;
  const int steps = 200;
  const auto check = [&](const std::string& name, const solvers::FlowProblem& P, double dt) {
    const double bound = 10.0 * P.solver_p.abs_tol;
    const auto [cell, net] = mass_history(P, dt, steps);
    o.check(cell <= bound, name + " max cell " + fmt("%.2e", cell) + " <= " + fmt("%.0e", bound));
    o.check(net <= bound, name + " max net " + fmt("%.2e", net));
  };
  check("cavity16", solvers::cavity_problem(16), 0.01);
  check("bifurcation2", solvers::bifurcation_problem(2), 1e-3);
  o.notes.push_back(std::to_string(steps) + " steps each");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const auto t0 = Clock::now();
  solvers::CavitySetup setup;
  setup.convection = fvops::ConvectionScheme::SOU;
  const auto coarse = solvers::run_cavity(32, 0.01, 5000, 1e-4, setup);
  const auto fine = solvers::run_cavity(96, 0.01, 5000, 1e-4, setup);
  o.check(coarse.run.steady && fine.run.steady,
          "steady (" + std::to_string(coarse.run.steps) + ", " + std::to_string(fine.run.steps) + " steps)");
  const double eu = solvers::profile_rel_l2(coarse.profiles.u, fine.profiles.u);
  const double ev = solvers::profile_rel_l2(coarse.profiles.v, fine.profiles.v);
  o.check(eu <= 0.02, "u rel L2 " + fmt("%.4f", eu));
  o.check(ev <= 0.02, "v rel L2 " + fmt("%.4f", ev));
  const double t = seconds_since(t0);
  o.check(t < 600.0, "time " + fmt("%.1fs", t) + " < 600s");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto suite = testing::run_gradcheck_suite(20);
  double worst = 0.0;
  std::string worst_op;
  int failing = 0;
  for (const auto& r : suite) {
    const bool ok = r.instances >= 20 && r.max_rel < 1e-5;
    if (!ok) {
      ++failing;
      o.check(false, r.op + " rel " + fmt("%.2e", r.max_rel) + " n=" + std::to_string(r.instances));
    }
    if (r.max_rel >= worst) {
      worst = r.max_rel;
      worst_op = r.op;
    }
  }
  o.check(failing == 0 && !suite.empty(),
          std::to_string(suite.size()) + " ops x20, worst " + worst_op + " " + fmt("%.2e", worst));

  const auto sc = testing::make_scalar_transient(8);
  const auto targets = testing::constant_targets(8, sc->probes.size(), 0.4);
  const auto loss = testing::squared_error(targets);
  const auto full = testing::full_storage_gradient(sc->transient, sc->params, loss);
  const auto ck = adjoint::differentiate_transient(sc->transient, sc->params, loss, adjoint::plan_checkpoints(8, 3));
  double rel = 0.0;
  for (const auto& [name, g] : full) {
    rel = std::max(rel, std::abs(ck.gradient.at(name) - g) / std::max(std::abs(g), 1e-300));
  }
  o.check(rel <= 1e-10, "checkpointed vs full storage rel " + fmt("%.2e", rel) + " (8 steps, 3 snapshots)");
  const double t = seconds_since(t0);
  o.check(t < 300.0, "time " + fmt("%.1fs", t) + " < 300s");
  return o;
}

double rk4_capacitor(double pc, const bc::WindkesselParams& p, double q, double dt, int substeps) {
  const double h = dt / substeps;
  const auto f = [&](double y) { return (q - y / p.Rd) / p.C; };
  for (int i = 0; i < substeps; ++i) {
    const double k1 = f(pc);
    const double k2 = f(pc + 0.5 * h * k1);
    const double k3 = f(pc + 0.5 * h * k2);
    const double k4 = f(pc + h * k3);
    pc += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return pc;
}

/// Piecewise-constant flow: a fixed sequence of levels, one per 0.05 s.
double flow_at(double t) {
  static const double levels[] = {0.02, 0.05, -0.01, 0.03, 0.0, 0.04, 0.015, 0.025, -0.005, 0.035};
  const int i = static_cast<int>(std::floor(t / 0.05 + 1e-9));
  return levels[std::clamp(i, 0, 9)];
}

double integrate(bc::WindkesselScheme s, const bc::WindkesselParams& p, int n, double horizon, bool piecewise) {
  const double dt = horizon / n;
  double pc = 0.0;
  for (int k = 0; k < n; ++k) pc = bc::windkessel_step(pc, p, piecewise ? flow_at(k * dt) : 0.02, dt, s).pc;
  return pc;
}

Outcome criterion7() {
  Outcome o;
  const bc::WindkesselParams p{100.0, 1.1111e-3, 900.0};
  // Exact vs RK4, 0.5 s of piecewise-constant flow switching every 0.05 s
  double exact_err = 0.0, scale = 0.0;
  {
    const int n = 100;
    const double dt = 0.5 / n;
    double pe = 0.0, pr = 0.0;
    for (int k = 0; k < n; ++k) {
      const double q = flow_at(k * dt);
      pe = bc::windkessel_step(pe, p, q, dt, bc::WindkesselScheme::Exact).pc;
      pr = rk4_capacitor(pr, p, q, dt, 200);
      exact_err = std::max(exact_err, std::abs(pe - pr));
      scale = std::max(scale, std::abs(pr));
    }
  }
  const double rel = exact_err / scale;
  o.check(rel <= 1e-10, "Exact vs RK4 rel " + fmt("%.2e", rel));

  const double horizon = 0.5, q = 0.02;
  const double ref = rk4_capacitor(0.0, p, q, horizon, 100000);
  for (auto [s, name] : {std::pair{bc::WindkesselScheme::ForwardEuler, "FE"},
                         std::pair{bc::WindkesselScheme::BackwardEuler, "BE"}}) {
    std::vector<double> errs;
    for (int n = 20; n <= 320; n *= 2) errs.push_back(std::abs(integrate(s, p, n, horizon, false) - ref));
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double order = std::log2(errs[i - 1] / errs[i]);
      lo = std::min(lo, order);
      hi = std::max(hi, order);
    }
    o.check(lo >= 0.9 && hi <= 1.1, std::string(name) + " order in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "]");
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto t0 = Clock::now();
  const inverse::CavityInverseConfig cfg;
  const auto r = inverse::run_inverse_cavity(cfg);
  const double lid = r.recovered.empty() ? 0.0 : r.recovered[0];
  const double err = std::abs(lid - cfg.lid_true) / cfg.lid_true;
  o.check(r.converged && err < 0.01 && r.iterations <= cfg.max_iterations,
          "lid " + fmt("%.4f", lid) + " rel " + fmt("%.4f", err) + " after " + std::to_string(r.iterations) +
              " iterations");
  const double t = seconds_since(t0);
  o.check(t < 900.0, "time " + fmt("%.1fs", t) + " < 900s");
  return o;
}

std::string describe(const inverse::InverseResult& r) {
  std::string s;
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    const double e = std::abs(r.recovered[i] - r.truth[i]) / std::abs(r.truth[i]);
    s += (i ? " " : "") + r.names[i] + "=" + fmt("%.5g", r.recovered[i]) + "(" + fmt("%.2f%%", 100 * e) + ")";
  }
  return s;
}

Outcome criterion9() {
  Outcome o;
  {
    const auto t0 = Clock::now();
    inverse::WindkesselInverseConfig cfg;
    cfg.resistances_only = true;
    const auto r = inverse::run_inverse_windkessel(cfg);
    const double t = seconds_since(t0);
    o.check(r.converged && r.max_rel_error < 0.01,
            "smoke: max rel " + fmt("%.4f", r.max_rel_error) + " after " + std::to_string(r.iterations) + " iterations [" +
                describe(r) + "]");
    o.check(t < 600.0, "smoke time " + fmt("%.1fs", t) + " < 600s");
  }
  {
    const auto t0 = Clock::now();
    const inverse::WindkesselInverseConfig cfg;
    const auto r = inverse::run_inverse_windkessel(cfg);
    const double t = seconds_since(t0);
    o.check(r.converged && r.max_rel_error < 0.01 && r.iterations <= cfg.max_iterations,
            "full: max rel " + fmt("%.4f", r.max_rel_error) + " after " + std::to_string(r.iterations) + " iterations [" +
                describe(r) + "]");
    o.check(t < 3600.0, "full time " + fmt("%.1fs", t) + " < 3600s");
  }
  return o;
}

Outcome criterion10() {
  Outcome o;
  ScratchDir tmp("parse");
  int round_trips = 0;
  for (const std::string name : {"single_hex", "two_hex", "cavity"}) {
    const auto original = meshio::read_polymesh(kFixtures + "/" + name);
    const auto a = tmp.path / (name + "_a");
    const auto b = tmp.path / (name + "_b");
    meshio::write_polymesh(a.string(), original);
    const auto back = meshio::read_polymesh(a.string());
    meshio::write_polymesh(b.string(), back);
    const bool ok = same_mesh(original, back) && tree_bytes(a) == tree_bytes(b);
    o.check(ok, name + " polyMesh round trip");
    round_trips += ok;
  }
  {
    const auto cfg = meshio::parse_case(kFixtures + "/cavity");
    std::vector<meshio::FieldOutput> fields;
    for (const auto& [name, spec] : cfg.fields) {
      meshio::FieldOutput f{name, spec.is_vector, {}};
      for (std::size_t c = 0; c < cfg.mesh.n_cells; ++c) f.values.push_back(spec.internal_value(c));
      fields.push_back(f);
    }
    const auto a = tmp.path / "fields_a";
    const auto b = tmp.path / "fields_b";
    meshio::write_time_directory(a.string(), 0.0, cfg.mesh, fields);
    bool ok = !fields.empty();
    std::vector<meshio::FieldOutput> reread;
    for (const auto& f : fields) {
      const auto spec = meshio::parse_field((a / "0" / f.name).string(), f.name, cfg.mesh);
      meshio::FieldOutput g{f.name, spec.is_vector, {}};
      for (std::size_t c = 0; c < cfg.mesh.n_cells; ++c) g.values.push_back(spec.internal_value(c));
      ok = ok && g.is_vector == f.is_vector && g.values == f.values;
      reread.push_back(g);
    }
    meshio::write_time_directory(b.string(), 0.0, cfg.mesh, reread);
    ok = ok && tree_bytes(a) == tree_bytes(b);
    o.check(ok, "cavity fields round trip");
    round_trips += ok;
  }
  {
    const auto grid = meshio::read_vtk(kFixtures + "/single_tet.vtk");
    const auto text = meshio::format_vtk(grid);
    const auto again = meshio::format_vtk(meshio::parse_vtk(text, "round trip"));
    const auto mesh = meshio::to_raw_mesh(grid);
    const auto via_mesh = meshio::from_raw_mesh(mesh);
    const bool ok = text == again && via_mesh.points == grid.points && mesh.n_cells == grid.cells.size();
    o.check(ok, "single_tet.vtk round trip");
    round_trips += ok;
  }
  o.notes.push_back(std::to_string(round_trips) + " round trips");

  double worst = 0.0;
  std::string worst_mesh;
  const auto inspect = [&](const std::string& label, const meshio::RawMesh& m) {
    const auto r = meshio::closedness(m, meshio::compute_geometry(m));
    if (r.max_ratio >= worst) {
      worst = r.max_ratio;
      worst_mesh = label;
    }
  };
  for (const std::string name : {"single_hex", "two_hex", "cavity"}) {
    inspect(name, meshio::read_polymesh(kFixtures + "/" + name));
  }
  inspect("single_tet.vtk", meshio::to_raw_mesh(meshio::read_vtk(kFixtures + "/single_tet.vtk")));
  for (const auto& kind : meshio::generator_names()) {
    for (int n : {2, 3, 8}) inspect(kind + ":" + std::to_string(n), meshio::generate_mesh(kind, n));
  }
  o.check(worst < 1e-10, "closedness worst " + fmt("%.2e", worst) + " (" + worst_mesh + ")");
  return o;
}

/// Field files of one run of each deterministic case, keyed by relative path.
std::map<std::string, std::string> determinism_run(const fs::path& dir) {
  const std::vector<int> ns{6, 12, 24};
  const auto study = solvers::poisson_convergence(ns);
  for (const auto& row : study.rows) {
    const auto mesh = meshio::generate_cube_tet(row.n);
    meshio::write_time_directory((dir / ("poisson" + std::to_string(row.n))).string(), 0.0, mesh,
                                 {scalar_field("phi", row.phi)});
  }
  const auto step_mesh = meshio::generate_square_tri(32);
  for (auto [scheme, name] : {std::pair{fvops::ConvectionScheme::Upwind, "upwind"},
                              std::pair{fvops::ConvectionScheme::SOU, "sou"}}) {
    const auto r = solvers::run_step_advection(32, scheme);
    meshio::write_time_directory((dir / ("step_" + std::string(name))).string(), 1.0, step_mesh,
                                 {scalar_field("T", r.phi)});
  }
  solvers::CavitySetup setup;
  setup.convection = fvops::ConvectionScheme::SOU;
  const auto cav = solvers::run_cavity(32, 0.01, 5000, 1e-4, setup);
  meshio::write_time_directory((dir / "cavity32").string(), 1.0, meshio::generate_cavity(32),
                               {{"U", true, solvers::velocity(cav.run.state)}, scalar_field("p", cav.run.state.p)});
  return tree_bytes(dir);
}

Outcome criterion11() {
  Outcome o;
  ScratchDir a("det_a"), b("det_b");
  const auto first = determinism_run(a.path);
  const auto second = determinism_run(b.path);
  std::size_t bytes = 0;
  for (const auto& [k, v] : first) bytes += v.size();
  o.check(!first.empty() && first == second,
          std::to_string(first.size()) + " field files, " + std::to_string(bytes) + " bytes identical");
  return o;
}

const std::map<int, std::function<Outcome()>>& criteria() {
  static const std::map<int, std::function<Outcome()>> c{
      {1, criterion1}, {2, criterion2}, {3, criterion3},   {4, criterion4},   {5, criterion5},  {6, criterion6},
      {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}, {11, criterion11}};
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      const int n = std::atoi(argv[++i]);
      if (!criteria().count(n)) {
        std::fprintf(stderr, "unknown criterion %s\n", argv[i]);
        return 2;
      }
      selected.insert(n);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty()) {
    for (const auto& [n, fn] : criteria()) selected.insert(n);
  }
  bool all = true;
  for (int n : selected) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria().at(n)();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::string detail;
    for (const auto& s : o.notes) detail += (detail.empty() ? "" : "; ") + s;
    std::printf("criterion %d: %s %s (%.1fs)\n", n, o.pass ? "PASS" : "FAIL", detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
