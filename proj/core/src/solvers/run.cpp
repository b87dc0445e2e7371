#include "fvgraph/solvers/run.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "fvgraph/common/error.hpp"

namespace fvg::solvers {

namespace {

[[noreturn]] void rethrow_at(const Error& e, std::size_t step) {
  std::string what = e.what();
  const std::string prefix = std::string(error_name(e.code())) + ": ";
  if (what.rfind(prefix, 0) == 0) what = what.substr(prefix.size());
  fail(e.code(), "step " + std::to_string(step) + ": " + what);
}

double max_change(const Vector& a, const Vector& b, double& acc) {
  for (std::size_t i = 0; i < a.size(); ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
  return acc;
}

void check_finite(const Vector& v, const char* what, std::size_t step) {
  for (std::size_t c = 0; c < v.size(); ++c) {
    if (!std::isfinite(v[c])) {
      fail(ErrorCode::NumericalBlowup, std::string("non-finite ") + what + " in cell " + std::to_string(c) +
                                           " at step " + std::to_string(step));
    }
  }
}

bool write_due(const RunOptions& opt, std::size_t step, bool last) {
  return last || (opt.write_every > 0 && step % opt.write_every == 0);
}

}  // namespace

FlowRunResult run_transient(const FlowProblem& P, FlowState state, const RunOptions& opt,
                            const std::function<void(const FlowState&)>& on_write, const ParamValues& params) {
  FlowRunResult r;
  if (opt.n_steps > 0 && !(opt.dt > 0.0)) fail(ErrorCode::InvalidConfig, "time step must be positive");
  for (std::size_t k = 1; k <= opt.n_steps; ++k) {
    StepReport rep;
    FlowState next;
    try {
      next = piso_step(P, state, opt.dt, params, &rep);
    } catch (const Error& e) {
      rethrow_at(e, k);
    }
    check_finite(next.ux, "velocity", k);
    check_finite(next.uy, "velocity", k);
    check_finite(next.uz, "velocity", k);
    check_finite(next.p, "pressure", k);
    double change = 0.0;
    max_change(next.ux, state.ux, change);
    max_change(next.uy, state.uy, change);
    max_change(next.uz, state.uz, change);
    StepLog log{k, next.t, rep.momentum_residual, rep.pressure_iterations(), rep.max_divergence, change / opt.dt};
    state = std::move(next);
    r.steps = k;
    r.log.push_back(log);
    if (opt.on_step) opt.on_step(log);
    r.steady = opt.steady_tol > 0.0 && log.change < opt.steady_tol;
    const bool last = r.steady || k == opt.n_steps;
    if (on_write && write_due(opt, k, last)) on_write(state);
    if (r.steady) break;
  }
  r.state = std::move(state);
  return r;
}

ScalarTrajectory run_transient(const ScalarTransportProblem& P, Vector phi, double t0, const RunOptions& opt,
                               const std::function<void(double, const Vector&)>& on_write,
                               const ParamValues& params) {
  ScalarTrajectory r;
  r.t = t0;
  if (opt.n_steps > 0 && !(opt.dt > 0.0)) fail(ErrorCode::InvalidConfig, "time step must be positive");
  for (std::size_t k = 1; k <= opt.n_steps; ++k) {
    linalg::SolveReport rep;
    Vector next;
    try {
      next = scalar_step(P, phi, r.t, opt.dt, params, &rep);
    } catch (const Error& e) {
      rethrow_at(e, k);
    }
    check_finite(next, "scalar", k);
    double change = 0.0;
    max_change(next, phi, change);
    phi = std::move(next);
    r.t = t0 + static_cast<double>(k) * opt.dt;
    r.steps = k;
    StepLog log;
    log.step = k;
    log.t = r.t;
    log.pressure_iterations = 0;
    log.change = change / opt.dt;
    r.log.push_back(log);
    if (opt.on_step) opt.on_step(log);
    r.steady = opt.steady_tol > 0.0 && log.change < opt.steady_tol;
    const bool last = r.steady || k == opt.n_steps;
    if (on_write && write_due(opt, k, last)) on_write(r.t, phi);
    if (r.steady) break;
  }
  r.phi = std::move(phi);
  return r;
}

void write_residual_csv(const std::string& path, const std::vector<StepLog>& log) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot write " + path);
  f << "step,time,res_Ux,res_Uy,res_Uz,p_iterations,max_divergence,change\n" << std::setprecision(10);
  for (const auto& l : log) {
    f << l.step << ',' << l.t << ',' << l.momentum_residual[0] << ',' << l.momentum_residual[1] << ','
      << l.momentum_residual[2] << ',' << l.pressure_iterations << ',' << l.max_divergence << ',' << l.change << '\n';
  }
}

bc::FieldBoundary case_boundary(const graph::MeshGraph& g, const meshio::FieldSpec& field) {
  bc::FieldBoundary fb{field.name, {}};
  for (const auto& patch : g.patches) {
    if (patch.is_empty()) {
      fb.patch.push_back(bc::BoundarySpec::empty());
      continue;
    }
    auto it = field.boundary.find(patch.name);
    if (it == field.boundary.end()) {
      fail(ErrorCode::MissingBoundarySpec, "field '" + field.name + "' has no entry for patch '" + patch.name + "'");
    }
    fb.patch.push_back(it->second);
  }
  return fb;
}

FlowProblem flow_problem_from_case(const meshio::CaseConfig& cfg, std::shared_ptr<const graph::MeshGraph> g) {
  auto U = case_boundary(*g, cfg.field("U"));
  auto p = case_boundary(*g, cfg.field("p"));
  FlowProblem P = make_flow_problem(std::move(g), std::move(U), std::move(p), cfg.nu, cfg.convection_U, cfg.diffusion);
  P.rho = cfg.rho;
  P.solver_U = cfg.solver_U;
  P.solver_p = cfg.solver_p;
  P.n_correctors = cfg.n_correctors;
  P.n_nonorth_correctors = cfg.n_nonorth_correctors;
  P.p_ref_cell = cfg.p_ref_cell;
  P.p_ref_value = cfg.p_ref_value;
  P.explicit_predictor = cfg.explicit_predictor;
  if (P.p_ref_cell >= P.graph->n_cells) fail(ErrorCode::InvalidConfig, "pRefCell outside the mesh");
  return P;
}

FlowState flow_state_from_case(const FlowProblem& P, const meshio::CaseConfig& cfg) {
  const auto& U = cfg.field("U");
  const auto& p = cfg.field("p");
  std::vector<double> p0;
  p0.reserve(p.internal.size());
  for (const auto& v : p.internal) p0.push_back(v.x);
  return initial_flow_state(P, U.internal, p0, cfg.start_time);
}

ScalarTransportProblem scalar_problem_from_case(const meshio::CaseConfig& cfg,
                                                std::shared_ptr<const graph::MeshGraph> g) {
  auto T = case_boundary(*g, cfg.field("T"));
  const bool advect = cfg.application == "scalarTransportFoam";
  ScalarTransportProblem P = make_scalar_problem(g, std::move(T), cfg.diffusivity, cfg.convection_T,
                                                 cfg.time_scheme, cfg.diffusion);
  P.solver = cfg.solver_T;
  if (!advect) return P;
  const auto& U = cfg.field("U");
  if (U.internal.size() == 1) {
    set_uniform_velocity(P, U.internal[0]);
    return P;
  }
  const auto Ub = case_boundary(*g, U);
  for (std::size_t e = 0; e < g->n_edges; ++e) {
    const double w = g->weight[e];
    const Vec3 uf = w * U.internal_value(g->owner[e]) + (1.0 - w) * U.internal_value(g->neighbour[e]);
    P.mdot[e] = dot(uf, g->sf[e]);
  }
  for (const auto& patch : g->patches) {
    const auto& spec = Ub.patch[static_cast<std::size_t>(&patch - g->patches.data())];
    for (std::size_t b = patch.start; b < patch.start + patch.size; ++b) {
      if (!g->bactive[b]) continue;
      const Vec3 uc = U.internal_value(g->bcell[b]);
      Vec3 ub;
      for (int c = 0; c < 3; ++c) {
        ub[c] = bc::boundary_face_value(spec, c, uc[c], g->bxf[b], norm(g->bd[b]), cfg.start_time);
      }
      P.mdot_b[b] = dot(ub, g->bsf[b]);
    }
  }
  return P;
}

Vector scalar_state_from_case(const graph::MeshGraph& g, const meshio::CaseConfig& cfg) {
  const auto& T = cfg.field("T");
  Vector phi(g.n_cells);
  for (std::size_t c = 0; c < g.n_cells; ++c) phi[c] = T.internal_value(c).x;
  return phi;
}

}  // namespace fvg::solvers
