#include "fvgraph/solvers/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fvgraph/ad/ops.hpp"
#include "fvgraph/common/error.hpp"
#include "fvgraph/graph/primitives.hpp"
#include "fvgraph/solvers/transport.hpp"

namespace fvg::solvers {

namespace {

bc::SlotResolver resolver(const ParamSet& p) {
  return [&p](const std::string& name) { return p.slot(name); };
}

bool has_dirichlet(const graph::MeshGraph& g, const fvops::BoundaryAffine& a) {
  for (std::size_t b = 0; b < g.n_boundary; ++b) {
    if (g.bactive[b] && a.cell_coef[b] == 0.0) return true;
  }
  return false;
}

}  // namespace

PoissonResult solve_poisson(const graph::MeshGraph& g, std::span<const double> source, const bc::FieldBoundary& bcs,
                            const PoissonOptions& opt) {
  if (source.size() != g.n_cells) fail(ErrorCode::ShapeError, "Poisson source size does not match the mesh");
  ad::Tape tape(false);
  ParamSet params(tape);
  const fvops::BoundaryAffine aff = bc::boundary_affine(g, bcs, 0, 0.0, resolver(params));
  if (!has_dirichlet(g, aff) && opt.null_space == linalg::NullSpace::None) {
    fail(ErrorCode::InvalidConfig, "Poisson problem needs a fixed-value patch or a null-space mode");
  }
  const fvops::DiffusionGeometry dg = fvops::diffusion_geometry(g, opt.mode);
  const linalg::GraphPattern pattern = linalg::GraphPattern::from_graph(g);
  const Var gamma = tape.scalar_constant(1.0);
  const TransportOperator L = assemble_transport(g, dg, {}, {}, gamma, aff, params.vars());
  const auto sys = linalg::make_system(pattern, L.diag, L.upper, L.lower, opt.solver, opt.null_space, opt.ref_cell);
  Vector fv(g.n_cells);
  for (std::size_t c = 0; c < g.n_cells; ++c) fv[c] = -source[c] * g.volume[c];
  const Var base = ad::add_vec_const(L.rhs, fv);
  const auto mask = bc::dirichlet_mask(g, aff);

  PoissonResult res;
  Var phi = tape.constant(Vector(g.n_cells, 0.0));
  const int outer = dg.orthogonal ? 1 : std::max(1, opt.max_outer);
  for (int it = 0; it < outer; ++it) {
    Var rhs = base;
    if (it > 0) {
      const Var phib = fvops::boundary_values(g, phi, aff, params.vars());
      rhs = add_opt(rhs, explicit_terms(g, dg, phi, phib, {}, gamma, fvops::ConvectionScheme::Upwind, mask));
    }
    linalg::SolveReport rep;
    const Var next = linalg::sparse_solve(sys, rhs, &rep, phi.value());
    res.reports.push_back(rep);
    double change = 0.0;
    for (std::size_t c = 0; c < g.n_cells; ++c) change = std::max(change, std::abs(next[c] - phi[c]));
    phi = next;
    res.outer_iterations = it + 1;
    res.last_change = change;
    if (it > 0 && change < opt.outer_tol) break;
  }
  res.phi = phi.value();
  graph::check_finite(res.phi, "Poisson solution");
  return res;
}

ScalarTransportProblem make_scalar_problem(std::shared_ptr<const graph::MeshGraph> g, bc::FieldBoundary bcs,
                                           double diffusivity, fvops::ConvectionScheme scheme,
                                           fvops::TimeScheme time, fvops::DiffusionMode mode) {
  ScalarTransportProblem p;
  p.pattern = linalg::GraphPattern::from_graph(*g);
  p.dg = fvops::diffusion_geometry(*g, mode);
  p.bc = std::move(bcs);
  p.diffusivity = diffusivity;
  p.scheme = scheme;
  p.time = time;
  p.mdot.assign(g->n_edges, 0.0);
  p.mdot_b.assign(g->n_boundary, 0.0);
  p.graph = std::move(g);
  return p;
}

void set_uniform_velocity(ScalarTransportProblem& p, const Vec3& u) {
  const auto& g = *p.graph;
  for (std::size_t e = 0; e < g.n_edges; ++e) p.mdot[e] = dot(u, g.sf[e]);
  for (std::size_t b = 0; b < g.n_boundary; ++b) p.mdot_b[b] = g.bactive[b] ? dot(u, g.bsf[b]) : 0.0;
}

Var scalar_step(const ScalarTransportProblem& p, ParamSet& params, const Var& phi, double t_old, double dt,
                linalg::SolveReport* report) {
  if (!(dt > 0.0)) fail(ErrorCode::InvalidConfig, "time step must be positive");
  const auto& g = *p.graph;
  ad::Tape& tape = phi.tape();
  const double t_new = t_old + dt;
  const auto slot = resolver(params);
  const fvops::BoundaryAffine aff_new = bc::boundary_affine(g, p.bc, 0, t_new, slot);
  const fvops::BoundaryAffine aff_old = bc::boundary_affine(g, p.bc, 0, t_old, slot);
  Var gamma;
  if (params.has("DT")) gamma = params.get_or("DT", p.diffusivity);
  else if (p.diffusivity != 0.0) gamma = tape.scalar_constant(p.diffusivity);
  const Var mdot = tape.constant(p.mdot);
  const Var mdot_b = tape.constant(p.mdot_b);
  const TransportOperator L = assemble_transport(g, p.dg, mdot, mdot_b, gamma, aff_new, params.vars());
  const Var phib_old = fvops::boundary_values(g, phi, aff_old, params.vars());
  const Var expl =
      explicit_terms(g, p.dg, phi, phib_old, mdot, gamma, p.scheme, bc::dirichlet_mask(g, aff_old));
  const Var vdt = cell_constant(tape, g, 1.0 / dt);

  Var next;
  switch (p.time) {
    case fvops::TimeScheme::BackwardEuler: {
      const Var diag = ad::add(L.diag, vdt);
      const Var rhs = add_opt(ad::add(ad::mul(vdt, phi), L.rhs), expl);
      const auto sys = linalg::make_system(p.pattern, diag, L.upper, L.lower, p.solver);
      next = linalg::sparse_solve(sys, rhs, report, phi.value());
      break;
    }
    case fvops::TimeScheme::CrankNicolson: {
      const TransportOperator L_old = assemble_transport(g, p.dg, mdot, mdot_b, gamma, aff_old, params.vars());
      const Var diag = ad::add(ad::scale(L.diag, 0.5), vdt);
      const Var upper = ad::scale(L.upper, 0.5);
      const Var lower = ad::scale(L.lower, 0.5);
      const Var lphi = linalg::matvec(g, L.diag, L.upper, L.lower, phi);
      Var rhs = ad::sub(ad::mul(vdt, phi), ad::scale(lphi, 0.5));
      rhs = ad::add(rhs, ad::scale(ad::add(L.rhs, L_old.rhs), 0.5));
      rhs = add_opt(rhs, expl);
      const auto sys = linalg::make_system(p.pattern, diag, upper, lower, p.solver);
      next = linalg::sparse_solve(sys, rhs, report, phi.value());
      break;
    }
    case fvops::TimeScheme::ForwardEuler: {
      const TransportOperator L_old = assemble_transport(g, p.dg, mdot, mdot_b, gamma, aff_old, params.vars());
      const Var lphi = linalg::matvec(g, L_old.diag, L_old.upper, L_old.lower, phi);
      const Var net = add_opt(ad::sub(L_old.rhs, lphi), expl);
      Vector inv(g.n_cells);
      for (std::size_t c = 0; c < g.n_cells; ++c) inv[c] = dt / g.volume[c];
      next = ad::add(phi, ad::mul_const(net, inv));
      break;
    }
  }
  return next;
}

Vector scalar_step(const ScalarTransportProblem& p, std::span<const double> phi, double t_old, double dt,
                   const ParamValues& values, linalg::SolveReport* report) {
  ad::Tape tape(false);
  ParamSet params = make_params(tape, values, false);
  const Var v = tape.constant(Vector(phi.begin(), phi.end()));
  return scalar_step(p, params, v, t_old, dt, report).value();
}

ScalarRunResult run_scalar(const ScalarTransportProblem& p, Vector phi, double t0, double dt, int max_steps,
                           double steady_tol, const ParamValues& params) {
  ScalarRunResult r;
  r.t = t0;
  for (int k = 0; k < max_steps; ++k) {
    Vector next = scalar_step(p, phi, r.t, dt, params);
    double change = 0.0;
    for (std::size_t c = 0; c < next.size(); ++c) {
      if (!std::isfinite(next[c])) {
        fail(ErrorCode::NumericalBlowup, "non-finite scalar in cell " + std::to_string(c) + " at step " +
                                             std::to_string(k + 1));
      }
      change = std::max(change, std::abs(next[c] - phi[c]));
    }
    phi = std::move(next);
    r.t += dt;
    r.steps = k + 1;
    r.last_change = change / dt;
    if (steady_tol > 0.0 && r.last_change < steady_tol) {
      r.steady = true;
      break;
    }
  }
  r.phi = std::move(phi);
  return r;
}

}  // namespace fvg::solvers
