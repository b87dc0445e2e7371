#include "fvgraph/solvers/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
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

bool same_coefficients(const fvops::BoundaryAffine& a, const fvops::BoundaryAffine& b) {
  return a.cell_coef == b.cell_coef;
}

Vector per_volume(const graph::MeshGraph& g, double factor) {
  Vector v(g.n_cells);
  for (std::size_t c = 0; c < g.n_cells; ++c) v[c] = factor / g.volume[c];
  return v;
}

double rel_residual(const Vector& b, const Vector& ax) {
  double rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    rn += (b[i] - ax[i]) * (b[i] - ax[i]);
    bn += b[i] * b[i];
  }
  return bn > 0.0 ? std::sqrt(rn / bn) : std::sqrt(rn);
}

struct WindkesselInputs {
  Var rp, c, rd;
  bc::WindkesselScheme scheme;
  const graph::BoundaryPatch* patch;
};

std::vector<WindkesselInputs> windkessel_inputs(const FlowProblem& P, ParamSet& params) {
  std::vector<WindkesselInputs> out;
  for (std::size_t k : P.windkessel_patches) {
    const auto& patch = P.graph->patches[k];
    const auto& spec = P.p.patch[k];
    WindkesselInputs w{params.get_or(windkessel_param_name("Rp", patch.name), spec.windkessel.Rp),
                       params.get_or(windkessel_param_name("C", patch.name), spec.windkessel.C),
                       params.get_or(windkessel_param_name("Rd", patch.name), spec.windkessel.Rd),
                       spec.windkessel_scheme, &patch};
    bc::validate({w.rp[0], w.c[0], w.rd[0]});
    out.push_back(w);
  }
  return out;
}

}  // namespace

std::string windkessel_param_name(const std::string& which, const std::string& patch) { return which + ":" + patch; }

FlowProblem make_flow_problem(std::shared_ptr<const graph::MeshGraph> g, bc::FieldBoundary U, bc::FieldBoundary p,
                              double nu, fvops::ConvectionScheme convection, fvops::DiffusionMode mode) {
  for (const auto* f : {&U, &p}) {
    if (f->patch.size() != g->patches.size()) {
      fail(ErrorCode::MissingBoundarySpec, "field '" + f->field + "' has " + std::to_string(f->patch.size()) +
                                               " patch entries for " + std::to_string(g->patches.size()) + " patches");
    }
  }
  if (!(nu >= 0.0)) fail(ErrorCode::InvalidConfig, "viscosity must be non-negative");
  FlowProblem P;
  P.pattern = linalg::GraphPattern::from_graph(*g);
  P.dg = fvops::diffusion_geometry(*g, mode);
  for (std::size_t k = 0; k < g->patches.size(); ++k) {
    if (p.patch[k].kind == bc::BcKind::Windkessel) {
      bc::validate(p.patch[k].windkessel);
      P.windkessel_patches.push_back(k);
    }
    if (U.patch[k].kind == bc::BcKind::Windkessel) {
      fail(ErrorCode::InvalidConfig, "Windkessel condition applies to pressure only (patch '" +
                                         g->patches[k].name + "')");
    }
  }
  P.U = std::move(U);
  P.p = std::move(p);
  P.nu = nu;
  P.convection = convection;
  P.graph = std::move(g);
  return P;
}

std::vector<Var> FlowVars::list() const {
  std::vector<Var> v{ux, uy, uz, p, mdot, mdot_b};
  v.insert(v.end(), pc.begin(), pc.end());
  return v;
}

FlowVars FlowVars::from_list(std::span<const Var> v, double t) {
  if (v.size() < 6) fail(ErrorCode::ShapeError, "flow state needs at least six arrays");
  FlowVars s{v[0], v[1], v[2], v[3], v[4], v[5], {}, t};
  s.pc.assign(v.begin() + 6, v.end());
  return s;
}

FlowVars to_vars(ad::Tape& tape, const FlowState& s, bool differentiable) {
  auto mk = [&](const Vector& x) { return differentiable ? tape.leaf(x) : tape.constant(x); };
  FlowVars v{mk(s.ux), mk(s.uy), mk(s.uz), mk(s.p), mk(s.mdot), mk(s.mdot_b), {}, s.t};
  for (double pc : s.windkessel_pc) v.pc.push_back(mk({pc}));
  return v;
}

FlowState to_state(const FlowVars& v) {
  FlowState s{v.ux.value(), v.uy.value(), v.uz.value(), v.p.value(), v.mdot.value(), v.mdot_b.value(), {}, {}, v.t};
  for (const Var& pc : v.pc) s.windkessel_pc.push_back(pc[0]);
  return s;
}

std::vector<Vec3> velocity(const FlowState& s) {
  std::vector<Vec3> u(s.ux.size());
  for (std::size_t c = 0; c < u.size(); ++c) u[c] = {s.ux[c], s.uy[c], s.uz[c]};
  return u;
}

int StepReport::pressure_iterations() const {
  int n = 0;
  for (const auto& r : pressure) n += r.iterations;
  return n;
}

FlowState initial_flow_state(const FlowProblem& P, std::span<const Vec3> U0, std::span<const double> p0, double t0,
                             const ParamValues& values) {
  const auto& g = *P.graph;
  if ((U0.size() != 1 && U0.size() != g.n_cells) || (p0.size() != 1 && p0.size() != g.n_cells)) {
    fail(ErrorCode::ShapeError, "initial fields must be uniform or one value per cell");
  }
  ad::Tape tape(false);
  ParamSet params = make_params(tape, values, false);
  FlowState s;
  s.t = t0;
  s.ux.resize(g.n_cells);
  s.uy.resize(g.n_cells);
  s.uz.resize(g.n_cells);
  s.p.resize(g.n_cells);
  for (std::size_t c = 0; c < g.n_cells; ++c) {
    const Vec3 u = U0.size() == 1 ? U0[0] : U0[c];
    s.ux[c] = u.x;
    s.uy[c] = u.y;
    s.uz[c] = u.z;
    s.p[c] = p0.size() == 1 ? p0[0] : p0[c];
  }
  const auto wk = windkessel_inputs(P, params);
  for (std::size_t k = 0; k < wk.size(); ++k) {
    const auto& spec = P.p.patch[P.windkessel_patches[k]];
    s.windkessel_pc.push_back(spec.windkessel_pc0);
    params.set(bc::windkessel_slot_name(wk[k].patch->name), tape.scalar_constant(spec.windkessel_pc0 / P.rho));
  }
  const auto slot = resolver(params);
  std::array<Var, 3> comp{tape.constant(s.ux), tape.constant(s.uy), tape.constant(s.uz)};
  std::array<Var, 3> ub;
  for (int c = 0; c < 3; ++c) {
    ub[static_cast<std::size_t>(c)] = fvops::boundary_values(
        g, comp[static_cast<std::size_t>(c)], bc::boundary_affine(g, P.U, c, t0, slot), params.vars());
  }
  s.mdot = fvops::face_flux(g, comp[0], comp[1], comp[2]).value();
  s.mdot_b = fvops::boundary_face_flux(g, ub[0], ub[1], ub[2]).value();
  for (std::size_t k = 0; k < wk.size(); ++k) {
    const auto& patch = *wk[k].patch;
    double q = 0.0;
    for (std::size_t b = patch.start; b < patch.start + patch.size; ++b) q += s.mdot_b[b];
    s.windkessel_po.push_back(s.windkessel_pc[k] + wk[k].rp[0] * q);
  }
  return s;
}

FlowVars piso_step(const FlowProblem& P, ParamSet& params, const FlowVars& s, double dt, StepReport* report) {
  if (!(dt > 0.0)) fail(ErrorCode::InvalidConfig, "time step must be positive");
  if (P.n_correctors < 1) fail(ErrorCode::InvalidConfig, "PISO needs at least one corrector");
  if (s.pc.size() != P.windkessel_patches.size()) fail(ErrorCode::ShapeError, "Windkessel state size mismatch");
  const auto& g = *P.graph;
  ad::Tape& tape = s.ux.tape();
  const double t_new = s.t + dt;

  // Windkessel outlets: p_o from the capacitor state at t^n and the latest outlet flow.
  const auto wk = windkessel_inputs(P, params);
  std::vector<Var> wk_out(wk.size());
  auto update_windkessel = [&](const Var& mdot_b) {
    for (std::size_t k = 0; k < wk.size(); ++k) {
      const Var q = ad::sum(ad::slice(mdot_b, wk[k].patch->start, wk[k].patch->size));
      wk_out[k] = bc::windkessel_step(s.pc[k], wk[k].rp, wk[k].c, wk[k].rd, q, dt, wk[k].scheme);
      params.set(bc::windkessel_slot_name(wk[k].patch->name), ad::scale(ad::slice(wk_out[k], 1, 1), 1.0 / P.rho));
    }
  };
  update_windkessel(s.mdot_b);

  const auto slot = resolver(params);
  std::array<fvops::BoundaryAffine, 3> affU;
  for (int c = 0; c < 3; ++c) affU[static_cast<std::size_t>(c)] = bc::boundary_affine(g, P.U, c, t_new, slot);
  const fvops::BoundaryAffine affP = bc::boundary_affine(g, P.p, 0, t_new, slot);
  const auto pmask = bc::dirichlet_mask(g, affP);
  const bool p_dirichlet = std::any_of(pmask.begin(), pmask.end(), [](std::uint8_t m) { return m != 0; });
  const Var nu = params.get_or("nu", P.nu);

  // Momentum predictor.
  const std::array<Var, 3> U{s.ux, s.uy, s.uz};
  const Var vdt = cell_constant(tape, g, 1.0 / dt);
  Vector neg_volume(g.volume);
  for (double& v : neg_volume) v = -v;
  const Var gradp_old = fvops::gradient(g, s.p, fvops::boundary_values(g, s.p, affP, params.vars()));

  std::array<Var, 3> diagA, upper, lower, b0, Ustar;
  std::array<std::shared_ptr<const linalg::LinearSystem>, 3> msys;
  std::array<std::size_t, 3> shared{0, 1, 2};  // component whose matrix is reused
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < c; ++k) {
      if (same_coefficients(affU[k], affU[c])) {
        shared[c] = k;
        break;
      }
    }
    const TransportOperator L = assemble_transport(g, P.dg, s.mdot, s.mdot_b, nu, affU[c], params.vars());
    if (shared[c] != c) {
      diagA[c] = diagA[shared[c]];
      upper[c] = upper[shared[c]];
      lower[c] = lower[shared[c]];
    } else {
      diagA[c] = ad::add(L.diag, vdt);
      upper[c] = L.upper;
      lower[c] = L.lower;
    }
    const Var Ub = fvops::boundary_values(g, U[c], affU[c], params.vars());
    const Var expl = explicit_terms(g, P.dg, U[c], Ub, s.mdot, nu, P.convection, bc::dirichlet_mask(g, affU[c]));
    b0[c] = add_opt(ad::add(ad::mul(vdt, U[c]), L.rhs), expl);
    const Var b = ad::add(b0[c], ad::mul_const(ad::strided(gradp_old, c, 3), neg_volume));
    if (report) {
      report->momentum_residual[c] =
          rel_residual(b.value(), linalg::matvec(g, diagA[c], upper[c], lower[c], U[c]).value());
    }
    if (P.explicit_predictor) {
      const Var r = ad::sub(b, linalg::matvec(g, diagA[c], upper[c], lower[c], U[c]));
      Ustar[c] = ad::add(U[c], ad::mul_const(r, per_volume(g, dt)));
    } else {
      msys[c] = shared[c] != c ? msys[shared[c]]
                               : linalg::make_system(P.pattern, diagA[c], upper[c], lower[c], P.solver_U);
      linalg::SolveReport rep;
      Ustar[c] = linalg::sparse_solve(msys[c], b, &rep, U[c].value());
      if (report) report->momentum[c] = rep;
    }
  }

  // Pressure operator: weights 1/a_f^P on the graph edges, fixed for all correctors.
  const Var aP = diagA[0];
  const double min_aP = *std::min_element(aP.value().begin(), aP.value().end());
  if (!(min_aP >= 1e-300)) {
    fail(ErrorCode::InvalidCoefficients, "momentum diagonal a_P = " + std::to_string(min_aP) + " is not positive");
  }
  const Var aPV = ad::mul_const(aP, per_volume(g, 1.0));
  const Var rAU = ad::reciprocal(aPV);
  const Var rAUf = ad::reciprocal(fvops::interpolate(g, aPV));
  const Var ge = ad::mul_const(rAUf, P.dg.coef);
  Vector bmask(g.n_boundary, 0.0);
  for (std::size_t b = 0; b < g.n_boundary; ++b) bmask[b] = pmask[b] ? P.dg.bcoef[b] : 0.0;
  const Var gb = ad::mul_const(ad::gather(rAU, g.bcell), bmask);
  const Var pdiag = ad::add(ad::add(ad::scatter_add(ge, g.owner, g.n_cells), ad::scatter_add(ge, g.neighbour, g.n_cells)),
                            ad::scatter_add(gb, g.bcell, g.n_cells));
  const Var poff = ad::neg(ge);
  const auto psys = linalg::make_system(P.pattern, pdiag, poff, poff, P.solver_p,
                                        p_dirichlet ? linalg::NullSpace::None : linalg::NullSpace::PinCell,
                                        P.p_ref_cell, P.p_ref_value);

  std::array<Var, 3> Unew = Ustar;
  Var p = s.p, mdot, mdot_b;
  for (int corr = 0; corr < P.n_correctors; ++corr) {
    if (corr > 0 && !wk.empty()) update_windkessel(mdot_b);
    std::array<Var, 3> HbyA, HbyAb;
    for (std::size_t c = 0; c < 3; ++c) {
      const Var H = ad::sub(b0[c], linalg::offdiag_matvec(g, upper[c], lower[c], Unew[c]));
      HbyA[c] = ad::div(H, diagA[c]);
      HbyAb[c] = fvops::boundary_values(g, HbyA[c], affU[c], params.vars());
    }
    const Var phiH = fvops::face_flux(g, HbyA[0], HbyA[1], HbyA[2]);
    const Var bflux = fvops::boundary_face_flux(g, HbyAb[0], HbyAb[1], HbyAb[2]);
    const Var pconst = boundary_constants(g, tape, affP, params.vars());
    const Var brhs = ad::scatter_add(ad::mul(gb, pconst), g.bcell, g.n_cells);
    Var edge = phiH;
    for (int nn = 0; nn <= P.n_nonorth_correctors; ++nn) {
      edge = phiH;
      if (!P.dg.orthogonal) {
        const Var gp = fvops::gradient(g, p, fvops::boundary_values(g, p, affP, params.vars()));
        edge = ad::sub(phiH, ad::mul(rAUf, fvops::nonorth_flux(g, P.dg, gp)));
      }
      const Var rhs = ad::add(ad::neg(fvops::face_sum(g, edge, bflux)), brhs);
      linalg::SolveReport rep;
      p = linalg::sparse_solve(psys, rhs, &rep, p.value());
      if (report) report->pressure.push_back(rep);
    }
    const Var dp = ad::sub(ad::gather(p, g.neighbour), ad::gather(p, g.owner));
    mdot = ad::sub(edge, ad::mul(ge, dp));
    const Var pb = fvops::boundary_values(g, p, affP, params.vars());
    mdot_b = ad::sub(bflux, ad::mul(gb, ad::sub(pb, ad::gather(p, g.bcell))));
    const Var gradp = fvops::gradient(g, p, pb);
    for (std::size_t c = 0; c < 3; ++c) Unew[c] = ad::sub(HbyA[c], ad::mul(rAU, ad::strided(gradp, c, 3)));
  }

  FlowVars out{Unew[0], Unew[1], Unew[2], p, mdot, mdot_b, {}, t_new};
  if (!wk.empty()) {
    update_windkessel(mdot_b);
    for (std::size_t k = 0; k < wk.size(); ++k) out.pc.push_back(ad::slice(wk_out[k], 0, 1));
  }

  const Vector div = fvops::divergence(g, mdot.value(), mdot_b.value());
  double max_div = 0.0;
  for (std::size_t c = 0; c < g.n_cells; ++c) max_div = std::max(max_div, std::abs(div[c] * g.volume[c]));
  double net = 0.0;
  for (double f : mdot_b.value()) net += f;
  for (const Var& v : {out.ux, out.uy, out.uz, out.p}) graph::check_finite(v.value(), "flow state");
  if (report) {
    report->max_divergence = max_div;
    report->net_boundary_flux = net;
    report->outlet_q.clear();
    report->outlet_po.clear();
    for (std::size_t k = 0; k < wk.size(); ++k) {
      double q = 0.0;
      for (std::size_t b = wk[k].patch->start; b < wk[k].patch->start + wk[k].patch->size; ++b) q += mdot_b[b];
      report->outlet_q.push_back(q);
      report->outlet_po.push_back(wk_out[k][1]);
    }
  }
  const double bound = P.continuity_factor * P.solver_p.abs_tol;
  if (std::isfinite(bound) && (max_div > bound || std::abs(net) > bound)) {
    fail(ErrorCode::ContinuityViolation, "max cell imbalance " + std::to_string(max_div) + ", net boundary flux " +
                                             std::to_string(net) + " exceed " + std::to_string(bound));
  }
  return out;
}

FlowState piso_step(const FlowProblem& P, const FlowState& s, double dt, const ParamValues& values,
                    StepReport* report) {
  ad::Tape tape(false);
  ParamSet params = make_params(tape, values, false);
  StepReport local;
  StepReport* rep = report ? report : &local;
  FlowState out = to_state(piso_step(P, params, to_vars(tape, s), dt, rep));
  out.windkessel_po = rep->outlet_po;
  return out;
}

}  // namespace fvg::solvers
