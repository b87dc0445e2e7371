#include "fvgraph/solvers/transport.hpp"

#include "fvgraph/ad/ops.hpp"

namespace fvg::solvers {

using ad::Vector;

Var add_opt(const Var& a, const Var& b) {
  if (!a.valid()) return b;
  if (!b.valid()) return a;
  return ad::add(a, b);
}

Var cell_constant(ad::Tape& tape, const graph::MeshGraph& g, double per_volume_factor) {
  Vector v(g.volume);
  for (double& x : v) x *= per_volume_factor;
  return tape.constant(std::move(v));
}

Var boundary_constants(const graph::MeshGraph& g, ad::Tape& tape, const fvops::BoundaryAffine& a,
                       std::span<const Var> params) {
  fvops::BoundaryAffine c = a;
  std::fill(c.cell_coef.begin(), c.cell_coef.end(), 0.0);
  const Var zero = tape.constant(Vector(g.n_cells, 0.0));
  return fvops::boundary_values(g, zero, c, params);
}

TransportOperator assemble_transport(const graph::MeshGraph& g, const fvops::DiffusionGeometry& dg, const Var& mdot,
                                     const Var& mdot_b, const Var& gamma, const fvops::BoundaryAffine& a,
                                     std::span<const Var> params) {
  ad::Tape& tape = mdot.valid() ? mdot.tape() : gamma.tape();
  TransportOperator op;
  Var off_o, off_n;  // lower and upper before diffusion
  Var diff_e;
  if (gamma.valid()) diff_e = ad::mul(tape.constant(dg.coef), gamma);
  if (mdot.valid()) {
    op.lower = add_opt(ad::relu(mdot), diff_e);
    op.upper = add_opt(ad::relu(ad::neg(mdot)), diff_e);
  } else {
    op.lower = diff_e;
    op.upper = diff_e;
  }
  // lower/upper hold -A entries here; diag collects them before negation
  Var diag = ad::add(ad::scatter_add(op.lower, g.owner, g.n_cells), ad::scatter_add(op.upper, g.neighbour, g.n_cells));
  op.lower = ad::neg(op.lower);
  op.upper = ad::neg(op.upper);

  const Var bconst = boundary_constants(g, tape, a, params);
  Vector one_minus(g.n_boundary), bcoef(g.n_boundary);
  for (std::size_t b = 0; b < g.n_boundary; ++b) {
    one_minus[b] = g.bactive[b] ? 1.0 - a.cell_coef[b] : 0.0;
    bcoef[b] = g.bactive[b] ? dg.bcoef[b] : 0.0;
  }
  Var bdiag, bfac;
  if (mdot_b.valid()) {
    bdiag = ad::mul_const(mdot_b, a.cell_coef);
    bfac = ad::neg(mdot_b);
  }
  if (gamma.valid()) {
    Vector c1(g.n_boundary);
    for (std::size_t b = 0; b < g.n_boundary; ++b) c1[b] = bcoef[b] * one_minus[b];
    bdiag = add_opt(bdiag, ad::mul(tape.constant(std::move(c1)), gamma));
    bfac = add_opt(bfac, ad::mul(tape.constant(bcoef), gamma));
  }
  if (bdiag.valid()) diag = ad::add(diag, ad::scatter_add(bdiag, g.bcell, g.n_cells));
  op.diag = diag;
  if (bfac.valid()) op.rhs = ad::scatter_add(ad::mul(bfac, bconst), g.bcell, g.n_cells);
  else op.rhs = tape.constant(Vector(g.n_cells, 0.0));
  return op;
}

Var explicit_terms(const graph::MeshGraph& g, const fvops::DiffusionGeometry& dg, const Var& phi, const Var& phi_b,
                   const Var& mdot, const Var& gamma, fvops::ConvectionScheme scheme,
                   std::span<const std::uint8_t> dirichlet) {
  const bool conv = mdot.valid() && scheme != fvops::ConvectionScheme::Upwind;
  const bool nonorth = gamma.valid() && !dg.orthogonal;
  if (!conv && !nonorth) return {};
  const bool need_grad = nonorth || scheme == fvops::ConvectionScheme::SOU || scheme == fvops::ConvectionScheme::QUICK;
  Var grad;
  if (need_grad) grad = fvops::gradient(g, phi, phi_b);
  Var out;
  if (conv) {
    const Var corr = fvops::convection_correction(g, phi, grad, mdot, scheme);
    out = ad::neg(fvops::face_sum(g, corr, {}));
  }
  if (nonorth) {
    const Var fe = fvops::nonorth_flux(g, dg, grad);
    const Var fb = fvops::boundary_nonorth_flux(g, dg, grad, dirichlet);
    out = add_opt(out, ad::mul(fvops::face_sum(g, fe, fb), gamma));
  }
  return out;
}

}  // namespace fvg::solvers
