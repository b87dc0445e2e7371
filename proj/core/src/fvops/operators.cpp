#include "fvgraph/fvops/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fvgraph/common/error.hpp"
#include "fvgraph/graph/primitives.hpp"

namespace fvg::fvops {

using graph::MeshGraph;

std::pair<double, Vec3> split_face_vector(const Vec3& s, const Vec3& d, DiffusionMode mode) {
  const double dmag = norm(d);
  const Vec3 dh = d / dmag;
  const double smag = norm(s);
  const double sd = dot(s, dh);
  double delta = 0.0;
  switch (mode) {
    case DiffusionMode::None: return {smag, Vec3{}};
    case DiffusionMode::Minimum: delta = sd; break;
    case DiffusionMode::Orthogonal: delta = smag; break;
    case DiffusionMode::OverRelaxed: {
      const double c = std::abs(sd) / smag;
      if (c < 1e-6) fail(ErrorCode::ExtremeNonOrthogonality, "face normal nearly perpendicular to cell offset");
      delta = smag / c;
      break;
    }
  }
  return {delta, s - delta * dh};
}

DiffusionGeometry diffusion_geometry(const MeshGraph& g, DiffusionMode mode) {
  DiffusionGeometry dg;
  dg.mode = mode;
  dg.coef.resize(g.n_edges);
  dg.k.resize(g.n_edges);
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    auto [delta, k] = split_face_vector(g.sf[e], g.d[e], mode);
    dg.coef[e] = delta / norm(g.d[e]);
    dg.k[e] = k;
    if (norm(k) > 1e-12 * norm(g.sf[e])) dg.orthogonal = false;
  }
  dg.bcoef.resize(g.n_boundary);
  dg.bk.resize(g.n_boundary);
  for (std::size_t b = 0; b < g.n_boundary; ++b) {
    if (!g.bactive[b]) continue;
    auto [delta, k] = split_face_vector(g.bsf[b], g.bd[b], mode);
    dg.bcoef[b] = delta / norm(g.bd[b]);
    dg.bk[b] = k;
    if (norm(k) > 1e-12 * norm(g.bsf[b])) dg.orthogonal = false;
  }
  return dg;
}

Vector interpolate_linear(const MeshGraph& g, std::span<const double> phi) {
  Vector out(g.n_edges);
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    out[e] = g.weight[e] * phi[g.owner[e]] + (1.0 - g.weight[e]) * phi[g.neighbour[e]];
  }
  return out;
}

namespace {

void interpolate_transpose(const MeshGraph& g, std::span<const double> adj, std::span<double> out) {
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    out[g.owner[e]] += g.weight[e] * adj[e];
    out[g.neighbour[e]] += (1.0 - g.weight[e]) * adj[e];
  }
}

/// Sum of phi_f S_f per cell, one component, in segment order.
Vector surface_sum(const MeshGraph& g, std::span<const double> phi_f, std::span<const double> phi_b, int comp) {
  Vector out(g.n_cells, 0.0);
  graph::parallel_for(g.n_cells, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t c = lo; c < hi; ++c) {
      double s = 0.0;
      for (std::size_t k = g.by_owner.offsets[c]; k < g.by_owner.offsets[c + 1]; ++k) {
        const auto e = g.by_owner.items[k];
        s += phi_f[e] * g.sf[e][static_cast<std::size_t>(comp)];
      }
      for (std::size_t k = g.by_neighbour.offsets[c]; k < g.by_neighbour.offsets[c + 1]; ++k) {
        const auto e = g.by_neighbour.items[k];
        s -= phi_f[e] * g.sf[e][static_cast<std::size_t>(comp)];
      }
      for (std::size_t k = g.by_bcell.offsets[c]; k < g.by_bcell.offsets[c + 1]; ++k) {
        const auto b = g.by_bcell.items[k];
        if (g.bactive[b]) s += phi_b[b] * g.bsf[b][static_cast<std::size_t>(comp)];
      }
      out[c] = s;
    }
  });
  return out;
}

}  // namespace

namespace {

/// Cell gradients from given internal face values.
void gauss_sum(const MeshGraph& g, std::span<const double> phi_f, std::span<const double> phi_b, Vector& grad) {
  for (int comp = 0; comp < 3; ++comp) {
    const Vector s = surface_sum(g, phi_f, phi_b, comp);
    for (std::size_t c = 0; c < g.n_cells; ++c) grad[3 * c + static_cast<std::size_t>(comp)] = s[c] / g.volume[c];
  }
}

/// lin(grad) . skew per internal face.
void skew_term(const MeshGraph& g, std::span<const double> grad, Vector& out) {
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    const auto o = g.owner[e], n = g.neighbour[e];
    const double w = g.weight[e];
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += (w * grad[3 * o + j] + (1.0 - w) * grad[3 * n + j]) * g.skew[e][j];
    out[e] = s;
  }
}

/// Transpose of gauss_sum with respect to the face values: af[e] = (adj_o . S)/V_o - (adj_n . S)/V_n.
void gauss_sum_transpose(const MeshGraph& g, std::span<const double> adj, Vector& af) {
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    const auto o = g.owner[e], n = g.neighbour[e];
    const Vec3 go{adj[3 * o], adj[3 * o + 1], adj[3 * o + 2]};
    const Vec3 gn{adj[3 * n], adj[3 * n + 1], adj[3 * n + 2]};
    af[e] = dot(go, g.sf[e]) / g.volume[o] - dot(gn, g.sf[e]) / g.volume[n];
  }
}

/// Transpose of skew_term: adds into a gradient adjoint.
void skew_term_transpose(const MeshGraph& g, std::span<const double> adj, Vector& ag) {
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    const auto o = g.owner[e], n = g.neighbour[e];
    const double w = g.weight[e];
    for (std::size_t j = 0; j < 3; ++j) {
      ag[3 * o + j] += adj[e] * w * g.skew[e][j];
      ag[3 * n + j] += adj[e] * (1.0 - w) * g.skew[e][j];
    }
  }
}

int effective_corrections(const MeshGraph& g, int k) { return g.skewed ? std::max(0, k) : 0; }

}  // namespace

Vector green_gauss_gradient(const MeshGraph& g, std::span<const double> phi, std::span<const double> phi_b,
                            int skew_corrections) {
  const Vector lin = interpolate_linear(g, phi);
  Vector grad(3 * g.n_cells);
  gauss_sum(g, lin, phi_b, grad);
  Vector phi_f(g.n_edges);
  for (int it = 0; it < effective_corrections(g, skew_corrections); ++it) {
    skew_term(g, grad, phi_f);
    for (std::size_t e = 0; e < g.n_edges; ++e) phi_f[e] += lin[e];
    gauss_sum(g, phi_f, phi_b, grad);
  }
  return grad;
}

Vector divergence(const MeshGraph& g, std::span<const double> mdot, std::span<const double> mdot_b) {
  Vector r = graph::assemble_residual(g, mdot, mdot_b);
  for (std::size_t c = 0; c < g.n_cells; ++c) r[c] /= g.volume[c];
  return r;
}

namespace {

struct HighOrderTerms {
  // phi_HO - phi_U = a_grad . grad_C + a_c phi_C + a_d phi_D
  Vec3 a_grad;
  double a_c = 0.0;
  double a_d = 0.0;
};

HighOrderTerms ho_terms(const MeshGraph& g, std::size_t e, bool owner_upwind, ConvectionScheme scheme) {
  HighOrderTerms t;
  const auto c = owner_upwind ? g.owner[e] : g.neighbour[e];
  const Vec3 dcf = g.xf[e] - g.cell_centroid[c];
  switch (scheme) {
    case ConvectionScheme::Upwind: break;
    case ConvectionScheme::Central: {
      const double w = g.weight[e];
      // w phi_o + (1-w) phi_n - phi_C
      if (owner_upwind) { t.a_c = w - 1.0; t.a_d = 1.0 - w; }
      else { t.a_c = -w; t.a_d = w; }
      break;
    }
    case ConvectionScheme::SOU: t.a_grad = dcf; break;
    case ConvectionScheme::QUICK: {
      const Vec3 dcd = owner_upwind ? g.d[e] : -g.d[e];
      const double beta = dot(dcf, dcd) / dot(dcd, dcd);
      t.a_grad = 0.5 * dcf;
      t.a_c = -0.5 * beta;
      t.a_d = 0.5 * beta;
      break;
    }
  }
  return t;
}

}  // namespace

ConvectiveFaceValues convective_face_value(const MeshGraph& g, std::span<const double> phi,
                                           std::span<const double> grad, std::span<const double> mdot,
                                           ConvectionScheme scheme) {
  ConvectiveFaceValues out;
  out.upwind.resize(g.n_edges);
  out.correction.assign(g.n_edges, 0.0);
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    const bool up = mdot[e] >= 0.0;
    const auto c = up ? g.owner[e] : g.neighbour[e];
    const auto d = up ? g.neighbour[e] : g.owner[e];
    out.upwind[e] = phi[c];
    if (scheme == ConvectionScheme::Upwind) continue;
    const auto t = ho_terms(g, e, up, scheme);
    double delta = t.a_c * phi[c] + t.a_d * phi[d];
    if (!grad.empty()) delta += t.a_grad.x * grad[3 * c] + t.a_grad.y * grad[3 * c + 1] + t.a_grad.z * grad[3 * c + 2];
    out.correction[e] = mdot[e] * delta;
  }
  return out;
}

Var interpolate(const MeshGraph& g, const Var& phi) {
  const MeshGraph* gp = &g;
  return phi.tape().record("interpolate", interpolate_linear(g, phi.value()), {phi},
                           [gp, phi](ad::Tape& t, const Vector& adj) {
                             interpolate_transpose(*gp, adj, t.adjoint_ref(phi));
                           });
}

Var gradient(const MeshGraph& g, const Var& phi, const Var& phi_b, int skew_corrections) {
  const MeshGraph* gp = &g;
  const int k = effective_corrections(g, skew_corrections);
  return phi.tape().record(
      "green_gauss_gradient", green_gauss_gradient(g, phi.value(), phi_b.value(), k), {phi, phi_b},
      [gp, phi, phi_b, k](ad::Tape& t, const Vector& adj) {
        const MeshGraph& g = *gp;
        // grad_k = G(lin + S grad_{k-1}) + Gb phi_b, grad_0 = G lin + Gb phi_b
        Vector gbar = adj;
        Vector lin_bar(g.n_edges, 0.0);
        Vector phib_bar(g.n_boundary, 0.0);
        Vector af(g.n_edges);
        for (int it = k; it >= 0; --it) {
          gauss_sum_transpose(g, gbar, af);
          for (std::size_t e = 0; e < g.n_edges; ++e) lin_bar[e] += af[e];
          for (std::size_t b = 0; b < g.n_boundary; ++b) {
            if (!g.bactive[b]) continue;
            const auto c = g.bcell[b];
            phib_bar[b] += (gbar[3 * c] * g.bsf[b].x + gbar[3 * c + 1] * g.bsf[b].y + gbar[3 * c + 2] * g.bsf[b].z) /
                           g.volume[c];
          }
          if (it == 0) break;
          std::fill(gbar.begin(), gbar.end(), 0.0);
          skew_term_transpose(g, af, gbar);
        }
        if (phi.requires_grad()) interpolate_transpose(g, lin_bar, t.adjoint_ref(phi));
        if (phi_b.requires_grad()) t.accumulate(phi_b, phib_bar);
      });
}

Var face_flux(const MeshGraph& g, const Var& ux, const Var& uy, const Var& uz) {
  const Vector fx = interpolate_linear(g, ux.value());
  const Vector fy = interpolate_linear(g, uy.value());
  const Vector fz = interpolate_linear(g, uz.value());
  Vector m(g.n_edges);
  for (std::size_t e = 0; e < g.n_edges; ++e) m[e] = fx[e] * g.sf[e].x + fy[e] * g.sf[e].y + fz[e] * g.sf[e].z;
  const MeshGraph* gp = &g;
  return ux.tape().record("face_flux", std::move(m), {ux, uy, uz}, [gp, ux, uy, uz](ad::Tape& t, const Vector& adj) {
    const MeshGraph& g = *gp;
    const Var comps[3] = {ux, uy, uz};
    Vector a(g.n_edges);
    for (std::size_t k = 0; k < 3; ++k) {
      if (!comps[k].requires_grad()) continue;
      for (std::size_t e = 0; e < g.n_edges; ++e) a[e] = adj[e] * g.sf[e][k];
      interpolate_transpose(g, a, t.adjoint_ref(comps[k]));
    }
  });
}

Var boundary_face_flux(const MeshGraph& g, const Var& ubx, const Var& uby, const Var& ubz) {
  Vector m(g.n_boundary, 0.0);
  for (std::size_t b = 0; b < g.n_boundary; ++b) {
    if (g.bactive[b]) m[b] = ubx[b] * g.bsf[b].x + uby[b] * g.bsf[b].y + ubz[b] * g.bsf[b].z;
  }
  const MeshGraph* gp = &g;
  return ubx.tape().record("boundary_face_flux", std::move(m), {ubx, uby, ubz},
                           [gp, ubx, uby, ubz](ad::Tape& t, const Vector& adj) {
                             const MeshGraph& g = *gp;
                             const Var comps[3] = {ubx, uby, ubz};
                             for (std::size_t k = 0; k < 3; ++k) {
                               if (!comps[k].requires_grad()) continue;
                               Vector& a = t.adjoint_ref(comps[k]);
                               for (std::size_t b = 0; b < g.n_boundary; ++b) {
                                 if (g.bactive[b]) a[b] += adj[b] * g.bsf[b][k];
                               }
                             }
                           });
}

Var convection_correction(const MeshGraph& g, const Var& phi, const Var& grad, const Var& mdot,
                          ConvectionScheme scheme) {
  const bool uses_grad = scheme == ConvectionScheme::SOU || scheme == ConvectionScheme::QUICK;
  std::span<const double> gspan;
  if (uses_grad) gspan = grad.value();
  Vector corr = convective_face_value(g, phi.value(), gspan, mdot.value(), scheme).correction;
  const MeshGraph* gp = &g;
  std::vector<Var> inputs{phi, mdot};
  if (uses_grad) inputs.push_back(grad);
  return phi.tape().record(
      "convection_correction", std::move(corr), inputs,
      [gp, phi, grad, mdot, scheme, uses_grad](ad::Tape& t, const Vector& adj) {
        const MeshGraph& g = *gp;
        const Vector& p = phi.value();
        const Vector& m = mdot.value();
        const Vector* gv = uses_grad ? &grad.value() : nullptr;
        Vector* aphi = phi.requires_grad() ? &t.adjoint_ref(phi) : nullptr;
        Vector* am = mdot.requires_grad() ? &t.adjoint_ref(mdot) : nullptr;
        Vector* ag = (uses_grad && grad.requires_grad()) ? &t.adjoint_ref(grad) : nullptr;
        for (std::size_t e = 0; e < g.n_edges; ++e) {
          const bool up = m[e] >= 0.0;
          const auto c = up ? g.owner[e] : g.neighbour[e];
          const auto d = up ? g.neighbour[e] : g.owner[e];
          const auto h = ho_terms(g, e, up, scheme);
          if (am) {
            double delta = h.a_c * p[c] + h.a_d * p[d];
            if (gv) delta += h.a_grad.x * (*gv)[3 * c] + h.a_grad.y * (*gv)[3 * c + 1] + h.a_grad.z * (*gv)[3 * c + 2];
            (*am)[e] += adj[e] * delta;
          }
          const double s = adj[e] * m[e];
          if (aphi) {
            (*aphi)[c] += s * h.a_c;
            (*aphi)[d] += s * h.a_d;
          }
          if (ag) {
            (*ag)[3 * c] += s * h.a_grad.x;
            (*ag)[3 * c + 1] += s * h.a_grad.y;
            (*ag)[3 * c + 2] += s * h.a_grad.z;
          }
        }
      });
}

Var nonorth_flux(const MeshGraph& g, const DiffusionGeometry& dg, const Var& grad) {
  const Vector& gv = grad.value();
  Vector out(g.n_edges);
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    const auto o = g.owner[e], n = g.neighbour[e];
    const double w = g.weight[e];
    const Vec3& k = dg.k[e];
    double s = 0.0;
    for (std::size_t j = 0; j < 3; ++j) s += (w * gv[3 * o + j] + (1.0 - w) * gv[3 * n + j]) * k[j];
    out[e] = s;
  }
  const MeshGraph* gp = &g;
  const DiffusionGeometry* dp = &dg;
  return grad.tape().record("nonorth_flux", std::move(out), {grad}, [gp, dp, grad](ad::Tape& t, const Vector& adj) {
    const MeshGraph& g = *gp;
    Vector& ag = t.adjoint_ref(grad);
    for (std::size_t e = 0; e < g.n_edges; ++e) {
      const auto o = g.owner[e], n = g.neighbour[e];
      const double w = g.weight[e];
      const Vec3& k = dp->k[e];
      for (std::size_t j = 0; j < 3; ++j) {
        ag[3 * o + j] += adj[e] * w * k[j];
        ag[3 * n + j] += adj[e] * (1.0 - w) * k[j];
      }
    }
  });
}

Var boundary_nonorth_flux(const MeshGraph& g, const DiffusionGeometry& dg, const Var& grad,
                          std::span<const std::uint8_t> mask) {
  const Vector& gv = grad.value();
  std::vector<std::uint8_t> m(mask.begin(), mask.end());
  Vector out(g.n_boundary, 0.0);
  for (std::size_t b = 0; b < g.n_boundary; ++b) {
    if (!m[b] || !g.bactive[b]) continue;
    const auto c = g.bcell[b];
    out[b] = gv[3 * c] * dg.bk[b].x + gv[3 * c + 1] * dg.bk[b].y + gv[3 * c + 2] * dg.bk[b].z;
  }
  const MeshGraph* gp = &g;
  const DiffusionGeometry* dp = &dg;
  return grad.tape().record("boundary_nonorth_flux", std::move(out), {grad},
                            [gp, dp, grad, m = std::move(m)](ad::Tape& t, const Vector& adj) {
                              const MeshGraph& g = *gp;
                              Vector& ag = t.adjoint_ref(grad);
                              for (std::size_t b = 0; b < g.n_boundary; ++b) {
                                if (!m[b] || !g.bactive[b]) continue;
                                const auto c = g.bcell[b];
                                for (std::size_t j = 0; j < 3; ++j) ag[3 * c + j] += adj[b] * dp->bk[b][j];
                              }
                            });
}

Var face_sum(const MeshGraph& g, const Var& edge, const Var& boundary) {
  const bool he = edge.valid(), hb = boundary.valid();
  Vector r;
  if (he) {
    r = graph::assemble_residual(g, edge.value(),
                                 hb ? std::span<const double>(boundary.value()) : std::span<const double>());
  } else {
    r.assign(g.n_cells, 0.0);
    if (hb) {
      for (std::size_t b = 0; b < g.n_boundary; ++b) r[g.bcell[b]] += boundary.value()[b];
    }
  }
  ad::Tape& tape = he ? edge.tape() : boundary.tape();
  std::vector<Var> inputs;
  if (he) inputs.push_back(edge);
  if (hb) inputs.push_back(boundary);
  const MeshGraph* gp = &g;
  return tape.record("face_sum", std::move(r), inputs, [gp, edge, boundary, he, hb](ad::Tape& t, const Vector& adj) {
    const MeshGraph& g = *gp;
    if (he && edge.requires_grad()) {
      Vector& ae = t.adjoint_ref(edge);
      for (std::size_t e = 0; e < g.n_edges; ++e) ae[e] += adj[g.owner[e]] - adj[g.neighbour[e]];
    }
    if (hb && boundary.requires_grad()) {
      Vector& ab = t.adjoint_ref(boundary);
      for (std::size_t b = 0; b < g.n_boundary; ++b) ab[b] += adj[g.bcell[b]];
    }
  });
}

Var boundary_values(const MeshGraph& g, const Var& phi, const BoundaryAffine& a, std::span<const Var> params) {
  if (a.constant.size() != g.n_boundary || a.cell_coef.size() != g.n_boundary) {
    fail(ErrorCode::ShapeError, "boundary_values: affine description has wrong size");
  }
  Vector out(g.n_boundary);
  const Vector& p = phi.value();
  for (std::size_t b = 0; b < g.n_boundary; ++b) out[b] = a.constant[b] + a.cell_coef[b] * p[g.bcell[b]];
  for (const auto& [face, slot, coef] : a.param_terms) {
    if (slot >= params.size() || params[slot].size() != 1) fail(ErrorCode::ShapeError, "boundary_values: bad parameter slot");
    out[face] += coef * params[slot].value()[0];
  }
  std::vector<Var> inputs{phi};
  inputs.insert(inputs.end(), params.begin(), params.end());
  const MeshGraph* gp = &g;
  return phi.tape().record(
      "boundary_values", std::move(out), inputs,
      [gp, phi, coef = a.cell_coef, terms = a.param_terms, ps = std::vector<Var>(params.begin(), params.end())](
          ad::Tape& t, const Vector& adj) {
        const MeshGraph& g = *gp;
        if (phi.requires_grad()) {
          Vector& ap = t.adjoint_ref(phi);
          for (std::size_t b = 0; b < g.n_boundary; ++b) {
            if (coef[b] != 0.0) ap[g.bcell[b]] += coef[b] * adj[b];
          }
        }
        for (const auto& [face, slot, c] : terms) t.accumulate_at(ps[slot], 0, c * adj[face]);
      });
}

}  // namespace fvg::fvops
