#include "fvgraph/bc/boundary_eval.hpp"

#include "fvgraph/common/error.hpp"

namespace fvg::bc {

std::string windkessel_slot_name(const std::string& patch) { return "windkessel:" + patch; }

double boundary_face_value(const BoundarySpec& s, int comp, double cell_value, const Vec3& xf, double dist, double t,
                           double imposed) {
  const auto c = static_cast<std::size_t>(comp);
  switch (s.kind) {
    case BcKind::FixedValue: return s.value[c];
    case BcKind::ZeroGradient: return cell_value;
    case BcKind::FixedGradient: return cell_value + s.gradient[c] * dist;
    case BcKind::Empty: return 0.0;
    case BcKind::TimeVarying: return s.table.eval(t)[c];
    case BcKind::Parabolic: return s.parabolic.eval(xf, t)[c];
    case BcKind::Windkessel: return imposed;
  }
  return 0.0;
}

fvops::BoundaryAffine boundary_affine(const graph::MeshGraph& g, const FieldBoundary& f, int comp, double t,
                                      const SlotResolver& slot) {
  if (f.patch.size() != g.patches.size()) {
    fail(ErrorCode::MissingBoundarySpec, "field '" + f.field + "' has " + std::to_string(f.patch.size()) +
                                             " patch entries for " + std::to_string(g.patches.size()) + " patches");
  }
  fvops::BoundaryAffine a(g.n_boundary);
  const auto c = static_cast<std::size_t>(comp);
  for (std::size_t pi = 0; pi < g.patches.size(); ++pi) {
    const auto& patch = g.patches[pi];
    const BoundarySpec& s = f.patch[pi];
    const bool bound = s.bind[c].has_value() && s.kind == BcKind::FixedValue;
    std::size_t bslot = 0;
    if (bound) bslot = slot(*s.bind[c]);
    std::size_t wslot = 0;
    if (s.kind == BcKind::Windkessel) wslot = slot(windkessel_slot_name(patch.name));
    for (std::size_t b = patch.start; b < patch.start + patch.size; ++b) {
      if (!g.bactive[b] || s.kind == BcKind::Empty) continue;
      switch (s.kind) {
        case BcKind::ZeroGradient: a.cell_coef[b] = 1.0; break;
        case BcKind::FixedGradient:
          a.cell_coef[b] = 1.0;
          a.constant[b] = s.gradient[c] * norm(g.bd[b]);
          break;
        case BcKind::Windkessel: a.param_terms.emplace_back(b, wslot, 1.0); break;
        default:
          if (bound) a.param_terms.emplace_back(b, bslot, 1.0);
          else a.constant[b] = boundary_face_value(s, comp, 0.0, g.bxf[b], 0.0, t);
      }
    }
  }
  return a;
}

std::vector<std::uint8_t> dirichlet_mask(const graph::MeshGraph& g, const fvops::BoundaryAffine& a) {
  std::vector<std::uint8_t> m(g.n_boundary, 0);
  for (std::size_t b = 0; b < g.n_boundary; ++b) m[b] = g.bactive[b] && a.cell_coef[b] == 0.0;
  return m;
}

double outlet_flow_rate(const graph::MeshGraph& g, const graph::BoundaryPatch& patch, std::span<const double> ubx,
                        std::span<const double> uby, std::span<const double> ubz) {
  double q = 0.0;
  for (std::size_t b = patch.start; b < patch.start + patch.size; ++b) {
    if (!g.bactive[b]) continue;
    q += ubx[b] * g.bsf[b].x + uby[b] * g.bsf[b].y + ubz[b] * g.bsf[b].z;
  }
  return q;
}

}  // namespace fvg::bc
