#pragma once

#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "fvgraph/ad/tape.hpp"
#include "fvgraph/fvops/schemes.hpp"
#include "fvgraph/graph/mesh_graph.hpp"

namespace fvg::fvops {

using ad::Var;
using Vector = std::vector<double>;

/// Per-face split S = Delta + k for a correction mode. coef = |Delta| / |d|.
struct DiffusionGeometry {
  DiffusionMode mode = DiffusionMode::OverRelaxed;
  Vector coef;
  std::vector<Vec3> k;
  Vector bcoef;
  std::vector<Vec3> bk;
  bool orthogonal = true;  // every |k| below 1e-12 |S|
};

/// Throws ExtremeNonOrthogonality when |S^.d^| < 1e-6 in over-relaxed mode.
DiffusionGeometry diffusion_geometry(const graph::MeshGraph& g, DiffusionMode mode);

/// Decomposition of a single face vector; returns (|Delta|, k).
std::pair<double, Vec3> split_face_vector(const Vec3& s, const Vec3& d, DiffusionMode mode);

// ---- plain kernels -------------------------------------------------------

Vector interpolate_linear(const graph::MeshGraph& g, std::span<const double> phi);

/// Fixed-point passes moving internal face values from the interpolation point to the
/// face centroid, phi_f = lin(phi) + lin(grad).skew. Without them the gradient of a linear
/// field is off by O(1) on skewed tetrahedra. No effect on meshes without skew.
inline constexpr int kSkewCorrections = 6;

/// Green-Gauss cell gradients, interleaved xyz. Empty boundary faces are skipped.
Vector green_gauss_gradient(const graph::MeshGraph& g, std::span<const double> phi, std::span<const double> phi_b,
                            int skew_corrections = kSkewCorrections);
Vector divergence(const graph::MeshGraph& g, std::span<const double> mdot, std::span<const double> mdot_b);

struct ConvectiveFaceValues {
  Vector upwind;
  Vector correction;  // mdot (phi_HO - phi_U)
};
ConvectiveFaceValues convective_face_value(const graph::MeshGraph& g, std::span<const double> phi,
                                           std::span<const double> grad, std::span<const double> mdot,
                                           ConvectionScheme scheme);

// ---- differentiable ops ----------------------------------------------------

Var interpolate(const graph::MeshGraph& g, const Var& phi);
Var gradient(const graph::MeshGraph& g, const Var& phi, const Var& phi_b, int skew_corrections = kSkewCorrections);
/// interp(U) . S on internal faces.
Var face_flux(const graph::MeshGraph& g, const Var& ux, const Var& uy, const Var& uz);
/// U_b . S_b on boundary faces (zero on empty faces).
Var boundary_face_flux(const graph::MeshGraph& g, const Var& ubx, const Var& uby, const Var& ubz);
/// Explicit deferred-correction flux mdot (phi_HO - phi_U); zero for upwind.
Var convection_correction(const graph::MeshGraph& g, const Var& phi, const Var& grad, const Var& mdot,
                          ConvectionScheme scheme);
/// (grad phi)_f . k_f on internal faces.
Var nonorth_flux(const graph::MeshGraph& g, const DiffusionGeometry& dg, const Var& grad);
/// grad phi_P . k_b on boundary faces where mask is non-zero.
Var boundary_nonorth_flux(const graph::MeshGraph& g, const DiffusionGeometry& dg, const Var& grad,
                          std::span<const std::uint8_t> mask);
/// Per-cell net outward sum: +edge to owner, -edge to neighbour, +boundary. Either input may be invalid.
Var face_sum(const graph::MeshGraph& g, const Var& edge, const Var& boundary);

/// v_b = constant_b + cell_coef_b phi[bcell_b] + sum of param terms.
struct BoundaryAffine {
  Vector constant;
  Vector cell_coef;
  std::vector<std::tuple<std::size_t, std::size_t, double>> param_terms;  // (face, param slot, coefficient)

  explicit BoundaryAffine(std::size_t n = 0) : constant(n, 0.0), cell_coef(n, 0.0) {}
};
Var boundary_values(const graph::MeshGraph& g, const Var& phi, const BoundaryAffine& a, std::span<const Var> params);

}  // namespace fvg::fvops
