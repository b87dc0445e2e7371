#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fvgraph/bc/boundary_spec.hpp"
#include "fvgraph/fvops/operators.hpp"
#include "fvgraph/graph/mesh_graph.hpp"

namespace fvg::bc {

/// One spec per graph patch, same order as MeshGraph::patches.
struct FieldBoundary {
  std::string field;
  std::vector<BoundarySpec> patch;
};

/// Maps a parameter name to its slot in the parameter list handed to fvops::boundary_values.
/// Windkessel patches request "windkessel:<patch>" and expect the imposed outlet value there.
using SlotResolver = std::function<std::size_t(const std::string& name)>;

std::string windkessel_slot_name(const std::string& patch);

/// Face value for one component, given the owning cell value.
/// FixedGradient adds g |d_bf| to the cell value; Windkessel patches return `imposed`.
double boundary_face_value(const BoundarySpec& s, int comp, double cell_value, const Vec3& xf, double dist, double t,
                           double imposed = 0.0);

/// Affine description v_b = constant + cell_coef phi_P + params of component `comp` at time t.
fvops::BoundaryAffine boundary_affine(const graph::MeshGraph& g, const FieldBoundary& f, int comp, double t,
                                      const SlotResolver& slot);

/// Active faces whose value does not depend on the cell (Dirichlet-like).
std::vector<std::uint8_t> dirichlet_mask(const graph::MeshGraph& g, const fvops::BoundaryAffine& a);

/// Q = sum over the patch of U_f . S_f.
double outlet_flow_rate(const graph::MeshGraph& g, const graph::BoundaryPatch& patch, std::span<const double> ubx,
                        std::span<const double> uby, std::span<const double> ubz);

}  // namespace fvg::bc
