#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fvgraph/ad/tape.hpp"
#include "fvgraph/fvops/operators.hpp"
#include "fvgraph/graph/mesh_graph.hpp"

namespace fvg::solvers {

using ad::Var;

/// Implicit part L of the steady transport operator div(mdot phi) - div(gamma grad phi)
/// in integrated form, with upwind convection and the orthogonal part of diffusion,
/// so that L phi = rhs reproduces the boundary fluxes of the affine boundary model.
struct TransportOperator {
  Var diag;
  Var upper;  // A[owner][neighbour]
  Var lower;  // A[neighbour][owner]
  Var rhs;    // boundary contributions
};

/// mdot may be invalid (no convection); gamma is a scalar Var or invalid (no diffusion).
TransportOperator assemble_transport(const graph::MeshGraph& g, const fvops::DiffusionGeometry& dg, const Var& mdot,
                                     const Var& mdot_b, const Var& gamma, const fvops::BoundaryAffine& a,
                                     std::span<const Var> params);

/// Explicit deferred terms for phi: -sum(convection correction) + gamma sum(non-orthogonal flux).
/// Returns an invalid Var when neither term applies.
Var explicit_terms(const graph::MeshGraph& g, const fvops::DiffusionGeometry& dg, const Var& phi, const Var& phi_b,
                   const Var& mdot, const Var& gamma, fvops::ConvectionScheme scheme,
                   std::span<const std::uint8_t> dirichlet);

/// Boundary values with the cell dependence removed (constants plus parameters).
Var boundary_constants(const graph::MeshGraph& g, ad::Tape& tape, const fvops::BoundaryAffine& a,
                       std::span<const Var> params);

/// a + b treating an invalid operand as zero.
Var add_opt(const Var& a, const Var& b);

Var cell_constant(ad::Tape& tape, const graph::MeshGraph& g, double per_volume_factor);

}  // namespace fvg::solvers
