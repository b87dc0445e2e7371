#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fvgraph/bc/boundary_eval.hpp"
#include "fvgraph/bc/windkessel.hpp"
#include "fvgraph/fvops/operators.hpp"
#include "fvgraph/linalg/ad_solve.hpp"
#include "fvgraph/linalg/settings.hpp"
#include "fvgraph/solvers/params.hpp"

namespace fvg::solvers {

using Vector = std::vector<double>;

/// Incompressible flow with kinematic pressure p/rho, backward Euler in time and PISO coupling.
struct FlowProblem {
  std::shared_ptr<const graph::MeshGraph> graph;
  linalg::GraphPattern pattern;
  fvops::DiffusionGeometry dg;
  bc::FieldBoundary U;
  bc::FieldBoundary p;
  double nu = 0.01;
  double rho = 1.0;  // converts kinematic pressure to Windkessel pressure units
  fvops::ConvectionScheme convection = fvops::ConvectionScheme::Upwind;
  linalg::SolverSettings solver_U = linalg::momentum_defaults();
  linalg::SolverSettings solver_p = linalg::pressure_defaults();
  int n_correctors = 2;
  int n_nonorth_correctors = 0;
  bool explicit_predictor = false;
  std::size_t p_ref_cell = 0;
  double p_ref_value = 0.0;
  /// Continuity bound is this factor times solver_p.abs_tol.
  double continuity_factor = 10.0;
  /// Patch indices whose pressure is a Windkessel outlet, in patch order.
  std::vector<std::size_t> windkessel_patches;
};

/// Validates BC sizes, collects Windkessel patches and precomputes geometry.
FlowProblem make_flow_problem(std::shared_ptr<const graph::MeshGraph> g, bc::FieldBoundary U, bc::FieldBoundary p,
                              double nu, fvops::ConvectionScheme convection = fvops::ConvectionScheme::Upwind,
                              fvops::DiffusionMode mode = fvops::DiffusionMode::OverRelaxed);

/// Parameter names read by the flow step: "nu", and per Windkessel patch "Rp:<patch>",
/// "C:<patch>", "Rd:<patch>". Absent names fall back to the problem values.
std::string windkessel_param_name(const std::string& which, const std::string& patch);

struct FlowState {
  Vector ux, uy, uz;
  Vector p;
  Vector mdot;    // per edge, owner to neighbour
  Vector mdot_b;  // per boundary face, outward
  Vector windkessel_pc;  // per Windkessel patch, pressure units
  Vector windkessel_po;
  double t = 0.0;
};

/// Uniform or per-cell initial fields; face fluxes from interpolated U and the BCs at t0.
FlowState initial_flow_state(const FlowProblem& P, std::span<const Vec3> U0, std::span<const double> p0, double t0,
                             const ParamValues& params = {});

/// The flow state as tape values.
struct FlowVars {
  Var ux, uy, uz, p, mdot, mdot_b;
  std::vector<Var> pc;  // size-1 per Windkessel patch
  double t = 0.0;

  /// ux, uy, uz, p, mdot, mdot_b, then pc.
  std::vector<Var> list() const;
  static FlowVars from_list(std::span<const Var> v, double t);
};

FlowVars to_vars(ad::Tape& tape, const FlowState& s, bool differentiable = false);
FlowState to_state(const FlowVars& v);

struct StepReport {
  std::array<linalg::SolveReport, 3> momentum{};
  std::array<double, 3> momentum_residual{};  // ||b - A U^n||_2 / ||b||_2 before the predictor
  std::vector<linalg::SolveReport> pressure;
  double max_divergence = 0.0;     // max over cells of |sum of outward face fluxes|
  double net_boundary_flux = 0.0;  // sum over boundary faces
  std::vector<double> outlet_q;    // per Windkessel patch
  std::vector<double> outlet_po;

  int pressure_iterations() const;
};

/// One PISO step: implicit momentum predictor with lagged fluxes, then n_correctors
/// pressure corrections on the 1/a_P-weighted graph Laplacian with Rhie-Chow face fluxes.
/// Windkessel outlet pressures are refreshed before the predictor and between correctors.
/// Throws InvalidCoefficients, NotConverged or ContinuityViolation.
FlowVars piso_step(const FlowProblem& P, ParamSet& params, const FlowVars& s, double dt, StepReport* report = nullptr);

/// Plain evaluation on a non-recording tape.
FlowState piso_step(const FlowProblem& P, const FlowState& s, double dt, const ParamValues& params = {},
                    StepReport* report = nullptr);

/// Interleaved velocity of a state.
std::vector<Vec3> velocity(const FlowState& s);

}  // namespace fvg::solvers
