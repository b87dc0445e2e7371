#pragma once

#include <memory>
#include <span>
#include <vector>

#include "fvgraph/bc/boundary_eval.hpp"
#include "fvgraph/fvops/operators.hpp"
#include "fvgraph/linalg/ad_solve.hpp"
#include "fvgraph/linalg/settings.hpp"
#include "fvgraph/solvers/params.hpp"

namespace fvg::solvers {

using Vector = std::vector<double>;

struct PoissonOptions {
  fvops::DiffusionMode mode = fvops::DiffusionMode::OverRelaxed;
  linalg::SolverSettings solver{linalg::KrylovMethod::CG, linalg::Preconditioner::ILU0, 1e-12,
                                std::numeric_limits<double>::infinity(), 2000, 30};
  linalg::NullSpace null_space = linalg::NullSpace::None;
  std::size_t ref_cell = 0;
  int max_outer = 10;
  double outer_tol = 1e-8;
};

struct PoissonResult {
  Vector phi;
  int outer_iterations = 0;
  double last_change = 0.0;
  std::vector<linalg::SolveReport> reports;
};

/// Solves div(grad phi) = f with non-orthogonal correction by outer Picard iterations.
/// `source` holds f per cell. Throws InvalidConfig without a fixed-value patch or null-space mode.
PoissonResult solve_poisson(const graph::MeshGraph& g, std::span<const double> source, const bc::FieldBoundary& bcs,
                            const PoissonOptions& opt = {});

/// Passive scalar transport with a prescribed, time-independent mass flux.
struct ScalarTransportProblem {
  std::shared_ptr<const graph::MeshGraph> graph;
  linalg::GraphPattern pattern;
  fvops::DiffusionGeometry dg;
  bc::FieldBoundary bc;
  double diffusivity = 0.0;
  fvops::ConvectionScheme scheme = fvops::ConvectionScheme::Upwind;
  fvops::TimeScheme time = fvops::TimeScheme::BackwardEuler;
  linalg::SolverSettings solver = linalg::scalar_defaults();
  Vector mdot;    // per edge
  Vector mdot_b;  // per boundary face
};

ScalarTransportProblem make_scalar_problem(std::shared_ptr<const graph::MeshGraph> g, bc::FieldBoundary bcs,
                                           double diffusivity, fvops::ConvectionScheme scheme,
                                           fvops::TimeScheme time,
                                           fvops::DiffusionMode mode = fvops::DiffusionMode::OverRelaxed);

/// Face fluxes of a uniform velocity.
void set_uniform_velocity(ScalarTransportProblem& p, const Vec3& u);

/// One step from t_old to t_old + dt. Differentiable with respect to phi and every
/// parameter in `params` ("DT" overrides the diffusivity; boundary bindings by name).
Var scalar_step(const ScalarTransportProblem& p, ParamSet& params, const Var& phi, double t_old, double dt,
                linalg::SolveReport* report = nullptr);

/// Plain evaluation of scalar_step on a non-recording tape.
Vector scalar_step(const ScalarTransportProblem& p, std::span<const double> phi, double t_old, double dt,
                   const ParamValues& params = {}, linalg::SolveReport* report = nullptr);

struct ScalarRunResult {
  Vector phi;
  int steps = 0;
  double t = 0.0;
  double last_change = 0.0;  // max |phi^{n+1} - phi^n| / dt
  bool steady = false;
};

/// Marches up to max_steps; stops early once max |dphi|/dt < steady_tol (if positive).
/// Throws NumericalBlowup naming the step on a non-finite value.
ScalarRunResult run_scalar(const ScalarTransportProblem& p, Vector phi, double t0, double dt, int max_steps,
                           double steady_tol = 0.0, const ParamValues& params = {});

}  // namespace fvg::solvers
