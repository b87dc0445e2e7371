#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fvgraph/meshio/case_config.hpp"
#include "fvgraph/solvers/flow.hpp"
#include "fvgraph/solvers/scalar.hpp"

namespace fvg::solvers {

struct StepLog {
  std::size_t step = 0;  // 1-based
  double t = 0.0;
  std::array<double, 3> momentum_residual{};
  int pressure_iterations = 0;
  double max_divergence = 0.0;
  double change = 0.0;  // max |delta U| / dt, or max |delta phi| / dt
};

struct RunOptions {
  std::size_t n_steps = 0;
  double dt = 0.0;
  /// Steps between on_write calls; 0 writes only after the last step.
  std::size_t write_every = 0;
  /// Stops once the change rate falls below this value; 0 disables.
  double steady_tol = 0.0;
  std::function<void(const StepLog&)> on_step;
};

struct FlowRunResult {
  FlowState state;
  std::size_t steps = 0;
  bool steady = false;
  std::vector<StepLog> log;
};

/// Marches the PISO loop. Step errors are rethrown with the same code, prefixed by the step index.
/// NumericalBlowup on a non-finite velocity or pressure.
FlowRunResult run_transient(const FlowProblem& P, FlowState state, const RunOptions& opt,
                            const std::function<void(const FlowState&)>& on_write = {},
                            const ParamValues& params = {});

struct ScalarTrajectory {
  Vector phi;
  double t = 0.0;
  std::size_t steps = 0;
  bool steady = false;
  std::vector<StepLog> log;
};

ScalarTrajectory run_transient(const ScalarTransportProblem& P, Vector phi, double t0, const RunOptions& opt,
                               const std::function<void(double t, const Vector&)>& on_write = {},
                               const ParamValues& params = {});

/// step,time,res_Ux,res_Uy,res_Uz,p_iterations,max_divergence,change
void write_residual_csv(const std::string& path, const std::vector<StepLog>& log);

/// Boundary conditions of one case field in graph patch order.
/// Throws MissingBoundarySpec when a patch has no entry.
bc::FieldBoundary case_boundary(const graph::MeshGraph& g, const meshio::FieldSpec& field);

/// Problems and initial states described by a parsed case directory.
FlowProblem flow_problem_from_case(const meshio::CaseConfig& cfg, std::shared_ptr<const graph::MeshGraph> g);
FlowState flow_state_from_case(const FlowProblem& P, const meshio::CaseConfig& cfg);
/// scalarTransportFoam advects T with the case velocity; laplacianFoam only diffuses it.
ScalarTransportProblem scalar_problem_from_case(const meshio::CaseConfig& cfg,
                                                std::shared_ptr<const graph::MeshGraph> g);
Vector scalar_state_from_case(const graph::MeshGraph& g, const meshio::CaseConfig& cfg);

}  // namespace fvg::solvers
