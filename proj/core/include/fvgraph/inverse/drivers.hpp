#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fvgraph/adjoint/transient.hpp"
#include "fvgraph/inverse/observation.hpp"
#include "fvgraph/inverse/optim.hpp"
#include "fvgraph/solvers/cases.hpp"

namespace fvg::inverse {

/// Observation emitted after step k, or an invalid Var for a silent step.
using FlowObserver = std::function<Var(const solvers::FlowVars& after, std::size_t k)>;

/// The PISO loop from a fixed initial state as a differentiable time loop.
adjoint::TransientProblem flow_transient(std::shared_ptr<const solvers::FlowProblem> problem,
                                         solvers::FlowState initial, double dt, std::size_t n_steps,
                                         FlowObserver observe);

struct IterationRecord {
  int iteration = 0;
  double loss = 0.0;
  Vector params;    // physical values before the update
  Vector gradient;  // with respect to the optimised variables
  double seconds = 0.0;
};

struct InverseResult {
  std::vector<std::string> names;
  Vector truth, initial, recovered;
  std::vector<IterationRecord> history;
  int iterations = 0;  // gradient evaluations
  bool converged = false;
  double max_rel_error = 0.0;
  std::uint64_t recomputed_steps = 0;  // per gradient evaluation
  std::size_t peak_stored = 0;
};

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Recovers the lid speed of a driven cavity from velocities at random probe cells after
/// n_steps. Converged when |lid - truth| / truth < tolerance.
struct CavityInverseConfig {
  int n = 24;
  double lid_true = 2.0;
  double lid_initial = 0.5;
  double nu = 0.01;
  double dt = 0.01;
  std::size_t n_steps = 100;
  std::size_t n_probes = 10;
  std::uint64_t seed = 7;
  int max_iterations = 100;
  double lr = 0.1;
  double tolerance = 0.01;
  std::size_t snapshots = 0;  // 0 picks ceil(sqrt(n_steps))
};
InverseResult run_inverse_cavity(const CavityInverseConfig& cfg, const IterationCallback& on_iteration = {});

/// Recovers the RCR parameters of both bifurcation outlets from the inlet pressure waveform
/// and the mean outlet flows of a synthetic run. Parameters are optimised as alpha with
/// theta = theta_ref exp(alpha), theta_ref the empirical initial estimate.
struct WindkesselInverseConfig {
  int n = 2;
  solvers::BifurcationSetup truth;
  double dt = 1e-3;
  int cycles = 2;
  int sample_every = 10;  // inlet pressure sampled every this many steps
  int max_iterations = 200;
  double lr = 0.1;
  double tolerance = 0.01;
  double gamma = 0.15;
  double lambda_p = 1.0;
  double lambda_q = 1.0;
  /// Optimise Rp and Rd only; compliances stay at their true values.
  bool resistances_only = false;
  std::size_t snapshots = 0;
};
InverseResult run_inverse_windkessel(const WindkesselInverseConfig& cfg, const IterationCallback& on_iteration = {});

/// Per-step observation [P_in, Q_1, Q_2] of the bifurcation, P_in the area-averaged inlet
/// pressure in pressure units.
Var bifurcation_observation(const solvers::FlowProblem& P, const solvers::FlowVars& s);

/// iteration, loss, one column per parameter, one per gradient entry, seconds.
void write_history_csv(const InverseResult& r, const std::string& path);

}  // namespace fvg::inverse
