#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "fvgraph/adjoint/checkpoint.hpp"
#include "fvgraph/ad/tape.hpp"
#include "fvgraph/solvers/params.hpp"

namespace fvg::adjoint {

using ad::Var;
using Vector = std::vector<double>;

/// A time loop written against the tape: init builds state 0 from the parameters,
/// step k maps state k to state k + 1 and may emit an observation vector.
struct TransientProblem {
  struct StepResult {
    std::vector<Var> state;
    Var observation;  // invalid when step k observes nothing
  };

  std::size_t n_steps = 0;
  std::function<std::vector<Var>(ad::Tape&, solvers::ParamSet&)> init;
  std::function<StepResult(ad::Tape&, solvers::ParamSet&, std::size_t k, const std::vector<Var>& state)> step;
};

/// Loss over the per-step observations (empty vectors for silent steps), returning the
/// value and its gradient with the same layout.
using LossFunction = std::function<std::pair<double, std::vector<Vector>>(const std::vector<Vector>& observations)>;

struct TransientGradient {
  double loss = 0.0;
  solvers::ParamValues gradient;
  std::vector<Vector> observations;
  std::uint64_t recomputed_steps = 0;
  std::size_t recorded_steps = 0;
  std::size_t peak_stored = 0;  // states held at once, counted by the executor
};

/// Loss and parameter gradient by reverse sweep over the checkpoint plan. Each step is
/// re-recorded on its own tape from its input state; parameters are leaves on every tape and
/// their adjoints are summed by name.
TransientGradient differentiate_transient(const TransientProblem& problem, const solvers::ParamValues& params,
                                          const LossFunction& loss, const CheckpointPlan& plan);

/// Observations of a plain forward run.
std::vector<Vector> run_forward(const TransientProblem& problem, const solvers::ParamValues& params);

/// Gradient of sum(seed * f(params)) for a function recorded on one tape.
solvers::ParamValues vjp(const std::function<Var(ad::Tape&, solvers::ParamSet&)>& f,
                         const solvers::ParamValues& params, std::span<const double> seed);

}  // namespace fvg::adjoint
