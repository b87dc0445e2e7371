#include "fvgraph/adjoint/transient.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::adjoint {

namespace {

using State = std::vector<Vector>;

State values(const std::vector<Var>& v) {
  State s;
  s.reserve(v.size());
  for (const Var& x : v) s.push_back(x.value());
  return s;
}

/// One plain step on a throwaway tape.
State advance(const TransientProblem& p, const solvers::ParamValues& params, std::size_t k, const State& s,
              Vector* observation) {
  ad::Tape tape(false);
  solvers::ParamSet ps = solvers::make_params(tape, params, false);
  std::vector<Var> in;
  in.reserve(s.size());
  for (const auto& x : s) in.push_back(tape.constant(x));
  auto r = p.step(tape, ps, k, in);
  if (observation) *observation = r.observation.valid() ? r.observation.value() : Vector{};
  return values(r.state);
}

void add_param_gradients(const ad::Tape& tape, const solvers::ParamSet& ps, const solvers::ParamValues& params,
                         solvers::ParamValues& out) {
  for (const auto& [name, v] : params) {
    (void)v;
    out[name] += tape.gradient(ps.vars()[ps.slot(name)])[0];
  }
}

void seed(ad::Tape& tape, const Var& v, const Vector& adj) {
  if (!v.valid() || adj.empty()) return;
  if (adj.size() != v.size()) fail(ErrorCode::ShapeError, "adjoint size does not match its value");
  if (std::all_of(adj.begin(), adj.end(), [](double a) { return a == 0.0; })) return;
  tape.accumulate(v, adj);
}

}  // namespace

std::vector<Vector> run_forward(const TransientProblem& problem, const solvers::ParamValues& params) {
  ad::Tape tape(false);
  solvers::ParamSet ps = solvers::make_params(tape, params, false);
  State state = values(problem.init(tape, ps));
  std::vector<Vector> obs(problem.n_steps);
  for (std::size_t k = 0; k < problem.n_steps; ++k) state = advance(problem, params, k, state, &obs[k]);
  return obs;
}

TransientGradient differentiate_transient(const TransientProblem& problem, const solvers::ParamValues& params,
                                          const LossFunction& loss, const CheckpointPlan& plan) {
  using K = CheckpointAction::Kind;
  if (plan.n_steps != problem.n_steps) {
    fail(ErrorCode::InvalidBudget, "checkpoint plan covers " + std::to_string(plan.n_steps) + " steps, problem has " +
                                       std::to_string(problem.n_steps));
  }
  TransientGradient out;
  for (const auto& [name, v] : params) {
    (void)v;
    out.gradient[name] = 0.0;
  }
  const std::size_t n = problem.n_steps;
  std::map<std::size_t, State> stored;
  auto keep = [&](std::size_t k, const State& s) {
    stored[k] = s;
    out.peak_stored = std::max(out.peak_stored, stored.size());
  };

  // Forward sweep: every step once, snapshots where the plan places them.
  State current;
  {
    ad::Tape tape(false);
    solvers::ParamSet ps = solvers::make_params(tape, params, false);
    current = values(problem.init(tape, ps));
  }
  const auto marks = plan.sweep_snapshots();
  const std::set<std::size_t> sweep(marks.begin(), marks.end());
  out.observations.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (sweep.count(k)) keep(k, current);
    current = advance(problem, params, k, current, &out.observations[k]);
  }
  std::size_t at = n;

  auto [value, dobs] = loss(out.observations);
  out.loss = value;
  if (dobs.size() != n) fail(ErrorCode::ShapeError, "loss gradient must have one entry per step");

  State lambda(current.size());
  for (std::size_t i = 0; i < current.size(); ++i) lambda[i].assign(current[i].size(), 0.0);

  for (const auto& a : plan.actions) {
    if (a.sweep) continue;
    switch (a.kind) {
      case K::Store:
        if (at != a.from) fail(ErrorCode::InvalidBudget, "checkpoint plan stores a state that is not current");
        keep(a.from, current);
        break;
      case K::Free: stored.erase(a.from); break;
      case K::Restore:
        current = stored.at(a.from);
        at = a.from;
        break;
      case K::Advance:
        if (at != a.from) fail(ErrorCode::InvalidBudget, "checkpoint plan advances from a state that is not current");
        for (std::size_t k = a.from; k < a.to; ++k) current = advance(problem, params, k, current, nullptr);
        at = a.to;
        out.recomputed_steps += a.to - a.from;
        break;
      case K::Reverse: {
        const State* in = nullptr;
        if (auto it = stored.find(a.from); it != stored.end()) in = &it->second;
        else if (at == a.from) in = &current;
        else fail(ErrorCode::InvalidBudget, "state " + std::to_string(a.from) + " unavailable for its reverse step");
        ad::Tape tape(true);
        solvers::ParamSet ps = solvers::make_params(tape, params, true);
        std::vector<Var> leaves;
        for (const auto& x : *in) leaves.push_back(tape.leaf(x));
        auto r = problem.step(tape, ps, a.from, leaves);
        if (r.state.size() != lambda.size()) fail(ErrorCode::ShapeError, "step changed the state layout");
        for (std::size_t i = 0; i < lambda.size(); ++i) seed(tape, r.state[i], lambda[i]);
        seed(tape, r.observation, dobs[a.from]);
        tape.backward();
        for (std::size_t i = 0; i < leaves.size(); ++i) lambda[i] = tape.gradient(leaves[i]);
        add_param_gradients(tape, ps, params, out.gradient);
        ++out.recorded_steps;
        break;
      }
    }
  }

  ad::Tape tape(true);
  solvers::ParamSet ps = solvers::make_params(tape, params, true);
  const auto init = problem.init(tape, ps);
  if (init.size() != lambda.size()) fail(ErrorCode::ShapeError, "initial state layout differs from the step state");
  for (std::size_t i = 0; i < lambda.size(); ++i) seed(tape, init[i], lambda[i]);
  tape.backward();
  add_param_gradients(tape, ps, params, out.gradient);
  return out;
}

solvers::ParamValues vjp(const std::function<Var(ad::Tape&, solvers::ParamSet&)>& f,
                         const solvers::ParamValues& params, std::span<const double> seed_values) {
  ad::Tape tape(true);
  solvers::ParamSet ps = solvers::make_params(tape, params, true);
  const Var y = f(tape, ps);
  if (seed_values.size() != y.size()) fail(ErrorCode::ShapeError, "seed size does not match the output");
  tape.accumulate(y, seed_values);
  tape.backward();
  solvers::ParamValues g;
  for (const auto& [name, v] : params) {
    (void)v;
    g[name] = 0.0;
  }
  add_param_gradients(tape, ps, params, g);
  return g;
}

}  // namespace fvg::adjoint
