#pragma once

#include <memory>
#include <vector>

#include "fvgraph/ad/ops.hpp"
#include "fvgraph/adjoint/transient.hpp"
#include "fvgraph/solvers/cases.hpp"
#include "test_meshes.hpp"

namespace fvg::testing {

/// Loss 0.5 sum (obs - target)^2 over every observing step.
inline adjoint::LossFunction squared_error(std::vector<adjoint::Vector> targets) {
  return [targets = std::move(targets)](const std::vector<adjoint::Vector>& obs) {
    double value = 0.0;
    std::vector<adjoint::Vector> grad(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) {
      grad[k].resize(obs[k].size());
      for (std::size_t i = 0; i < obs[k].size(); ++i) {
        const double r = obs[k][i] - targets[k][i];
        value += 0.5 * r * r;
        grad[k][i] = r;
      }
    }
    return std::make_pair(value, grad);
  };
}

/// Reference gradient: the whole trajectory on one tape, reversed once.
inline solvers::ParamValues full_storage_gradient(const adjoint::TransientProblem& problem,
                                                  const solvers::ParamValues& params,
                                                  const adjoint::LossFunction& loss, double* loss_value = nullptr) {
  ad::Tape tape(true);
  solvers::ParamSet ps = solvers::make_params(tape, params, true);
  auto state = problem.init(tape, ps);
  std::vector<ad::Var> obs_vars(problem.n_steps);
  std::vector<adjoint::Vector> obs(problem.n_steps);
  for (std::size_t k = 0; k < problem.n_steps; ++k) {
    auto r = problem.step(tape, ps, k, state);
    state = std::move(r.state);
    if (r.observation.valid()) {
      obs_vars[k] = r.observation;
      obs[k] = r.observation.value();
    }
  }
  const auto [value, dobs] = loss(obs);
  if (loss_value) *loss_value = value;
  for (std::size_t k = 0; k < problem.n_steps; ++k) {
    if (obs_vars[k].valid()) tape.accumulate(obs_vars[k], dobs[k]);
  }
  tape.backward();
  solvers::ParamValues g;
  for (const auto& [name, v] : params) {
    (void)v;
    g[name] = tape.gradient(ps.vars()[ps.slot(name)])[0];
  }
  return g;
}

/// Advection-diffusion in a hex channel; the inlet value "c_in" and diffusivity "DT" are parameters,
/// the field is observed at a few cells after every step.
struct ScalarTransient {
  solvers::ScalarTransportProblem problem;
  adjoint::TransientProblem transient;
  solvers::ParamValues params{{"c_in", 1.3}, {"DT", 0.05}};
  std::vector<std::size_t> probes;
  double dt = 0.05;
};

inline std::shared_ptr<ScalarTransient> make_scalar_transient(std::size_t n_steps,
                                                              fvops::ConvectionScheme scheme =
                                                                  fvops::ConvectionScheme::SOU) {
  auto out = std::make_shared<ScalarTransient>();
  auto g = graph::MeshGraph::from_mesh(hex_block(8, 3, 2));
  bc::FieldBoundary bcs{"T", {}};
  for (const auto& p : g->patches) {
    if (p.name == "left") {
      auto s = bc::BoundarySpec::fixed(1.0);
      s.bind[0] = "c_in";
      bcs.patch.push_back(s);
    } else {
      bcs.patch.push_back(bc::BoundarySpec::zero_gradient());
    }
  }
  out->problem = solvers::make_scalar_problem(g, bcs, 0.05, scheme, fvops::TimeScheme::CrankNicolson);
  solvers::set_uniform_velocity(out->problem, {1.0, 0.2, 0.0});
  out->probes = {1, 10, 25, 31, g->n_cells - 1};
  out->transient.n_steps = n_steps;
  ScalarTransient* self = out.get();
  out->transient.init = [self](ad::Tape& tape, solvers::ParamSet&) {
    adjoint::Vector phi(self->problem.graph->n_cells);
    for (std::size_t c = 0; c < phi.size(); ++c) phi[c] = 0.5 * self->problem.graph->cell_centroid[c].y;
    return std::vector<ad::Var>{tape.constant(phi)};
  };
  out->transient.step = [self](ad::Tape&, solvers::ParamSet& ps, std::size_t k, const std::vector<ad::Var>& s) {
    const double t = static_cast<double>(k) * self->dt;
    const ad::Var phi = solvers::scalar_step(self->problem, ps, s[0], t, self->dt);
    return adjoint::TransientProblem::StepResult{{phi}, ad::gather(phi, self->probes)};
  };
  return out;
}

/// Targets of the same shape as the observations, for a synthetic loss.
inline std::vector<adjoint::Vector> constant_targets(std::size_t n_steps, std::size_t n_obs, double v) {
  return std::vector<adjoint::Vector>(n_steps, adjoint::Vector(n_obs, v));
}

}  // namespace fvg::testing
