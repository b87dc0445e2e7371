#include "fvgraph/inverse/drivers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "fvgraph/ad/ops.hpp"
#include "fvgraph/common/error.hpp"

namespace fvg::inverse {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double max_rel_error(const Vector& x, const Vector& truth) {
  double e = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(x[i] - truth[i]) / std::abs(truth[i]));
  return e;
}

adjoint::CheckpointPlan plan_for(std::size_t n_steps, std::size_t snapshots) {
  return snapshots == 0 ? adjoint::plan_checkpoints(n_steps) : adjoint::plan_checkpoints(n_steps, snapshots);
}

}  // namespace

adjoint::TransientProblem flow_transient(std::shared_ptr<const solvers::FlowProblem> problem,
                                         solvers::FlowState initial, double dt, std::size_t n_steps,
                                         FlowObserver observe) {
  adjoint::TransientProblem tp;
  tp.n_steps = n_steps;
  const double t0 = initial.t;
  tp.init = [initial = std::move(initial)](ad::Tape& tape, solvers::ParamSet&) {
    return solvers::to_vars(tape, initial, false).list();
  };
  tp.step = [problem, observe = std::move(observe), t0, dt](ad::Tape&, solvers::ParamSet& params, std::size_t k,
                                                            const std::vector<Var>& state) {
    const auto s = solvers::FlowVars::from_list(state, t0 + static_cast<double>(k) * dt);
    const auto next = solvers::piso_step(*problem, params, s, dt);
    adjoint::TransientProblem::StepResult r;
    r.state = next.list();
    if (observe) r.observation = observe(next, k);
    return r;
  };
  return tp;
}

Var bifurcation_observation(const solvers::FlowProblem& P, const solvers::FlowVars& s) {
  const auto& g = *P.graph;
  const std::vector<Var> parts{area_average(g, s.p, "inlet", P.rho), patch_flow(g, s.mdot_b, "outlet1"),
                               patch_flow(g, s.mdot_b, "outlet2")};
  return ad::concat(parts);
}

InverseResult run_inverse_cavity(const CavityInverseConfig& cfg, const IterationCallback& on_iteration) {
  if (cfg.n_steps == 0) fail(ErrorCode::InvalidConfig, "cavity inverse needs at least one step");
  const std::string name = "lid";
  auto P = std::make_shared<solvers::FlowProblem>(
      solvers::cavity_problem(cfg.n, solvers::CavitySetup{cfg.lid_true, cfg.nu, name}));
  const auto probes = random_probes(P->graph->n_cells, cfg.n_probes, cfg.seed);
  const std::vector<Vec3> u0{{0, 0, 0}};
  const std::vector<double> p0{0.0};
  auto initial = solvers::initial_flow_state(*P, u0, p0, 0.0, {{name, cfg.lid_true}});
  const std::size_t last = cfg.n_steps - 1;
  const auto problem = flow_transient(P, initial, cfg.dt, cfg.n_steps, [&, P](const solvers::FlowVars& s, std::size_t k) {
    return k == last ? observe_probes(*P->graph, s, probes) : Var{};
  });

  const Vector data = adjoint::run_forward(problem, {{name, cfg.lid_true}})[last];
  const adjoint::LossFunction loss = [&](const std::vector<Vector>& obs) {
    std::vector<Vector> grad(obs.size());
    auto l = loss_mse(obs[last], data);
    grad[last] = std::move(l.grad);
    return std::make_pair(l.value, grad);
  };

  InverseResult out;
  out.names = {name};
  out.truth = {cfg.lid_true};
  out.initial = {cfg.lid_initial};
  const auto plan = plan_for(cfg.n_steps, cfg.snapshots);
  AdamState adam;
  adam.lr = cfg.lr;
  Vector theta = out.initial;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const auto t0 = Clock::now();
    const auto g = adjoint::differentiate_transient(problem, {{name, theta[0]}}, loss, plan);
    IterationRecord rec{it, g.loss, theta, {g.gradient.at(name)}, seconds_since(t0)};
    out.recomputed_steps = g.recomputed_steps;
    out.peak_stored = g.peak_stored;
    out.history.push_back(rec);
    out.iterations = it + 1;
    if (on_iteration) on_iteration(rec);
    if (max_rel_error(theta, out.truth) < cfg.tolerance) {
      out.converged = true;
      break;
    }
    adam_step(adam, theta, rec.gradient);
  }
  out.recovered = theta;
  out.max_rel_error = max_rel_error(theta, out.truth);
  return out;
}

InverseResult run_inverse_windkessel(const WindkesselInverseConfig& cfg, const IterationCallback& on_iteration) {
  if (cfg.cycles < 1 || cfg.sample_every < 1) fail(ErrorCode::InvalidConfig, "windkessel inverse needs cycles, sampling >= 1");
  auto P = std::make_shared<solvers::FlowProblem>(solvers::bifurcation_problem(cfg.n, cfg.truth));
  const std::size_t per_cycle = static_cast<std::size_t>(std::lround(cfg.truth.period / cfg.dt));
  const std::size_t n_steps = per_cycle * static_cast<std::size_t>(cfg.cycles);
  const std::vector<Vec3> u0{{0, 0, 0}};
  const std::vector<double> p0{0.0};
  const auto initial = solvers::initial_flow_state(*P, u0, p0, 0.0);
  const auto problem = flow_transient(P, initial, cfg.dt, n_steps, [P](const solvers::FlowVars& s, std::size_t) {
    return bifurcation_observation(*P, s);
  });

  const std::array<std::string, 2> outlets{"outlet1", "outlet2"};
  InverseResult out;
  solvers::ParamValues truth_values;
  for (std::size_t o = 0; o < 2; ++o) {
    const auto& w = cfg.truth.windkessel[o];
    truth_values[solvers::windkessel_param_name("Rp", outlets[o])] = w.Rp;
    truth_values[solvers::windkessel_param_name("C", outlets[o])] = w.C;
    truth_values[solvers::windkessel_param_name("Rd", outlets[o])] = w.Rd;
  }

  const auto data = adjoint::run_forward(problem, truth_values);
  std::vector<std::size_t> samples;
  for (std::size_t k = 0; k < n_steps; ++k) {
    if ((k + 1) % static_cast<std::size_t>(cfg.sample_every) == 0) samples.push_back(k);
  }
  // Mean flows over the final period, trapezoid on the step outputs t_{k+1}.
  const std::size_t first = n_steps > per_cycle ? n_steps - per_cycle - 1 : 0;
  Vector t_last;
  for (std::size_t k = first; k < n_steps; ++k) t_last.push_back(static_cast<double>(k + 1) * cfg.dt);
  const Vector q_weights = time_average_weights(t_last);

  Vector p_data, q_data(2, 0.0);
  for (std::size_t k : samples) p_data.push_back(data[k][0]);
  for (std::size_t j = 0; j < q_weights.size(); ++j) {
    for (std::size_t o = 0; o < 2; ++o) q_data[o] += q_weights[j] * data[first + j][1 + o];
  }
  const auto [pmin, pmax] = std::minmax_element(p_data.begin(), p_data.end());
  const double p_range = *pmax - *pmin;
  if (!(p_range > 0.0)) fail(ErrorCode::InvalidConfig, "synthetic inlet pressure is constant");
  for (double q : q_data) {
    if (!(std::abs(q) > 0.0)) fail(ErrorCode::InvalidConfig, "synthetic mean outlet flow is zero");
  }

  const adjoint::LossFunction loss = [&](const std::vector<Vector>& obs) {
    std::vector<Vector> grad(obs.size(), Vector(3, 0.0));
    Vector p_sim, p_ref;
    for (std::size_t k : samples) {
      p_sim.push_back(obs[k][0] / p_range);
      p_ref.push_back(p_data[p_sim.size() - 1] / p_range);
    }
    Vector q_sim(2, 0.0), q_ref(2, 1.0);
    for (std::size_t j = 0; j < q_weights.size(); ++j) {
      for (std::size_t o = 0; o < 2; ++o) q_sim[o] += q_weights[j] * obs[first + j][1 + o] / q_data[o];
    }
    const auto lp = loss_mse(p_sim, p_ref);
    const auto lq = loss_mse(q_sim, q_ref);
    for (std::size_t i = 0; i < samples.size(); ++i) grad[samples[i]][0] += cfg.lambda_p * lp.grad[i] / p_range;
    for (std::size_t j = 0; j < q_weights.size(); ++j) {
      for (std::size_t o = 0; o < 2; ++o) grad[first + j][1 + o] += cfg.lambda_q * lq.grad[o] * q_weights[j] / q_data[o];
    }
    return std::make_pair(loss_composite(lp.value, lq.value, cfg.lambda_p, cfg.lambda_q), grad);
  };

  // Empirical start from the last-cycle pressure samples.
  Vector t_samples, p_samples;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] >= first) {
      t_samples.push_back(static_cast<double>(samples[i] + 1) * cfg.dt);
      p_samples.push_back(p_data[i]);
    }
  }
  const auto estimate = bc::estimate_rcr_initial(t_samples, p_samples, q_data, cfg.gamma);

  solvers::ParamValues fixed;
  for (std::size_t o = 0; o < 2; ++o) {
    const std::array<std::pair<const char*, double>, 3> entries{
        {{"Rp", estimate[o].Rp}, {"C", estimate[o].C}, {"Rd", estimate[o].Rd}}};
    for (const auto& [which, value] : entries) {
      const std::string name = solvers::windkessel_param_name(which, outlets[o]);
      if (cfg.resistances_only && std::string(which) == "C") {
        fixed[name] = truth_values.at(name);
        continue;
      }
      out.names.push_back(name);
      out.truth.push_back(truth_values.at(name));
      out.initial.push_back(value);
    }
  }

  const LogReparam reparam(out.initial);
  Vector alpha(out.initial.size(), 0.0);
  const auto plan = plan_for(n_steps, cfg.snapshots);
  AdamState adam;
  adam.lr = cfg.lr;
  Vector theta = out.initial;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const auto t0 = Clock::now();
    theta = reparam.to_physical(alpha);
    solvers::ParamValues values = fixed;
    for (std::size_t i = 0; i < theta.size(); ++i) values[out.names[i]] = theta[i];
    const auto g = adjoint::differentiate_transient(problem, values, loss, plan);
    Vector dtheta(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) dtheta[i] = g.gradient.at(out.names[i]);
    IterationRecord rec{it, g.loss, theta, reparam.chain(alpha, dtheta), seconds_since(t0)};
    out.recomputed_steps = g.recomputed_steps;
    out.peak_stored = g.peak_stored;
    out.history.push_back(rec);
    out.iterations = it + 1;
    if (on_iteration) on_iteration(rec);
    if (max_rel_error(theta, out.truth) < cfg.tolerance) {
      out.converged = true;
      break;
    }
    adam_step(adam, alpha, rec.gradient);
    theta = reparam.to_physical(alpha);
  }
  out.recovered = theta;
  out.max_rel_error = max_rel_error(theta, out.truth);
  return out;
}

void write_history_csv(const InverseResult& r, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::Io, "cannot write " + path);
  f << "iteration,loss";
  for (const auto& n : r.names) f << ',' << n;
  for (const auto& n : r.names) f << ",grad_" << n;
  f << ",seconds\n" << std::setprecision(12);
  for (const auto& h : r.history) {
    f << h.iteration << ',' << h.loss;
    for (double x : h.params) f << ',' << x;
    for (double x : h.gradient) f << ',' << x;
    f << ',' << h.seconds << '\n';
  }
}

}  // namespace fvg::inverse
