#include <gtest/gtest.h>

#include <bit>
#include <deque>
#include <set>
#include <unordered_map>

#include "adjoint_cases.hpp"
#include "fvgraph/adjoint/checkpoint.hpp"
#include "fvgraph/graph/primitives.hpp"
#include "fvgraph/meshio/polymesh.hpp"
#include "gradcheck.hpp"
#include "test_support.hpp"

namespace fvg::adjoint {
namespace {

using fvg::testing::fixture;

TEST(GradCheck, EveryRegisteredOpHasAGenerator) {
  const auto factories = fvg::testing::gradcheck_factories();
  for (const auto name : ad::registered_ops()) EXPECT_TRUE(factories.count(std::string(name))) << name;
}

TEST(GradCheck, RandomizedVjpMatchesCentralDifferences) {
  for (const auto& r : fvg::testing::run_gradcheck_suite(20)) {
    SCOPED_TRACE(r.op);
    EXPECT_GE(r.instances, 20);
    EXPECT_LT(r.max_rel, 1e-5);
  }
}

TEST(Tape, GatherScatterVjpsAreExactTransposes) {
  std::mt19937_64 rng(12);
  const auto idx = fvg::testing::random_index(rng, 30, 7);
  const auto w = fvg::testing::uniform(rng, 30, -1, 1);
  ad::Tape tape;
  const Var x = tape.leaf(fvg::testing::uniform(rng, 7, -1, 1));
  tape.backward(ad::weighted_sum(ad::gather(x, idx), w));
  std::vector<double> expect(7, 0.0);
  graph::scatter_add(w, idx, expect);
  EXPECT_EQ(tape.gradient(x), expect);

  const auto v = fvg::testing::uniform(rng, 7, -1, 1);
  ad::Tape tape2;
  const Var y = tape2.leaf(w);
  tape2.backward(ad::weighted_sum(ad::scatter_add(y, idx, 7), v));
  EXPECT_EQ(tape2.gradient(y), graph::gather(v, idx));
}

TEST(Tape, NonDifferentiableOpIsNamed) {
  ad::Tape tape;
  const Var x = tape.leaf({1.0});
  const std::vector<Var> in{x};
  try {
    tape.record_nondiff("floor_op", {1.0}, in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonDifferentiableOp);
    EXPECT_NE(std::string(e.what()).find("floor_op"), std::string::npos);
  }
  const std::vector<Var> consts{tape.constant({1.0})};
  EXPECT_NO_THROW(tape.record_nondiff("floor_op", {1.0}, consts));
  ad::Tape plain(false);
  const std::vector<Var> leaves{plain.leaf({1.0})};
  EXPECT_NO_THROW(plain.record_nondiff("floor_op", {1.0}, leaves));
}

TEST(Vjp, HalfSquaredNormGivesParams) {
  const solvers::ParamValues theta{{"a", 1.5}, {"b", -2.0}, {"c", 0.25}};
  const auto g = vjp([](ad::Tape&, solvers::ParamSet& ps) { return ad::concat(ps.vars()); }, theta,
                     std::vector<double>{1.5, -2.0, 0.25});
  for (const auto& [name, v] : theta) EXPECT_EQ(g.at(name), v);
}

TEST(Vjp, WindkesselStepMatchesCentralDifferences) {
  const solvers::ParamValues p{{"Rd", 900.0}, {"C", 1.1111e-3}, {"Q", 4.0}};
  const auto f = [](ad::Tape& tape, solvers::ParamSet& ps) {
    const Var out = bc::windkessel_step(tape.scalar_constant(20.0), tape.scalar_constant(100.0), ps.get_or("C", 0),
                                        ps.get_or("Rd", 0), ps.get_or("Q", 0), 0.01, bc::WindkesselScheme::Exact);
    return ad::slice(out, 0, 1);
  };
  const auto g = vjp(f, p, std::vector<double>{1.0});
  for (const auto& [name, v] : p) {
    const double h = 1e-6 * std::abs(v);
    auto plus = p, minus = p;
    plus[name] += h;
    minus[name] -= h;
    const auto eval = [&](const solvers::ParamValues& q) {
      const auto s = bc::windkessel_step(20.0, {100.0, q.at("C"), q.at("Rd")}, q.at("Q"), 0.01,
                                         bc::WindkesselScheme::Exact);
      return s.pc;
    };
    const double fd = (eval(plus) - eval(minus)) / (2 * h);
    EXPECT_NEAR(g.at(name), fd, 1e-6 * std::max(1.0, std::abs(fd))) << name;
  }
}

/// 2-cell system [[4,1],[1,3]] on the two-hex graph.
struct TwoCellSystem {
  std::shared_ptr<const graph::MeshGraph> g = graph::MeshGraph::from_mesh(meshio::read_polymesh(fixture("two_hex")));
  linalg::GraphPattern pattern = linalg::GraphPattern::from_graph(*g);
  linalg::SolverSettings s{linalg::KrylovMethod::BiCGStab, linalg::Preconditioner::ILU0, 1e-14,
                           std::numeric_limits<double>::infinity(), 100, 30};
};

TEST(LinearSolveAdjoint, IdentityPassesCotangentThrough) {
  TwoCellSystem m;
  ad::Tape tape;
  const Var b = tape.leaf({0.3, -0.7});
  const auto sys = linalg::make_system(m.pattern, tape.constant({1, 1}), tape.constant({0}), tape.constant({0}), m.s);
  const Var x = linalg::sparse_solve(sys, b);
  tape.backward(ad::weighted_sum(x, std::vector<double>{2.0, -5.0}));
  const auto gb = tape.gradient(b);
  EXPECT_NEAR(gb[0], 2.0, 1e-14);
  EXPECT_NEAR(gb[1], -5.0, 1e-14);
}

TEST(LinearSolveAdjoint, DenseInverseOracle) {
  TwoCellSystem m;
  ad::Tape tape;
  const Var diag = tape.leaf({4, 3});
  const Var upper = tape.leaf({1});
  const Var lower = tape.leaf({1});
  const Var b = tape.leaf({1, 2});
  const auto sys = linalg::make_system(m.pattern, diag, upper, lower, m.s);
  const Var x = linalg::sparse_solve(sys, b);
  // x = A^{-1} [1, 2] = [1/11, 7/11]
  EXPECT_NEAR(x[0], 1.0 / 11, 1e-13);
  EXPECT_NEAR(x[1], 7.0 / 11, 1e-13);
  tape.backward(ad::slice(x, 0, 1));
  const auto lambda = tape.gradient(b);
  EXPECT_NEAR(lambda[0], 3.0 / 11, 1e-13);
  EXPECT_NEAR(lambda[1], -1.0 / 11, 1e-13);
  // dL/dA_ij = -lambda_i x_j on the pattern
  EXPECT_NEAR(tape.gradient(diag)[0], -lambda[0] * x[0], 1e-13);
  EXPECT_NEAR(tape.gradient(diag)[1], -lambda[1] * x[1], 1e-13);
  EXPECT_NEAR(tape.gradient(upper)[0], -lambda[0] * x[1], 1e-13);
  EXPECT_NEAR(tape.gradient(lower)[0], -lambda[1] * x[0], 1e-13);
}

TEST(Checkpoint, Examples) {
  const auto one = plan_checkpoints(1, 1);
  EXPECT_EQ(one.recomputed_steps, 0u);
  ASSERT_FALSE(one.actions.empty());
  EXPECT_EQ(one.actions.front().kind, CheckpointAction::Kind::Store);
  EXPECT_EQ(one.actions.front().from, 0u);
  EXPECT_EQ(plan_checkpoints(4, 2).recomputed_steps, 2u);
  EXPECT_EQ(max_steps(2, 2), 6u);
  EXPECT_EQ(max_steps(3, 1), 4u);
  EXPECT_EQ(default_snapshots(1), 1);
  EXPECT_EQ(default_snapshots(8), 3);
  EXPECT_EQ(default_snapshots(9), 3);
  EXPECT_EQ(default_snapshots(10), 4);
  EXPECT_EQ(plan_checkpoints(0, 2).actions.size(), 0u);
}

TEST(Checkpoint, InvalidBudget) {
  for (int s : {0, -3}) {
    try {
      plan_checkpoints(5, s);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidBudget);
    }
  }
}

/// Classic revolve cost by its defining recurrence: split at m, reverse the tail with one
/// slot fewer, then the head.
std::uint64_t revolve_recurrence(std::size_t n, int s, std::map<std::pair<std::size_t, int>, std::uint64_t>& memo) {
  if (n <= 1) return 0;
  if (s == 1) return n * (n - 1) / 2;
  const auto key = std::make_pair(n, s);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::uint64_t best = UINT64_MAX;
  for (std::size_t m = 1; m < n; ++m)
    best = std::min(best, m + revolve_recurrence(n - m, s - 1, memo) + revolve_recurrence(m, s, memo));
  return memo[key] = best;
}

TEST(Checkpoint, RevolveCostMatchesRecurrence) {
  std::map<std::pair<std::size_t, int>, std::uint64_t> memo;
  for (int s = 1; s <= 5; ++s) {
    for (std::size_t n = 1; n <= 40; ++n) EXPECT_EQ(revolve_cost(n, s), revolve_recurrence(n, s, memo)) << n << " " << s;
  }
}

/// Exhaustive minimum over all schedules: a free forward sweep that may store any states, then
/// steps reversed from last to first, each needing its input state either stored or in hand.
/// Advancing the working state costs one step outside the sweep. Snapshots (state 0 included)
/// never exceed s; the working state is extra.
std::uint64_t exhaustive_cost(int n, int s) {
  // state: phase (sweep/reverse), k = next step to reverse, w = working state (-1 none), stored mask
  struct Node {
    bool sweep;
    int k, w;
    std::uint32_t mask;
  };
  const auto key = [](const Node& x) {
    return (static_cast<std::uint64_t>(x.sweep) << 50) | (static_cast<std::uint64_t>(x.k + 1) << 40) |
           (static_cast<std::uint64_t>(x.w + 1) << 32) | x.mask;
  };
  std::unordered_map<std::uint64_t, std::uint64_t> dist;
  std::deque<std::pair<Node, std::uint64_t>> q;
  const auto push = [&](const Node& x, std::uint64_t d, bool front) {
    const auto kk = key(x);
    if (auto it = dist.find(kk); it != dist.end() && it->second <= d) return;
    dist[kk] = d;
    if (front) q.emplace_front(x, d);
    else q.emplace_back(x, d);
  };
  push({true, n - 1, 0, 1u}, 0, true);
  while (!q.empty()) {
    auto [x, d] = q.front();
    q.pop_front();
    if (dist[key(x)] < d) continue;
    if (!x.sweep && x.k < 0) return d;
    const int stored = std::popcount(x.mask);
    if (x.sweep) {
      if (x.w >= 0 && stored < s && !(x.mask >> x.w & 1u)) push({true, x.k, x.w, x.mask | 1u << x.w}, d, true);
      if (x.w + 1 < n) push({true, x.k, x.w + 1, x.mask}, d, true);
      else push({false, x.k, -1, x.mask}, d, true);  // sweep ends at state n, which no reverse step needs
      continue;
    }
    const std::uint32_t low = (2u << x.k) - 1;  // states 0..k stay relevant
    if (x.w == x.k || (x.mask >> x.k & 1u)) {
      push({false, x.k - 1, -1, x.mask & (low >> 1)}, d, true);
    }
    if (x.w >= 0 && x.w < x.k) push({false, x.k, x.w + 1, x.mask}, d + 1, false);
    if (x.w >= 0 && !(x.mask >> x.w & 1u)) {
      if (stored < s) push({false, x.k, x.w, x.mask | 1u << x.w}, d, true);
      for (int j = 1; j <= x.k; ++j) {
        if (x.mask >> j & 1u) push({false, x.k, x.w, (x.mask & ~(1u << j)) | 1u << x.w}, d, true);
      }
    }
    for (int j = 0; j <= x.k; ++j) {
      if (x.mask >> j & 1u && j != x.w) push({false, x.k, j, x.mask}, d, true);
    }
  }
  return UINT64_MAX;
}

TEST(Checkpoint, OptimalAgainstExhaustiveSearch) {
  for (int s = 1; s <= 4; ++s) {
    for (int n = 1; n <= 16; ++n) {
      if (s == 4 && n > 13) continue;
      const auto oracle = exhaustive_cost(n, s);
      EXPECT_EQ(sweep_cost(static_cast<std::uint64_t>(n), s), oracle) << "n=" << n << " s=" << s;
      EXPECT_EQ(plan_checkpoints(static_cast<std::size_t>(n), s).recomputed_steps, oracle) << "n=" << n << " s=" << s;
    }
  }
}

TEST(Checkpoint, PlansAreExecutable) {
  using K = CheckpointAction::Kind;
  for (int s = 1; s <= 6; ++s) {
    for (std::size_t n = 1; n <= 60; ++n) {
      SCOPED_TRACE("n=" + std::to_string(n) + " s=" + std::to_string(s));
      const auto plan = plan_checkpoints(n, s);
      std::set<std::size_t> stored;
      std::size_t peak = 0, next = n, recomputed = 0;
      long at = -1;
      // the sweep visits every state once
      for (const auto& a : plan.actions) {
        if (a.sweep) {
          ASSERT_TRUE(a.kind == K::Store || a.kind == K::Advance);
          if (a.kind == K::Store) stored.insert(a.from);
          peak = std::max(peak, stored.size());
          continue;
        }
        switch (a.kind) {
          case K::Store:
            ASSERT_EQ(at, static_cast<long>(a.from));
            stored.insert(a.from);
            peak = std::max(peak, stored.size());
            break;
          case K::Free: ASSERT_EQ(stored.erase(a.from), 1u); break;
          case K::Restore:
            ASSERT_TRUE(stored.count(a.from));
            at = static_cast<long>(a.from);
            break;
          case K::Advance:
            ASSERT_EQ(at, static_cast<long>(a.from));
            ASSERT_LT(a.from, a.to);
            recomputed += a.to - a.from;
            at = static_cast<long>(a.to);
            break;
          case K::Reverse:
            ASSERT_EQ(a.from + 1, next);
            ASSERT_TRUE(stored.count(a.from) || at == static_cast<long>(a.from));
            next = a.from;
            break;
        }
      }
      EXPECT_EQ(next, 0u);
      EXPECT_TRUE(stored.empty());
      EXPECT_LE(peak, static_cast<std::size_t>(s));
      EXPECT_EQ(peak, plan.peak_stored);
      EXPECT_EQ(recomputed, plan.recomputed_steps);
      EXPECT_EQ(plan.recomputed_steps, sweep_cost(n, s));
      EXPECT_EQ(plan.sweep_snapshots().front(), 0u);
    }
  }
}

TEST(Checkpoint, MoreSnapshotsNeverCostMore) {
  for (std::size_t n = 1; n <= 80; ++n) {
    for (int s = 1; s < 8; ++s) EXPECT_GE(sweep_cost(n, s), sweep_cost(n, s + 1));
    EXPECT_EQ(sweep_cost(n, static_cast<int>(n)), 0u);
  }
}

TEST(Transient, CheckpointedMatchesFullStorage) {
  const auto c = fvg::testing::make_scalar_transient(8);
  const auto loss = fvg::testing::squared_error(fvg::testing::constant_targets(8, c->probes.size(), 0.4));
  double ref_loss = 0.0;
  const auto ref = fvg::testing::full_storage_gradient(c->transient, c->params, loss, &ref_loss);
  for (int s : {1, 2, 3, 8}) {
    SCOPED_TRACE(s);
    const auto plan = plan_checkpoints(8, s);
    const auto r = differentiate_transient(c->transient, c->params, loss, plan);
    EXPECT_EQ(r.loss, ref_loss);
    for (const auto& [name, v] : ref) EXPECT_NEAR(r.gradient.at(name), v, 1e-12 * std::abs(v)) << name;
    EXPECT_EQ(r.recomputed_steps, plan.recomputed_steps);
    EXPECT_EQ(r.recorded_steps, 8u);
    EXPECT_LE(r.peak_stored, static_cast<std::size_t>(s));
  }
}

TEST(Transient, ParamIndependentLossHasZeroGradient) {
  const auto c = fvg::testing::make_scalar_transient(5);
  const LossFunction loss = [](const std::vector<Vector>& obs) {
    std::vector<Vector> g(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) g[k].assign(obs[k].size(), 0.0);
    return std::make_pair(3.0, g);
  };
  const auto r = differentiate_transient(c->transient, c->params, loss, plan_checkpoints(5, 2));
  EXPECT_EQ(r.loss, 3.0);
  for (const auto& [name, v] : r.gradient) EXPECT_EQ(v, 0.0) << name;
}

TEST(Transient, PlanSizeMismatch) {
  const auto c = fvg::testing::make_scalar_transient(5);
  const auto loss = fvg::testing::squared_error(fvg::testing::constant_targets(5, c->probes.size(), 0.0));
  try {
    differentiate_transient(c->transient, c->params, loss, plan_checkpoints(4, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidBudget);
  }
}

double transient_loss(const TransientProblem& p, const solvers::ParamValues& params, const LossFunction& loss) {
  return loss(run_forward(p, params)).first;
}

TEST(Transient, ScalarInletGradientMatchesFiniteDifferences) {
  const auto c = fvg::testing::make_scalar_transient(10);
  const auto loss = fvg::testing::squared_error(fvg::testing::constant_targets(10, c->probes.size(), 0.9));
  const auto r = differentiate_transient(c->transient, c->params, loss, plan_checkpoints(10));
  for (const char* name : {"c_in", "DT"}) {
    const double v = c->params.at(name), h = 1e-6 * v;
    auto plus = c->params, minus = c->params;
    plus[name] += h;
    minus[name] -= h;
    const double fd =
        (transient_loss(c->transient, plus, loss) - transient_loss(c->transient, minus, loss)) / (2 * h);
    EXPECT_NEAR(r.gradient.at(name), fd, 1e-5 * std::abs(fd)) << name;
  }
}

/// Flow trajectory with the state carried as FlowVars::list(); observes velocity at a few cells.
struct FlowTransient {
  solvers::FlowProblem problem;
  solvers::FlowState initial;
  TransientProblem transient;
  double dt = 0.0;
};

std::shared_ptr<FlowTransient> make_flow_transient(solvers::FlowProblem P, std::size_t n_steps, double dt,
                                                   std::vector<std::size_t> probes, bool observe_windkessel,
                                                   const solvers::ParamValues& init_params = {}) {
  auto out = std::make_shared<FlowTransient>();
  out->problem = std::move(P);
  const std::size_t n = out->problem.graph->n_cells;
  out->problem.solver_U.tol = 1e-13;
  out->problem.solver_U.max_iter = 2000;
  out->problem.solver_p.tol = 1e-13;
  out->problem.solver_p.abs_tol = 1e-13;
  out->problem.solver_p.max_iter = 2000;
  out->initial = solvers::initial_flow_state(out->problem, std::vector<Vec3>(n), std::vector<double>(n, 0.0), 0.0,
                                               init_params);
  out->dt = dt;
  out->transient.n_steps = n_steps;
  FlowTransient* self = out.get();
  out->transient.init = [self](ad::Tape& tape, solvers::ParamSet&) {
    return solvers::to_vars(tape, self->initial).list();
  };
  out->transient.step = [self, probes, observe_windkessel](ad::Tape&, solvers::ParamSet& ps, std::size_t k,
                                                          const std::vector<Var>& s) {
    const auto in = solvers::FlowVars::from_list(s, static_cast<double>(k) * self->dt);
    const auto next = solvers::piso_step(self->problem, ps, in, self->dt);
    Var obs = observe_windkessel ? ad::concat(next.pc) : ad::gather(next.ux, probes);
    return TransientProblem::StepResult{next.list(), obs};
  };
  return out;
}

TEST(Transient, CavityLidGradientMatchesFiniteDifferences) {
  solvers::CavitySetup setup;
  setup.lid_param = "lid";
  const auto c = make_flow_transient(solvers::cavity_problem(8, setup), 8, 0.01, {5, 27, 36, 58}, false,
                                     {{"lid", 2.0}});
  const auto loss = fvg::testing::squared_error(fvg::testing::constant_targets(8, 4, 0.3));
  const solvers::ParamValues p{{"lid", 2.0}};
  const auto r = differentiate_transient(c->transient, p, loss, plan_checkpoints(8));
  const double h = 1e-4;
  const double fd = (transient_loss(c->transient, {{"lid", 2.0 + h}}, loss) -
                     transient_loss(c->transient, {{"lid", 2.0 - h}}, loss)) /
                    (2 * h);
  EXPECT_NEAR(r.gradient.at("lid"), fd, 1e-4 * std::abs(fd));
}

TEST(Transient, WindkesselParameterGradientsMatchFiniteDifferences) {
  const auto c = make_flow_transient(solvers::bifurcation_problem(3), 50, 1e-3, {}, true);
  const std::vector<std::string> names{"Rp:outlet1", "C:outlet1", "Rd:outlet1", "Rp:outlet2", "C:outlet2",
                                       "Rd:outlet2"};
  const double values[] = {100.0, 1.1111e-3, 900.0, 160.0, 6.9444e-4, 1440.0};
  solvers::ParamValues p;
  for (std::size_t i = 0; i < names.size(); ++i) p[names[i]] = values[i];
  const auto loss = fvg::testing::squared_error(fvg::testing::constant_targets(50, 2, 5.0));
  const auto r = differentiate_transient(c->transient, p, loss, plan_checkpoints(50));
  for (const auto& name : names) {
    const double h = 1e-5 * p.at(name);
    auto plus = p, minus = p;
    plus[name] += h;
    minus[name] -= h;
    const double fd =
        (transient_loss(c->transient, plus, loss) - transient_loss(c->transient, minus, loss)) / (2 * h);
    EXPECT_NEAR(r.gradient.at(name), fd, 1e-4 * std::abs(fd)) << name;
  }
}

}  // namespace
}  // namespace fvg::adjoint
