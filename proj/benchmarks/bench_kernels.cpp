#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <vector>

#include "fvgraph/adjoint/checkpoint.hpp"
#include "fvgraph/adjoint/transient.hpp"
#include "fvgraph/bc/windkessel.hpp"
#include "fvgraph/fvops/operators.hpp"
#include "fvgraph/graph/mesh_graph.hpp"
#include "fvgraph/inverse/drivers.hpp"
#include "fvgraph/meshio/generators.hpp"
#include "fvgraph/solvers/benchmarks.hpp"
#include "fvgraph/solvers/cases.hpp"

namespace {

using namespace fvg;

void BM_GraphFromMesh(benchmark::State& st) {
  const auto mesh = meshio::generate_cube_tet(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(graph::MeshGraph::from_mesh(mesh));
  st.counters["cells"] = static_cast<double>(mesh.n_cells);
}
BENCHMARK(BM_GraphFromMesh)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_GreenGaussGradient(benchmark::State& st) {
  const auto g = graph::MeshGraph::from_mesh(meshio::generate_cube_tet(static_cast<int>(st.range(0))));
  std::vector<double> phi(g->n_cells), phi_b(g->n_boundary);
  for (std::size_t c = 0; c < phi.size(); ++c) phi[c] = std::sin(g->cell_centroid[c].x);
  for (auto _ : st) benchmark::DoNotOptimize(fvops::green_gauss_gradient(*g, phi, phi_b));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * g->n_cells));
}
BENCHMARK(BM_GreenGaussGradient)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_PoissonSolve(benchmark::State& st) {
  const std::vector<int> n{static_cast<int>(st.range(0))};
  for (auto _ : st) benchmark::DoNotOptimize(solvers::poisson_convergence(n));
}
BENCHMARK(BM_PoissonSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PisoStepCavity(benchmark::State& st) {
  const auto P = solvers::cavity_problem(static_cast<int>(st.range(0)));
  const std::size_t n = P.graph->n_cells;
  auto s = solvers::initial_flow_state(P, std::vector<Vec3>(n), std::vector<double>(n, 0.0), 0.0);
  for (auto _ : st) s = solvers::piso_step(P, s, 0.01);
  st.counters["cells"] = static_cast<double>(n);
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations()));
}
BENCHMARK(BM_PisoStepCavity)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_WindkesselExactStep(benchmark::State& st) {
  const bc::WindkesselParams p{100.0, 1.1111e-3, 900.0};
  double pc = 0.0;
  for (auto _ : st) {
    pc = bc::windkessel_step(pc, p, 0.02, 1e-3, bc::WindkesselScheme::Exact).pc;
    benchmark::DoNotOptimize(pc);
  }
}
BENCHMARK(BM_WindkesselExactStep);

/// Reverse pass through a short cavity run with the lid speed as parameter.
void BM_CavityAdjointGradient(benchmark::State& st) {
  const auto steps = static_cast<std::size_t>(st.range(0));
  solvers::CavitySetup setup;
  setup.lid_param = "lid";
  auto P = std::make_shared<const solvers::FlowProblem>(solvers::cavity_problem(16, setup));
  const solvers::ParamValues params{{"lid", 2.0}};
  const std::size_t n = P->graph->n_cells;
  const auto init = solvers::initial_flow_state(*P, std::vector<Vec3>(n), std::vector<double>(n, 0.0), 0.0, params);
  const auto problem = inverse::flow_transient(
      P, init, 0.01, steps, [steps](const solvers::FlowVars& s, std::size_t k) {
        return k + 1 == steps ? s.ux : inverse::Var{};
      });
  const adjoint::LossFunction loss = [](const std::vector<adjoint::Vector>& obs) {
    double v = 0.0;
    std::vector<adjoint::Vector> g(obs.size());
    for (std::size_t k = 0; k < obs.size(); ++k) {
      g[k] = obs[k];
      for (double x : obs[k]) v += 0.5 * x * x;
    }
    return std::make_pair(v, g);
  };
  const auto plan = adjoint::plan_checkpoints(steps);
  for (auto _ : st) benchmark::DoNotOptimize(adjoint::differentiate_transient(problem, params, loss, plan));
}
BENCHMARK(BM_CavityAdjointGradient)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
