#include "fvgraph/solvers/benchmarks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "fvgraph/common/error.hpp"
#include "fvgraph/meshio/generators.hpp"

namespace fvg::solvers {

namespace {

constexpr double kPi = std::numbers::pi;

/// Cell values of an n x n structured slab on the unit square, indexed [j][i].
std::vector<Vector> slab_grid(const graph::MeshGraph& g, std::span<const double> v, int n) {
  if (g.n_cells != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    fail(ErrorCode::ShapeError, "cavity profiles need an n x n slab");
  }
  std::vector<Vector> grid(static_cast<std::size_t>(n), Vector(static_cast<std::size_t>(n), 0.0));
  for (std::size_t c = 0; c < g.n_cells; ++c) {
    const auto& x = g.cell_centroid[c];
    const auto i = static_cast<std::size_t>(std::clamp(static_cast<int>(std::floor(x.x * n)), 0, n - 1));
    const auto j = static_cast<std::size_t>(std::clamp(static_cast<int>(std::floor(x.y * n)), 0, n - 1));
    grid[j][i] = v[c];
  }
  return grid;
}

}  // namespace

double poisson3d_exact(const Vec3& x) {
  return 2.0 * std::sin(kPi * x.x) * (std::pow(x.y, 4) - x.y) * std::sin(2.0 * kPi * x.z) + 10.0;
}

double poisson3d_source(const Vec3& x) {
  return -10.0 * kPi * kPi * std::sin(kPi * x.x) * (std::pow(x.y, 4) - x.y) * std::sin(2.0 * kPi * x.z) +
         24.0 * std::sin(kPi * x.x) * x.y * x.y * std::sin(2.0 * kPi * x.z);
}

PoissonStudy poisson_convergence(std::span<const int> resolutions, const PoissonOptions& opt) {
  PoissonStudy study;
  for (int n : resolutions) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = graph::MeshGraph::from_mesh(meshio::generate_cube_tet(n));
    Vector f(g->n_cells);
    for (std::size_t c = 0; c < g->n_cells; ++c) f[c] = poisson3d_source(g->cell_centroid[c]);
    // The exact solution equals 10 on every face of the cube.
    const bc::FieldBoundary fb{"phi", {bc::BoundarySpec::fixed(10.0)}};
    auto r = solve_poisson(*g, f, fb, opt);
    double e2 = 0.0, vol = 0.0;
    for (std::size_t c = 0; c < g->n_cells; ++c) {
      const double e = r.phi[c] - poisson3d_exact(g->cell_centroid[c]);
      e2 += e * e * g->volume[c];
      vol += g->volume[c];
    }
    PoissonStudyRow row{n, g->n_cells, std::sqrt(e2 / vol), r.outer_iterations,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), std::move(r.phi)};
    if (!study.rows.empty()) {
      const double prev = study.rows.back().l2_error;
      study.orders.push_back(std::log2(prev / row.l2_error));
      study.monotone = study.monotone && row.l2_error < prev;
    }
    study.rows.push_back(std::move(row));
  }
  return study;
}

StepAdvectionResult run_step_advection(int n, fvops::ConvectionScheme scheme, double dt, std::size_t max_steps,
                                       double steady_tol) {
  StepAdvectionSetup setup;
  setup.scheme = scheme;
  const auto P = step_advection_problem(n, setup);
  const auto& g = *P.graph;
  RunOptions opt;
  opt.n_steps = max_steps;
  opt.dt = dt;
  opt.steady_tol = steady_tol;
  auto traj = run_transient(P, Vector(g.n_cells, 0.0), 0.0, opt);

  StepAdvectionResult out;
  out.steps = traj.steps;
  out.steady = traj.steady;
  out.min = *std::min_element(traj.phi.begin(), traj.phi.end());
  out.max = *std::max_element(traj.phi.begin(), traj.phi.end());
  // Cells whose centroid is nearest to x = 0.3 within each row of the triangulated grid.
  const double h = 1.0 / n;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t c = 0; c < g.n_cells; ++c) {
    const auto& x = g.cell_centroid[c];
    if (std::abs(x.x - 0.3) <= 0.5 * h) pts.emplace_back(x.y, traj.phi[c]);
  }
  std::sort(pts.begin(), pts.end());
  for (const auto& [y, v] : pts) {
    out.profile.s.push_back(y);
    out.profile.value.push_back(v);
    out.peak = std::max(out.peak, v);
  }
  out.phi = std::move(traj.phi);
  return out;
}

CavityProfiles cavity_profiles(const graph::MeshGraph& g, const FlowState& s, int n) {
  const auto ux = slab_grid(g, s.ux, n);
  const auto uy = slab_grid(g, s.uy, n);
  const std::size_t lo = static_cast<std::size_t>((n - 1) / 2);
  const std::size_t hi = static_cast<std::size_t>(n / 2);
  CavityProfiles p;
  for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
    const double at = (static_cast<double>(k) + 0.5) / n;
    p.u.s.push_back(at);
    p.u.value.push_back(0.5 * (ux[k][lo] + ux[k][hi]));
    p.v.s.push_back(at);
    p.v.value.push_back(0.5 * (uy[lo][k] + uy[hi][k]));
  }
  return p;
}

CavityRun run_cavity(int n, double dt, std::size_t max_steps, double steady_tol, const CavitySetup& setup) {
  const auto P = cavity_problem(n, setup);
  const std::vector<Vec3> u0{{0, 0, 0}};
  const std::vector<double> p0{0.0};
  RunOptions opt;
  opt.n_steps = max_steps;
  opt.dt = dt;
  opt.steady_tol = steady_tol;
  CavityRun r;
  r.run = run_transient(P, initial_flow_state(P, u0, p0, 0.0), opt);
  r.profiles = cavity_profiles(*P.graph, r.run.state, n);
  return r;
}

double profile_rel_l2(const LineSample& a, const LineSample& ref) {
  if (a.s.empty() || ref.s.empty()) fail(ErrorCode::ShapeError, "empty profile");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.s.size(); ++k) {
    const double x = a.s[k];
    double r;
    if (x <= ref.s.front()) {
      r = ref.value.front();
    } else if (x >= ref.s.back()) {
      r = ref.value.back();
    } else {
      const auto j = static_cast<std::size_t>(std::upper_bound(ref.s.begin(), ref.s.end(), x) - ref.s.begin());
      const double w = (x - ref.s[j - 1]) / (ref.s[j] - ref.s[j - 1]);
      r = (1.0 - w) * ref.value[j - 1] + w * ref.value[j];
    }
    num += (a.value[k] - r) * (a.value[k] - r);
    den += r * r;
  }
  return std::sqrt(num / den);
}

}  // namespace fvg::solvers
