#pragma once

#include <span>
#include <string>
#include <vector>

#include "fvgraph/solvers/cases.hpp"
#include "fvgraph/solvers/run.hpp"

namespace fvg::solvers {

/// phi = 2 sin(pi x)(y^4 - y) sin(2 pi z) + 10 on the unit cube, and f = laplacian(phi).
double poisson3d_exact(const Vec3& x);
double poisson3d_source(const Vec3& x);

struct PoissonStudyRow {
  int n = 0;
  std::size_t cells = 0;
  double l2_error = 0.0;  // volume-weighted RMS over cells
  int outer_iterations = 0;
  double seconds = 0.0;
  Vector phi;
};

struct PoissonStudy {
  std::vector<PoissonStudyRow> rows;
  /// log2(e_{k-1} / e_k) between consecutive rows; resolutions are expected to double.
  std::vector<double> orders;
  bool monotone = true;
};

/// Solves the manufactured problem on cube-tet meshes, Dirichlet data from the exact solution.
PoissonStudy poisson_convergence(std::span<const int> resolutions, const PoissonOptions& opt = {});

struct LineSample {
  std::vector<double> s;      // coordinate along the line
  std::vector<double> value;
};

struct StepAdvectionResult {
  Vector phi;
  double min = 0.0, max = 0.0;
  LineSample profile;  // phi at the cells nearest to x = 0.3, ordered by y
  double peak = 0.0;
  std::size_t steps = 0;
  bool steady = false;
};

/// Marches the step-advection case to steady state (max |dphi|/dt below steady_tol).
StepAdvectionResult run_step_advection(int n, fvops::ConvectionScheme scheme, double dt = 0.05,
                                       std::size_t max_steps = 4000, double steady_tol = 1e-8);

struct CavityProfiles {
  LineSample u;  // u_x on x = 0.5, ordered by y
  LineSample v;  // u_y on y = 0.5, ordered by x
};

/// Centreline profiles of an n x n cavity slab, averaging the two cell columns (rows) that
/// straddle the centreline for even n.
CavityProfiles cavity_profiles(const graph::MeshGraph& g, const FlowState& s, int n);

struct CavityRun {
  FlowRunResult run;
  CavityProfiles profiles;
};

/// Pseudo-transient march of the lid-driven cavity until max |dU|/dt < steady_tol.
CavityRun run_cavity(int n, double dt = 0.01, std::size_t max_steps = 5000, double steady_tol = 1e-4,
                     const CavitySetup& setup = {});

/// Relative L2 distance of profile a from `ref` at a's sample positions, `ref` linearly
/// interpolated. Throws ShapeError on an empty profile.
double profile_rel_l2(const LineSample& a, const LineSample& ref);

}  // namespace fvg::solvers
