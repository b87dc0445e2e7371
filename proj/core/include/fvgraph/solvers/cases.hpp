#pragma once

#include <array>
#include <string>

#include "fvgraph/bc/windkessel.hpp"
#include "fvgraph/solvers/flow.hpp"
#include "fvgraph/solvers/scalar.hpp"

namespace fvg::solvers {

/// Built-in benchmark setups on the generated meshes.

struct CavitySetup {
  double lid = 2.0;
  double nu = 0.01;
  std::string lid_param;  // non-empty binds the lid x velocity to this parameter name
  fvops::ConvectionScheme convection = fvops::ConvectionScheme::Upwind;
};
FlowProblem cavity_problem(int n, const CavitySetup& s = {});

struct ElbowSetup {
  Vec3 u1{1, 0, 0};
  Vec3 u2{0, 3, 0};
  double nu = 0.01;
};
FlowProblem elbow_problem(int n, const ElbowSetup& s = {});

/// Pulsatile parabolic inflow into the Y channel with an RCR outlet on each branch (CGS units).
struct BifurcationSetup {
  double u_max = 10.0;  // centreline peak, cm/s
  double nu = 0.04;     // cm^2/s
  double rho = 1.06;    // g/cm^3
  double period = 1.0;
  double systolic_fraction = 0.4;
  std::array<bc::WindkesselParams, 2> windkessel{{{100.0, 1.1111e-3, 900.0}, {160.0, 6.9444e-4, 1440.0}}};
  bc::WindkesselScheme scheme = bc::WindkesselScheme::Exact;
};
FlowProblem bifurcation_problem(int n, const BifurcationSetup& s = {});

/// Oblique advection of an inlet step: phi = 1 on the lower inlet, 0 on the upper inlet and
/// the bottom wall, zero gradient at the outlet.
struct StepAdvectionSetup {
  Vec3 u{2, 1, 0};
  double diffusivity = 0.001;
  fvops::ConvectionScheme scheme = fvops::ConvectionScheme::Upwind;
};
ScalarTransportProblem step_advection_problem(int n, const StepAdvectionSetup& s = {});

}  // namespace fvg::solvers
