#include "fvgraph/solvers/cases.hpp"

#include "fvgraph/meshio/generators.hpp"

namespace fvg::solvers {

namespace {

using bc::BoundarySpec;

/// Walls fixed at zero velocity, empty patches empty, everything else from `other`.
template <typename F>
void fill(const graph::MeshGraph& g, bc::FieldBoundary& U, bc::FieldBoundary& p, F other) {
  for (const auto& patch : g.patches) {
    if (patch.is_empty()) {
      U.patch.push_back(BoundarySpec::empty());
      p.patch.push_back(BoundarySpec::empty());
    } else {
      other(patch, U, p);
    }
  }
}

}  // namespace

FlowProblem cavity_problem(int n, const CavitySetup& s) {
  auto g = graph::MeshGraph::from_mesh(meshio::generate_cavity(n));
  bc::FieldBoundary U{"U", {}}, p{"p", {}};
  fill(*g, U, p, [&](const graph::BoundaryPatch& patch, bc::FieldBoundary& u, bc::FieldBoundary& pp) {
    BoundarySpec spec = BoundarySpec::fixed(Vec3{patch.name == "movingWall" ? s.lid : 0.0, 0, 0});
    if (patch.name == "movingWall" && !s.lid_param.empty()) spec.bind[0] = s.lid_param;
    u.patch.push_back(spec);
    pp.patch.push_back(BoundarySpec::zero_gradient());
  });
  return make_flow_problem(std::move(g), std::move(U), std::move(p), s.nu, s.convection);
}

FlowProblem elbow_problem(int n, const ElbowSetup& s) {
  auto g = graph::MeshGraph::from_mesh(meshio::generate_elbow(n));
  bc::FieldBoundary U{"U", {}}, p{"p", {}};
  fill(*g, U, p, [&](const graph::BoundaryPatch& patch, bc::FieldBoundary& u, bc::FieldBoundary& pp) {
    if (patch.name == "outlet") {
      u.patch.push_back(BoundarySpec::zero_gradient());
      pp.patch.push_back(BoundarySpec::fixed(0.0));
      return;
    }
    const Vec3 v = patch.name == "inlet1" ? s.u1 : patch.name == "inlet2" ? s.u2 : Vec3{0, 0, 0};
    u.patch.push_back(BoundarySpec::fixed(v));
    pp.patch.push_back(BoundarySpec::zero_gradient());
  });
  return make_flow_problem(std::move(g), std::move(U), std::move(p), s.nu);
}

FlowProblem bifurcation_problem(int n, const BifurcationSetup& s) {
  auto g = graph::MeshGraph::from_mesh(meshio::generate_bifurcation(n));
  const auto& d = meshio::kBifurcation;
  bc::FieldBoundary U{"U", {}}, p{"p", {}};
  fill(*g, U, p, [&](const graph::BoundaryPatch& patch, bc::FieldBoundary& u, bc::FieldBoundary& pp) {
    if (patch.name == "inlet") {
      BoundarySpec in;
      in.kind = bc::BcKind::Parabolic;
      in.parabolic.u_max = s.u_max;
      in.parabolic.center = {0, 0, 0.5 * d.thickness};
      in.parabolic.radius = d.half_width;
      in.parabolic.direction = {1, 0, 0};
      in.parabolic.axis = {0, 0, 1};
      in.parabolic.waveform = bc::HalfSineWaveform{s.period, s.systolic_fraction};
      u.patch.push_back(in);
      pp.patch.push_back(BoundarySpec::zero_gradient());
    } else if (patch.name == "outlet1" || patch.name == "outlet2") {
      BoundarySpec wk;
      wk.kind = bc::BcKind::Windkessel;
      wk.windkessel = s.windkessel[patch.name == "outlet1" ? 0 : 1];
      wk.windkessel_scheme = s.scheme;
      u.patch.push_back(BoundarySpec::zero_gradient());
      pp.patch.push_back(wk);
    } else {
      u.patch.push_back(BoundarySpec::fixed(Vec3{0, 0, 0}));
      pp.patch.push_back(BoundarySpec::zero_gradient());
    }
  });
  FlowProblem P = make_flow_problem(std::move(g), std::move(U), std::move(p), s.nu);
  P.rho = s.rho;
  return P;
}

ScalarTransportProblem step_advection_problem(int n, const StepAdvectionSetup& s) {
  auto g = graph::MeshGraph::from_mesh(meshio::generate_square_tri(n));
  bc::FieldBoundary T{"T", {}};
  for (const auto& patch : g->patches) {
    if (patch.is_empty()) T.patch.push_back(BoundarySpec::empty());
    else if (patch.name == "inletLower") T.patch.push_back(BoundarySpec::fixed(1.0));
    else if (patch.name == "outlet") T.patch.push_back(BoundarySpec::zero_gradient());
    else T.patch.push_back(BoundarySpec::fixed(0.0));
  }
  ScalarTransportProblem p =
      make_scalar_problem(std::move(g), std::move(T), s.diffusivity, s.scheme, fvops::TimeScheme::BackwardEuler);
  set_uniform_velocity(p, s.u);
  return p;
}

}  // namespace fvg::solvers
