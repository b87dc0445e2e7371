#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fvgraph/bc/boundary_spec.hpp"
#include "fvgraph/fvops/schemes.hpp"
#include "fvgraph/linalg/settings.hpp"
#include "fvgraph/meshio/foam_dict.hpp"
#include "fvgraph/meshio/raw_mesh.hpp"

namespace fvg::meshio {

struct FieldSpec {
  std::string name;
  bool is_vector = false;
  std::vector<Vec3> internal;  // one entry when uniform, otherwise n_cells
  std::map<std::string, bc::BoundarySpec> boundary;

  Vec3 internal_value(std::size_t cell) const { return internal.size() == 1 ? internal[0] : internal[cell]; }
};

struct CaseConfig {
  std::string case_dir;
  std::string application = "icoFoam";
  RawMesh mesh;

  double start_time = 0.0;
  double end_time = 1.0;
  double dt = 0.01;
  int write_every = 0;  // steps between field writes; 0 writes only the final state

  double nu = 0.01;
  double rho = 1.0;
  double diffusivity = 0.0;

  fvops::ConvectionScheme convection_U = fvops::ConvectionScheme::Upwind;
  fvops::ConvectionScheme convection_T = fvops::ConvectionScheme::Upwind;
  fvops::DiffusionMode diffusion = fvops::DiffusionMode::OverRelaxed;
  fvops::TimeScheme time_scheme = fvops::TimeScheme::BackwardEuler;

  linalg::SolverSettings solver_p = linalg::pressure_defaults();
  linalg::SolverSettings solver_U = linalg::momentum_defaults();
  linalg::SolverSettings solver_T = linalg::scalar_defaults();

  int n_correctors = 2;
  int n_nonorth_correctors = 0;
  std::size_t p_ref_cell = 0;
  double p_ref_value = 0.0;
  bool explicit_predictor = false;

  std::map<std::string, FieldSpec> fields;

  const FieldSpec& field(const std::string& name) const;
  bool has_field(const std::string& name) const { return fields.count(name) != 0; }
};

/// Parses an OpenFOAM-style case directory (ASCII only).
CaseConfig parse_case(const std::string& case_dir);

/// Reads a volScalarField / volVectorField file; checks every patch has an entry.
FieldSpec parse_field(const std::string& path, const std::string& name, const RawMesh& mesh);
FieldSpec parse_field_text(const std::string& text, const std::string& source, const std::string& name,
                           const RawMesh& mesh);

bc::BoundarySpec parse_boundary_entry(const foam::Dict& entry, bool is_vector, const std::string& where);

}  // namespace fvg::meshio
