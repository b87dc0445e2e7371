#pragma once

#include <string>
#include <vector>

#include "fvgraph/common/vec3.hpp"
#include "fvgraph/meshio/raw_mesh.hpp"

namespace fvg::meshio {

struct FieldOutput {
  std::string name;
  bool is_vector = false;
  std::vector<Vec3> values;  // scalars in .x
};

/// Directory name for a time value, e.g. 0.5 -> "0.5".
std::string format_time(double t);

/// Writes `case_dir/<time>/<name>` files with nonuniform internal fields.
void write_time_directory(const std::string& case_dir, double time, const RawMesh& mesh,
                          const std::vector<FieldOutput>& fields);

std::string format_field(const FieldOutput& field, const RawMesh& mesh, const std::string& location);

}  // namespace fvg::meshio
