#pragma once

#include <string>

#include "fvgraph/meshio/raw_mesh.hpp"

namespace fvg::meshio {

/// Reads constant/polyMesh/{points,faces,owner,neighbour,boundary} under `case_dir`.
/// `case_dir` may also point directly at a polyMesh directory.
RawMesh read_polymesh(const std::string& case_dir);

/// Writes an ASCII polyMesh into `case_dir`/constant/polyMesh.
void write_polymesh(const std::string& case_dir, const RawMesh& mesh);

/// Shortest text that parses back to exactly `v`.
std::string format_number(double v);

/// Standard FoamFile banner for generated files.
std::string foam_header(const std::string& cls, const std::string& object, const std::string& location = "");

}  // namespace fvg::meshio
