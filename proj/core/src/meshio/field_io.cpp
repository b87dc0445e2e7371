#include "fvgraph/meshio/field_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fvgraph/common/error.hpp"
#include "fvgraph/meshio/polymesh.hpp"

namespace fvg::meshio {

namespace fs = std::filesystem;

std::string format_time(double t) {
  // round to 12 significant digits so accumulated dt sums give clean names
  std::ostringstream os;
  os.precision(12);
  os << t;
  return os.str();
}

std::string format_field(const FieldOutput& field, const RawMesh& mesh, const std::string& location) {
  std::ostringstream os;
  os << foam_header(field.is_vector ? "volVectorField" : "volScalarField", field.name, location);
  os << "dimensions      [0 0 0 0 0 0 0];\n\n";
  os << "internalField   nonuniform List<" << (field.is_vector ? "vector" : "scalar") << ">\n"
     << field.values.size() << "\n(\n";
  for (const auto& v : field.values) {
    if (field.is_vector) {
      os << '(' << format_number(v.x) << ' ' << format_number(v.y) << ' ' << format_number(v.z) << ")\n";
    } else {
      os << format_number(v.x) << '\n';
    }
  }
  os << ")\n;\n\nboundaryField\n{\n";
  for (const auto& p : mesh.patches) {
    os << "    " << p.name << "\n    {\n        type            " << (p.type == "empty" ? "empty" : "calculated")
       << ";\n    }\n";
  }
  os << "}\n";
  return os.str();
}

void write_time_directory(const std::string& case_dir, double time, const RawMesh& mesh,
                          const std::vector<FieldOutput>& fields) {
  const fs::path dir = fs::path(case_dir) / format_time(time);
  fs::create_directories(dir);
  for (const auto& f : fields) {
    std::ofstream out(dir / f.name);
    if (!out) fail(ErrorCode::Io, "cannot write " + (dir / f.name).string());
    out << format_field(f, mesh, format_time(time));
  }
}

}  // namespace fvg::meshio
