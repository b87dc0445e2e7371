#include "fvgraph/meshio/vtk.hpp"

#include <fstream>
#include <sstream>

#include "fvgraph/common/error.hpp"
#include "fvgraph/meshio/foam_dict.hpp"
#include "fvgraph/meshio/polymesh.hpp"

namespace fvg::meshio {

namespace {

class Words {
 public:
  Words(const std::string& text, std::string source) : in_(text), source_(std::move(source)) {}
  bool next(std::string& w) { return static_cast<bool>(in_ >> w); }
  std::string word() {
    std::string w;
    if (!next(w)) fail(ErrorCode::Parse, source_ + ": unexpected end of VTK file");
    return w;
  }
  double number() {
    const std::string w = word();
    try {
      std::size_t used = 0;
      const double v = std::stod(w, &used);
      if (used != w.size()) throw std::invalid_argument(w);
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, source_ + ": expected number, found '" + w + "'");
    }
  }
  long long integer() {
    const double v = number();
    return static_cast<long long>(v);
  }
  std::string line() {
    std::string l;
    std::getline(in_ >> std::ws, l);
    return l;
  }
  const std::string& source() const { return source_; }

 private:
  std::istringstream in_;
  std::string source_;
};

bool supported_type(int t) { return t == 10 || t == 12 || t == 13 || t == 14; }

}  // namespace

VtkGrid parse_vtk(const std::string& text, const std::string& source) {
  Words w(text, source);
  const std::string banner = w.line();
  if (banner.rfind("# vtk DataFile", 0) != 0) fail(ErrorCode::Parse, source + ": missing VTK banner");
  w.line();  // title
  const std::string format = w.word();
  if (format != "ASCII") fail(ErrorCode::UnsupportedFormat, source + ": VTK format '" + format + "' is not supported");
  if (w.word() != "DATASET" || w.word() != "UNSTRUCTURED_GRID") {
    fail(ErrorCode::UnsupportedFormat, source + ": only UNSTRUCTURED_GRID datasets are supported");
  }
  VtkGrid grid;
  std::vector<std::vector<std::size_t>> conn;
  std::vector<int> types;
  std::size_t n_cell_data = 0;
  std::string key;
  while (w.next(key)) {
    if (key == "POINTS") {
      const auto n = w.integer();
      w.word();
      grid.points.resize(static_cast<std::size_t>(n));
      for (auto& p : grid.points) {
        p.x = w.number();
        p.y = w.number();
        p.z = w.number();
      }
    } else if (key == "CELLS") {
      const auto n = w.integer();
      w.integer();
      conn.resize(static_cast<std::size_t>(n));
      for (auto& c : conn) {
        const auto k = w.integer();
        c.resize(static_cast<std::size_t>(k));
        for (auto& v : c) v = static_cast<std::size_t>(w.integer());
      }
    } else if (key == "CELL_TYPES") {
      const auto n = w.integer();
      types.resize(static_cast<std::size_t>(n));
      for (auto& t : types) t = static_cast<int>(w.integer());
    } else if (key == "CELL_DATA") {
      n_cell_data = static_cast<std::size_t>(w.integer());
    } else if (key == "SCALARS") {
      const std::string name = w.word();
      w.word();
      std::string next = w.word();
      if (next != "LOOKUP_TABLE") {
        if (next != "1") fail(ErrorCode::Parse, source + ": only single-component SCALARS are supported");
        next = w.word();
      }
      if (next != "LOOKUP_TABLE") fail(ErrorCode::Parse, source + ": expected LOOKUP_TABLE");
      w.word();
      std::vector<double> v(n_cell_data);
      for (auto& x : v) x = w.number();
      grid.cell_scalars.emplace_back(name, std::move(v));
    } else if (key == "VECTORS") {
      const std::string name = w.word();
      w.word();
      std::vector<Vec3> v(n_cell_data);
      for (auto& x : v) {
        x.x = w.number();
        x.y = w.number();
        x.z = w.number();
      }
      grid.cell_vectors.emplace_back(name, std::move(v));
    } else if (key == "POINT_DATA" || key == "FIELD") {
      fail(ErrorCode::UnsupportedFormat, source + ": section '" + key + "' is not supported");
    } else {
      fail(ErrorCode::Parse, source + ": unexpected keyword '" + key + "'");
    }
  }
  if (types.size() != conn.size()) fail(ErrorCode::Parse, source + ": CELLS and CELL_TYPES sizes differ");
  grid.cells.resize(conn.size());
  for (std::size_t c = 0; c < conn.size(); ++c) {
    if (!supported_type(types[c])) {
      fail(ErrorCode::UnsupportedCellType, source + ": cell " + std::to_string(c) + " has VTK type " +
                                               std::to_string(types[c]));
    }
    grid.cells[c] = {static_cast<CellType>(types[c]), std::move(conn[c])};
  }
  return grid;
}

VtkGrid read_vtk(const std::string& path) { return parse_vtk(foam::read_text_file(path), path); }

std::string format_vtk(const VtkGrid& grid) {
  std::ostringstream os;
  os << "# vtk DataFile Version 3.0\nfvgraph\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << grid.points.size() << " double\n";
  for (const auto& p : grid.points) {
    os << format_number(p.x) << ' ' << format_number(p.y) << ' ' << format_number(p.z) << '\n';
  }
  std::size_t total = 0;
  for (const auto& c : grid.cells) total += c.vertices.size() + 1;
  os << "CELLS " << grid.cells.size() << ' ' << total << '\n';
  for (const auto& c : grid.cells) {
    os << c.vertices.size();
    for (auto v : c.vertices) os << ' ' << v;
    os << '\n';
  }
  os << "CELL_TYPES " << grid.cells.size() << '\n';
  for (const auto& c : grid.cells) os << static_cast<int>(c.type) << '\n';
  if (!grid.cell_scalars.empty() || !grid.cell_vectors.empty()) {
    os << "CELL_DATA " << grid.cells.size() << '\n';
    for (const auto& [name, v] : grid.cell_scalars) {
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double x : v) os << format_number(x) << '\n';
    }
    for (const auto& [name, v] : grid.cell_vectors) {
      os << "VECTORS " << name << " double\n";
      for (const auto& x : v) os << format_number(x.x) << ' ' << format_number(x.y) << ' ' << format_number(x.z) << '\n';
    }
  }
  return os.str();
}

void write_vtk(const std::string& path, const VtkGrid& grid) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << format_vtk(grid);
}

RawMesh to_raw_mesh(const VtkGrid& grid) {
  return build_from_cells(grid.points, grid.cells, {{"boundary", "patch"}},
                          [](const Vec3&, const Vec3&) { return std::size_t{0}; });
}

VtkGrid from_raw_mesh(const RawMesh& mesh) {
  VtkGrid grid;
  grid.points = mesh.points;
  grid.cells = cell_shapes(mesh);
  return grid;
}

}  // namespace fvg::meshio
