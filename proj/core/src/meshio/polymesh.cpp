#include "fvgraph/meshio/polymesh.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "fvgraph/common/error.hpp"
#include "fvgraph/meshio/foam_dict.hpp"

namespace fvg::meshio {

namespace fs = std::filesystem;
using foam::Token;
using foam::TokenCursor;

namespace {

fs::path polymesh_dir(const std::string& case_dir) {
  fs::path p(case_dir);
  if (fs::exists(p / "constant" / "polyMesh")) return p / "constant" / "polyMesh";
  if (fs::exists(p / "points") || fs::exists(p / "faces")) return p;
  return p / "constant" / "polyMesh";
}

template <class Fn>
void read_list(TokenCursor& cur, Fn&& item) {
  const long long n = cur.integer();
  if (n < 0) cur.error("negative list size");
  cur.expect('(');
  for (long long i = 0; i < n; ++i) item(static_cast<std::size_t>(i));
  cur.expect(')');
}

std::vector<Vec3> read_points(const fs::path& path) {
  const auto file = foam::read_foam_file(path.string());
  TokenCursor cur(file.body, file.source);
  std::vector<Vec3> pts;
  read_list(cur, [&](std::size_t) { pts.push_back(cur.vec3()); });
  return pts;
}

std::vector<std::vector<std::size_t>> read_faces(const fs::path& path) {
  const auto file = foam::read_foam_file(path.string());
  TokenCursor cur(file.body, file.source);
  std::vector<std::vector<std::size_t>> faces;
  read_list(cur, [&](std::size_t) {
    std::vector<std::size_t> face;
    read_list(cur, [&](std::size_t) {
      const long long v = cur.integer();
      if (v < 0) cur.error("negative vertex index");
      face.push_back(static_cast<std::size_t>(v));
    });
    faces.push_back(std::move(face));
  });
  return faces;
}

std::vector<std::size_t> read_labels(const fs::path& path) {
  const auto file = foam::read_foam_file(path.string());
  TokenCursor cur(file.body, file.source);
  std::vector<std::size_t> out;
  read_list(cur, [&](std::size_t) {
    const long long v = cur.integer();
    if (v < 0) cur.error("negative cell label");
    out.push_back(static_cast<std::size_t>(v));
  });
  return out;
}

std::vector<Patch> read_boundary(const fs::path& path) {
  const auto file = foam::read_foam_file(path.string());
  TokenCursor cur(file.body, file.source);
  std::vector<Patch> patches;
  const long long n = cur.integer();
  cur.expect('(');
  for (long long i = 0; i < n; ++i) {
    Patch p;
    p.name = cur.word();
    cur.expect('{');
    std::size_t pos = cur.pos();
    const foam::Dict d = foam::parse_dict(file.body, pos, file.source, true);
    cur = TokenCursor(file.body, file.source, pos);
    p.type = d.word_or("type", "patch");
    p.size = static_cast<std::size_t>(d.label("nFaces"));
    p.start = static_cast<std::size_t>(d.label("startFace"));
    patches.push_back(std::move(p));
  }
  cur.expect(')');
  return patches;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string foam_header(const std::string& cls, const std::string& object, const std::string& location) {
  std::ostringstream os;
  os << "FoamFile\n{\n    version     2.0;\n    format      ascii;\n    class       " << cls << ";\n";
  if (!location.empty()) os << "    location    \"" << location << "\";\n";
  os << "    object      " << object << ";\n}\n\n";
  return os.str();
}

RawMesh read_polymesh(const std::string& case_dir) {
  const fs::path dir = polymesh_dir(case_dir);
  std::vector<std::string> missing;
  for (const char* name : {"points", "faces", "owner", "neighbour", "boundary"}) {
    if (!fs::is_regular_file(dir / name)) missing.emplace_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    fail(ErrorCode::MissingMeshFile, "missing in " + dir.string() + ": " + list);
  }
  RawMesh mesh;
  mesh.points = read_points(dir / "points");
  mesh.faces = read_faces(dir / "faces");
  mesh.owner = read_labels(dir / "owner");
  mesh.neighbour = read_labels(dir / "neighbour");
  mesh.patches = read_boundary(dir / "boundary");
  std::size_t max_cell = 0;
  bool any = false;
  for (auto o : mesh.owner) { max_cell = std::max(max_cell, o); any = true; }
  for (auto n : mesh.neighbour) { max_cell = std::max(max_cell, n); any = true; }
  mesh.n_cells = any ? max_cell + 1 : 0;
  validate(mesh);
  return mesh;
}

void write_polymesh(const std::string& case_dir, const RawMesh& mesh) {
  const fs::path dir = fs::path(case_dir) / "constant" / "polyMesh";
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) fail(ErrorCode::Io, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("points");
    out << foam_header("vectorField", "points", "constant/polyMesh");
    out << mesh.points.size() << "\n(\n";
    for (const auto& p : mesh.points) {
      out << '(' << format_number(p.x) << ' ' << format_number(p.y) << ' ' << format_number(p.z) << ")\n";
    }
    out << ")\n";
  }
  {
    auto out = open("faces");
    out << foam_header("faceList", "faces", "constant/polyMesh");
    out << mesh.faces.size() << "\n(\n";
    for (const auto& f : mesh.faces) {
      out << f.size() << '(';
      for (std::size_t i = 0; i < f.size(); ++i) out << (i ? " " : "") << f[i];
      out << ")\n";
    }
    out << ")\n";
  }
  const std::string note = "nPoints:" + std::to_string(mesh.points.size()) + " nCells:" + std::to_string(mesh.n_cells) +
                           " nFaces:" + std::to_string(mesh.faces.size()) +
                           " nInternalFaces:" + std::to_string(mesh.neighbour.size());
  auto write_labels = [&](const char* name, const std::vector<std::size_t>& labels) {
    auto out = open(name);
    std::string header = foam_header("labelList", name, "constant/polyMesh");
    header.insert(header.find("    object"), "    note        \"" + note + "\";\n");
    out << header << labels.size() << "\n(\n";
    for (auto l : labels) out << l << '\n';
    out << ")\n";
  };
  write_labels("owner", mesh.owner);
  write_labels("neighbour", mesh.neighbour);
  {
    auto out = open("boundary");
    out << foam_header("polyBoundaryMesh", "boundary", "constant/polyMesh");
    out << mesh.patches.size() << "\n(\n";
    for (const auto& p : mesh.patches) {
      out << "    " << p.name << "\n    {\n        type            " << p.type << ";\n";
      if (p.type == "wall") out << "        inGroups        List<word> 1(wall);\n";
      out << "        nFaces          " << p.size << ";\n        startFace       " << p.start << ";\n    }\n";
    }
    out << ")\n";
  }
}

}  // namespace fvg::meshio
