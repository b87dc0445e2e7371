#include "fvgraph/meshio/raw_mesh.hpp"

#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::meshio {

const Patch* RawMesh::find_patch(const std::string& name) const {
  for (const auto& p : patches) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void validate(const RawMesh& mesh) {
  const auto nf = mesh.faces.size();
  const auto ni = mesh.neighbour.size();
  if (mesh.owner.size() != nf) {
    fail(ErrorCode::MeshConsistency, "owner list has " + std::to_string(mesh.owner.size()) +
                                         " entries but there are " + std::to_string(nf) + " faces");
  }
  if (ni > nf) {
    fail(ErrorCode::MeshConsistency, "neighbour list longer than face list");
  }
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& face = mesh.faces[f];
    if (face.size() < 3) {
      fail(ErrorCode::MeshConsistency, "face " + std::to_string(f) + " has fewer than 3 vertices");
    }
    for (auto v : face) {
      if (v >= mesh.points.size()) {
        fail(ErrorCode::MeshConsistency,
             "face " + std::to_string(f) + " references vertex " + std::to_string(v) + " out of range");
      }
    }
    if (mesh.owner[f] >= mesh.n_cells) {
      fail(ErrorCode::MeshConsistency, "face " + std::to_string(f) + " owner out of range");
    }
  }
  for (std::size_t f = 0; f < ni; ++f) {
    if (mesh.neighbour[f] >= mesh.n_cells) {
      fail(ErrorCode::MeshConsistency, "face " + std::to_string(f) + " neighbour out of range");
    }
    if (mesh.owner[f] >= mesh.neighbour[f]) {
      fail(ErrorCode::MeshConsistency,
           "internal face " + std::to_string(f) + " violates owner < neighbour");
    }
  }
  std::size_t expect = ni;
  for (const auto& p : mesh.patches) {
    if (p.start != expect) {
      fail(ErrorCode::MeshConsistency, "patch '" + p.name + "' starts at face " + std::to_string(p.start) +
                                           ", expected " + std::to_string(expect));
    }
    expect += p.size;
  }
  if (expect != nf) {
    fail(ErrorCode::MeshConsistency,
         "patches cover faces up to " + std::to_string(expect) + " but mesh has " + std::to_string(nf));
  }
  std::vector<std::size_t> count(mesh.n_cells, 0);
  for (auto o : mesh.owner) ++count[o];
  for (auto n : mesh.neighbour) ++count[n];
  for (std::size_t c = 0; c < mesh.n_cells; ++c) {
    if (count[c] < 4) {
      fail(ErrorCode::MeshConsistency, "cell " + std::to_string(c) + " has only " +
                                           std::to_string(count[c]) + " faces");
    }
  }
}

}  // namespace fvg::meshio
