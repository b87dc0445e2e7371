#include "fvgraph/meshio/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::meshio {

MeshGeometry compute_geometry(const RawMesh& mesh) {
  MeshGeometry g;
  const auto nf = mesh.faces.size();
  g.face_centroid.resize(nf);
  g.face_area_vector.resize(nf);
  g.face_area.resize(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& face = mesh.faces[f];
    const std::size_t nv = face.size();
    double max_edge2 = 0.0;
    for (std::size_t i = 0; i < nv; ++i) {
      const Vec3 e = mesh.points[face[(i + 1) % nv]] - mesh.points[face[i]];
      max_edge2 = std::max(max_edge2, dot(e, e));
    }
    Vec3 s, c;
    if (nv == 3) {
      const Vec3& a = mesh.points[face[0]];
      const Vec3& b = mesh.points[face[1]];
      const Vec3& d = mesh.points[face[2]];
      s = 0.5 * cross(b - a, d - a);
      c = (a + b + d) / 3.0;
    } else {
      Vec3 c0;
      for (auto v : face) c0 += mesh.points[v];
      c0 /= static_cast<double>(nv);
      Vec3 sum_c;
      double sum_w = 0.0;
      for (std::size_t i = 0; i < nv; ++i) {
        const Vec3& p = mesh.points[face[i]];
        const Vec3& q = mesh.points[face[(i + 1) % nv]];
        s += 0.5 * cross(p - c0, q - c0);
      }
      const double smag = norm(s);
      const Vec3 n = smag > 0.0 ? s / smag : Vec3{};
      for (std::size_t i = 0; i < nv; ++i) {
        const Vec3& p = mesh.points[face[i]];
        const Vec3& q = mesh.points[face[(i + 1) % nv]];
        const double w = dot(0.5 * cross(p - c0, q - c0), n);
        sum_c += w * (p + q + c0) / 3.0;
        sum_w += w;
      }
      c = sum_w > 0.0 ? sum_c / sum_w : c0;
    }
    const double area = norm(s);
    if (!(area > 1e-14 * max_edge2) || !std::isfinite(area)) {
      fail(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " has zero area");
    }
    g.face_area_vector[f] = s;
    g.face_centroid[f] = c;
    g.face_area[f] = area;
  }

  const auto nc = mesh.n_cells;
  std::vector<Vec3> estimate(nc);
  std::vector<double> nfaces(nc, 0.0);
  for (std::size_t f = 0; f < nf; ++f) {
    estimate[mesh.owner[f]] += g.face_centroid[f];
    nfaces[mesh.owner[f]] += 1.0;
  }
  for (std::size_t f = 0; f < mesh.neighbour.size(); ++f) {
    estimate[mesh.neighbour[f]] += g.face_centroid[f];
    nfaces[mesh.neighbour[f]] += 1.0;
  }
  for (std::size_t c = 0; c < nc; ++c) estimate[c] /= nfaces[c];

  std::vector<double> vol(nc, 0.0);
  std::vector<Vec3> moment(nc);
  auto add = [&](std::size_t cell, std::size_t f, double sign) {
    const Vec3 s = sign * g.face_area_vector[f];
    const double pv = dot(s, g.face_centroid[f] - estimate[cell]) / 3.0;
    vol[cell] += pv;
    moment[cell] += pv * (0.75 * g.face_centroid[f] + 0.25 * estimate[cell]);
  };
  for (std::size_t f = 0; f < nf; ++f) add(mesh.owner[f], f, 1.0);
  for (std::size_t f = 0; f < mesh.neighbour.size(); ++f) add(mesh.neighbour[f], f, -1.0);

  g.cell_volume.resize(nc);
  g.cell_centroid.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    if (!(vol[c] > 0.0)) {
      fail(ErrorCode::InvertedCell, "cell " + std::to_string(c) + " has non-positive volume " + std::to_string(vol[c]));
    }
    g.cell_volume[c] = vol[c];
    g.cell_centroid[c] = moment[c] / vol[c];
  }
  return g;
}

ClosednessReport closedness(const RawMesh& mesh, const MeshGeometry& geo) {
  const auto nc = mesh.n_cells;
  std::vector<Vec3> sum(nc);
  std::vector<double> area(nc, 0.0);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    sum[mesh.owner[f]] += geo.face_area_vector[f];
    area[mesh.owner[f]] += geo.face_area[f];
  }
  for (std::size_t f = 0; f < mesh.neighbour.size(); ++f) {
    sum[mesh.neighbour[f]] -= geo.face_area_vector[f];
    area[mesh.neighbour[f]] += geo.face_area[f];
  }
  ClosednessReport r;
  for (std::size_t c = 0; c < nc; ++c) {
    const double ratio = norm(sum[c]) / area[c];
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.worst_cell = c;
    }
  }
  return r;
}

}  // namespace fvg::meshio
