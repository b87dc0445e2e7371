#include "fvgraph/graph/primitives.hpp"

namespace fvg::graph {

std::vector<double> gather(std::span<const double> src, std::span<const std::size_t> index) {
  std::vector<double> out(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) out[i] = src[index[i]];
  return out;
}

void scatter_add(std::span<const double> values, std::span<const std::size_t> index, std::span<double> out) {
  for (std::size_t i = 0; i < index.size(); ++i) out[index[i]] += values[i];
}

std::vector<double> segment_sum(std::span<const double> values, const Segments& seg) {
  const std::size_t n = seg.offsets.size() - 1;
  std::vector<double> out(n, 0.0);
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t t = b; t < e; ++t) {
      double s = 0.0;
      for (std::size_t k = seg.offsets[t]; k < seg.offsets[t + 1]; ++k) s += values[seg.items[k]];
      out[t] = s;
    }
  });
  return out;
}

std::vector<double> assemble_residual(const MeshGraph& g, std::span<const double> edge_msg,
                                      std::span<const double> boundary_msg) {
  std::vector<double> out(g.n_cells, 0.0);
  parallel_for(g.n_cells, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      double s = 0.0;
      for (std::size_t k = g.by_owner.offsets[c]; k < g.by_owner.offsets[c + 1]; ++k) s += edge_msg[g.by_owner.items[k]];
      for (std::size_t k = g.by_neighbour.offsets[c]; k < g.by_neighbour.offsets[c + 1]; ++k) {
        s -= edge_msg[g.by_neighbour.items[k]];
      }
      if (!boundary_msg.empty()) {
        for (std::size_t k = g.by_bcell.offsets[c]; k < g.by_bcell.offsets[c + 1]; ++k) {
          s += boundary_msg[g.by_bcell.items[k]];
        }
      }
      out[c] = s;
    }
  });
  return out;
}

void check_finite(std::span<const double> v, const std::string& what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      fail(ErrorCode::NumericalBlowup, what + ": non-finite value at index " + std::to_string(i));
    }
  }
}

}  // namespace fvg::graph
