#include "fvgraph/inverse/observation.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "fvgraph/ad/ops.hpp"
#include "fvgraph/common/error.hpp"

namespace fvg::inverse {

Var observe_probes(const graph::MeshGraph& g, const solvers::FlowVars& s, std::span<const std::size_t> cells) {
  for (std::size_t c : cells) {
    if (c >= g.n_cells) {
      fail(ErrorCode::InvalidProbe, "probe cell " + std::to_string(c) + " outside mesh of " +
                                        std::to_string(g.n_cells) + " cells");
    }
  }
  const std::vector<Var> parts{ad::gather(s.ux, cells), ad::gather(s.uy, cells), ad::gather(s.uz, cells)};
  return ad::concat(parts);
}

Var area_average(const graph::MeshGraph& g, const Var& cell_field, const std::string& patch, double scale) {
  const auto& p = g.patch(patch);
  if (p.size == 0) fail(ErrorCode::InvalidProbe, "patch '" + patch + "' has no faces");
  std::vector<std::size_t> cells(p.size);
  Vector w(p.size);
  double area = 0.0;
  for (std::size_t i = 0; i < p.size; ++i) {
    cells[i] = g.bcell[p.start + i];
    w[i] = norm(g.bsf[p.start + i]);
    area += w[i];
  }
  for (double& x : w) x *= scale / area;
  return ad::weighted_sum(ad::gather(cell_field, cells), w);
}

Var patch_flow(const graph::MeshGraph& g, const Var& mdot_b, const std::string& patch) {
  const auto& p = g.patch(patch);
  return ad::sum(ad::slice(mdot_b, p.start, p.size));
}

Vector time_average_weights(std::span<const double> t) {
  if (t.size() < 2) fail(ErrorCode::ShapeError, "time average needs at least two samples");
  const double span = t.back() - t.front();
  if (!(span > 0.0)) fail(ErrorCode::ShapeError, "time average needs increasing sample times");
  Vector w(t.size(), 0.0);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double h = 0.5 * (t[k + 1] - t[k]) / span;
    w[k] += h;
    w[k + 1] += h;
  }
  return w;
}

double time_average(std::span<const double> t, std::span<const double> q) {
  if (t.size() != q.size()) fail(ErrorCode::ShapeError, "time average: sample and value counts differ");
  const Vector w = time_average_weights(t);
  return std::inner_product(w.begin(), w.end(), q.begin(), 0.0);
}

std::vector<std::size_t> random_probes(std::size_t n_cells, std::size_t count, std::uint64_t seed) {
  if (count > n_cells) fail(ErrorCode::InvalidProbe, "more probes than cells");
  std::vector<std::size_t> all(n_cells);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates with an explicit draw keeps the sequence identical across standard libraries.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n_cells - i));
    std::swap(all[i], all[j]);
  }
  std::vector<std::size_t> out(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fvg::inverse
