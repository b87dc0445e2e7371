#include "fvgraph/linalg/sparse.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::linalg {

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += val[p] * x[col[p]];
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(n);
  multiply(x, y);
  return y;
}

std::size_t CsrMatrix::find(std::size_t i, std::size_t j) const {
  const auto b = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto e = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  auto it = std::lower_bound(b, e, j);
  if (it != e && *it == j) return static_cast<std::size_t>(it - col.begin());
  return SIZE_MAX;
}

CsrMatrix CsrMatrix::transpose() const {
  std::vector<std::tuple<std::size_t, std::size_t, double>> t;
  t.reserve(val.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) t.emplace_back(col[p], i, val[p]);
  }
  return from_triplets(n, t);
}

CsrMatrix CsrMatrix::from_triplets(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& t) {
  std::vector<std::map<std::size_t, double>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i][i] += 0.0;
  for (const auto& [i, j, v] : t) {
    if (i >= n || j >= n) fail(ErrorCode::ShapeError, "triplet index out of range");
    rows[i][j] += v;
  }
  CsrMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  m.diag_pos.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, v] : rows[i]) {
      if (j == i) m.diag_pos[i] = m.col.size();
      m.col.push_back(j);
      m.val.push_back(v);
    }
    m.row_ptr[i + 1] = m.col.size();
  }
  return m;
}

GraphPattern GraphPattern::from_graph(const graph::MeshGraph& g) {
  GraphPattern p;
  p.owner = g.owner;
  p.neighbour = g.neighbour;
  const std::size_t n = g.n_cells;
  std::vector<std::vector<std::size_t>> cols(n);
  for (std::size_t i = 0; i < n; ++i) cols[i].push_back(i);
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    cols[g.owner[e]].push_back(g.neighbour[e]);
    cols[g.neighbour[e]].push_back(g.owner[e]);
  }
  CsrMatrix& s = p.structure;
  s.n = n;
  s.row_ptr.assign(n + 1, 0);
  s.diag_pos.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = cols[i];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (auto j : c) {
      if (j == i) s.diag_pos[i] = s.col.size();
      s.col.push_back(j);
    }
    s.row_ptr[i + 1] = s.col.size();
  }
  s.val.assign(s.col.size(), 0.0);
  p.upper_pos.resize(g.n_edges);
  p.lower_pos.resize(g.n_edges);
  for (std::size_t e = 0; e < g.n_edges; ++e) {
    p.upper_pos[e] = s.find(g.owner[e], g.neighbour[e]);
    p.lower_pos[e] = s.find(g.neighbour[e], g.owner[e]);
  }
  return p;
}

CsrMatrix GraphPattern::assemble(std::span<const double> diag, std::span<const double> upper,
                                 std::span<const double> lower) const {
  CsrMatrix m = structure;
  if (diag.size() != m.n || upper.size() != upper_pos.size() || lower.size() != lower_pos.size()) {
    fail(ErrorCode::ShapeError, "matrix coefficient arrays do not match the graph");
  }
  std::fill(m.val.begin(), m.val.end(), 0.0);
  for (std::size_t i = 0; i < m.n; ++i) {
    if (diag[i] == 0.0) fail(ErrorCode::SingularDiagonal, "zero diagonal at row " + std::to_string(i));
    m.val[m.diag_pos[i]] += diag[i];
  }
  for (std::size_t e = 0; e < upper_pos.size(); ++e) {
    m.val[upper_pos[e]] += upper[e];
    m.val[lower_pos[e]] += lower[e];
  }
  return m;
}

}  // namespace fvg::linalg
