#include "fvgraph/linalg/ad_solve.hpp"

#include <limits>
#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::linalg {

namespace {

using Vector = std::vector<double>;

Vector deflated_rhs(const LinearSystem& s, std::span<const double> b) {
  Vector r(b.begin(), b.end());
  if (s.null_space == NullSpace::None) return r;
  double ref = s.pin_value;
  if (s.null_space == NullSpace::ProjectMean) {
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    for (double& v : r) v -= mean;
    ref = 0.0;
  }
  for (const auto& [row, a] : s.pinned_column) r[row] -= a * ref;
  r[s.pin_cell] = s.matrix.val[s.matrix.diag_pos[s.pin_cell]] * ref;
  return r;
}

void subtract_mean(Vector& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

/// off-diagonal part: y_o += upper x_n, y_n += lower x_o, summed per cell in segment order
Vector offdiag_apply(const graph::MeshGraph& g, std::span<const double> upper, std::span<const double> lower,
                     std::span<const double> x) {
  Vector y(g.n_cells, 0.0);
  for (std::size_t c = 0; c < g.n_cells; ++c) {
    double s = 0.0;
    for (std::size_t k = g.by_owner.offsets[c]; k < g.by_owner.offsets[c + 1]; ++k) {
      const auto e = g.by_owner.items[k];
      s += upper[e] * x[g.neighbour[e]];
    }
    for (std::size_t k = g.by_neighbour.offsets[c]; k < g.by_neighbour.offsets[c + 1]; ++k) {
      const auto e = g.by_neighbour.items[k];
      s += lower[e] * x[g.owner[e]];
    }
    y[c] = s;
  }
  return y;
}

void offdiag_pullback(ad::Tape& t, const graph::MeshGraph& g, const Var& upper, const Var& lower, const Var& x,
                      const Vector& adj) {
  const Vector& xv = x.value();
  if (x.requires_grad()) {
    Vector& ax = t.adjoint_ref(x);
    const Vector& u = upper.value();
    const Vector& l = lower.value();
    for (std::size_t e = 0; e < g.n_edges; ++e) {
      ax[g.neighbour[e]] += u[e] * adj[g.owner[e]];
      ax[g.owner[e]] += l[e] * adj[g.neighbour[e]];
    }
  }
  if (upper.requires_grad()) {
    Vector& au = t.adjoint_ref(upper);
    for (std::size_t e = 0; e < g.n_edges; ++e) au[e] += adj[g.owner[e]] * xv[g.neighbour[e]];
  }
  if (lower.requires_grad()) {
    Vector& al = t.adjoint_ref(lower);
    for (std::size_t e = 0; e < g.n_edges; ++e) al[e] += adj[g.neighbour[e]] * xv[g.owner[e]];
  }
}

}  // namespace

std::shared_ptr<const LinearSystem> make_system(const GraphPattern& pattern, const Var& diag, const Var& upper,
                                                const Var& lower, const SolverSettings& s, NullSpace mode,
                                                std::size_t pin_cell, double pin_value) {
  auto sys = std::make_shared<LinearSystem>();
  sys->pattern = &pattern;
  sys->diag = diag;
  sys->upper = upper;
  sys->lower = lower;
  sys->settings = s;
  sys->null_space = mode;
  sys->pin_cell = pin_cell;
  sys->pin_value = pin_value;
  CsrMatrix a = pattern.assemble(diag.value(), upper.value(), lower.value());
  if (mode != NullSpace::None) {
    if (pin_cell >= a.n) fail(ErrorCode::InvalidConfig, "reference cell out of range");
    for (std::size_t p = a.row_ptr[pin_cell]; p < a.row_ptr[pin_cell + 1]; ++p) {
      const std::size_t j = a.col[p];
      if (j == pin_cell) continue;
      const std::size_t q = a.find(j, pin_cell);
      sys->pinned_column.emplace_back(j, a.val[q]);
    }
    const Deflated d = deflate_nullspace(a, Vector(a.n, 0.0), NullSpace::PinCell, pin_cell, 0.0);
    a = d.a;
  }
  sys->matrix = std::move(a);
  if (s.preconditioner == Preconditioner::ILU0) sys->ilu.emplace(sys->matrix);
  return sys;
}

Var sparse_solve(const std::shared_ptr<const LinearSystem>& sys, const Var& b, SolveReport* report,
                 std::span<const double> x0) {
  const LinearSystem& s = *sys;
  if (b.size() != s.matrix.n) fail(ErrorCode::ShapeError, "sparse_solve: rhs size does not match the matrix");
  const Vector rhs = deflated_rhs(s, b.value());
  SolveResult res = krylov_solve(s.matrix, rhs, s.settings, x0, s.ilu ? &*s.ilu : nullptr, false);
  if (report) *report = res.report;
  require_converged(res.report, "linear solve");
  // y is the solution of the eliminated system; x differs by a mean shift in ProjectMean mode
  Vector y = res.x;
  Vector x = res.x;
  if (s.null_space == NullSpace::ProjectMean) subtract_mean(x);
  ad::Tape& tape = b.tape();
  return tape.record(
      "sparse_solve", std::move(x), {b, s.diag, s.upper, s.lower},
      [sys, b, y = std::move(y)](ad::Tape& t, const Vector& adj) {
        const LinearSystem& s = *sys;
        Vector xbar = adj;
        if (s.null_space == NullSpace::ProjectMean) subtract_mean(xbar);
        if (s.null_space != NullSpace::None) xbar[s.pin_cell] = 0.0;
        SolverSettings as = s.settings;
        as.abs_tol = std::numeric_limits<double>::infinity();
        SolveResult r = krylov_solve(s.matrix, xbar, as, {}, s.ilu ? &*s.ilu : nullptr, true);
        require_converged(r.report, "adjoint linear solve");
        Vector& lam = r.x;
        if (s.null_space != NullSpace::None) lam[s.pin_cell] = 0.0;
        if (b.requires_grad()) {
          Vector bbar = lam;
          if (s.null_space == NullSpace::ProjectMean) subtract_mean(bbar);
          t.accumulate(b, bbar);
        }
        const GraphPattern& p = *s.pattern;
        if (s.diag.requires_grad()) {
          Vector& ad = t.adjoint_ref(s.diag);
          for (std::size_t i = 0; i < y.size(); ++i) ad[i] -= lam[i] * y[i];
        }
        if (s.upper.requires_grad()) {
          Vector& au = t.adjoint_ref(s.upper);
          for (std::size_t e = 0; e < p.owner.size(); ++e) au[e] -= lam[p.owner[e]] * y[p.neighbour[e]];
        }
        if (s.lower.requires_grad()) {
          Vector& al = t.adjoint_ref(s.lower);
          for (std::size_t e = 0; e < p.owner.size(); ++e) al[e] -= lam[p.neighbour[e]] * y[p.owner[e]];
        }
      });
}

Var matvec(const graph::MeshGraph& g, const Var& diag, const Var& upper, const Var& lower, const Var& x) {
  Vector y = offdiag_apply(g, upper.value(), lower.value(), x.value());
  const Vector& d = diag.value();
  const Vector& xv = x.value();
  for (std::size_t c = 0; c < g.n_cells; ++c) y[c] += d[c] * xv[c];
  const graph::MeshGraph* gp = &g;
  return x.tape().record("matvec", std::move(y), {diag, upper, lower, x},
                         [gp, diag, upper, lower, x](ad::Tape& t, const Vector& adj) {
                           offdiag_pullback(t, *gp, upper, lower, x, adj);
                           const Vector& xv = x.value();
                           if (x.requires_grad()) {
                             Vector& ax = t.adjoint_ref(x);
                             const Vector& d = diag.value();
                             for (std::size_t c = 0; c < xv.size(); ++c) ax[c] += d[c] * adj[c];
                           }
                           if (diag.requires_grad()) {
                             Vector& ad = t.adjoint_ref(diag);
                             for (std::size_t c = 0; c < xv.size(); ++c) ad[c] += xv[c] * adj[c];
                           }
                         });
}

Var offdiag_matvec(const graph::MeshGraph& g, const Var& upper, const Var& lower, const Var& x) {
  const graph::MeshGraph* gp = &g;
  return x.tape().record("offdiag_matvec", offdiag_apply(g, upper.value(), lower.value(), x.value()),
                         {upper, lower, x}, [gp, upper, lower, x](ad::Tape& t, const Vector& adj) {
                           offdiag_pullback(t, *gp, upper, lower, x, adj);
                         });
}

}  // namespace fvg::linalg
