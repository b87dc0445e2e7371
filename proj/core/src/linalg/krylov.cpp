#include "fvgraph/linalg/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>

#include "fvgraph/common/error.hpp"

namespace fvg::linalg {

namespace {

using Vec = std::vector<double>;

double dotp(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dotp(a, a)); }

double norm1(std::span<const double> a) {
  double s = 0.0;
  for (double x : a) s += std::abs(x);
  return s;
}

class Operator {
 public:
  Operator(const CsrMatrix& a, bool transpose) : a_(a), transpose_(transpose) {}
  void apply(std::span<const double> x, std::span<double> y) const {
    if (!transpose_) {
      a_.multiply(x, y);
      return;
    }
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < a_.n; ++i) {
      for (std::size_t p = a_.row_ptr[i]; p < a_.row_ptr[i + 1]; ++p) y[a_.col[p]] += a_.val[p] * x[i];
    }
  }

 private:
  const CsrMatrix& a_;
  bool transpose_;
};

class Precond {
 public:
  Precond(const Ilu0* ilu, bool transpose) : ilu_(ilu), transpose_(transpose) {}
  void apply(std::span<const double> r, std::span<double> z) const {
    if (!ilu_) {
      std::copy(r.begin(), r.end(), z.begin());
    } else if (transpose_) {
      ilu_->apply_transpose(r, z);
    } else {
      ilu_->apply(r, z);
    }
  }

 private:
  const Ilu0* ilu_;
  bool transpose_;
};

struct Criterion {
  double bnorm;
  double tol2;
  double tol1;
  bool met(std::span<const double> r) const { return norm2(r) <= tol2 && norm1(r) <= tol1; }
  void fill(SolveReport& rep, std::span<const double> r) const {
    rep.residual = bnorm > 0.0 ? norm2(r) / bnorm : norm2(r);
    rep.abs_residual = norm1(r);
  }
};

class Best {
 public:
  void offer(std::span<const double> x, std::span<const double> r) {
    const double v = norm2(r);
    if (v < best_) {
      best_ = v;
      x_.assign(x.begin(), x.end());
    }
  }
  bool has() const { return !x_.empty(); }
  const Vec& x() const { return x_; }

 private:
  double best_ = INFINITY;
  Vec x_;
};

void true_residual(const Operator& a, std::span<const double> b, std::span<const double> x, Vec& r) {
  a.apply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

void finish_unconverged(SolveResult& res, const Operator& a, std::span<const double> b, const Criterion& c,
                        const Best& best) {
  if (best.has()) res.x = best.x();
  Vec r(res.x.size());
  true_residual(a, b, res.x, r);
  c.fill(res.report, r);
  res.report.converged = false;
}

void run_cg(const Operator& a, const Precond& m, std::span<const double> b, const SolverSettings& s,
            const Criterion& c, SolveResult& res) {
  Vec& x = res.x;
  const std::size_t n = x.size();
  Vec r(n), z(n), p(n), q(n);
  true_residual(a, b, x, r);
  Best best;
  best.offer(x, r);
  if (c.met(r)) { res.report.converged = true; c.fill(res.report, r); return; }
  m.apply(r, z);
  p = z;
  double rz = dotp(r, z);
  for (int k = 1; k <= s.max_iter; ++k) {
    res.report.iterations = k;
    a.apply(p, q);
    const double pq = dotp(p, q);
    if (!(pq > 0.0) || !std::isfinite(pq)) {
      fail(ErrorCode::SolverBreakdown, "CG breakdown: matrix is not positive definite (p.Ap = " + std::to_string(pq) + ")");
    }
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (c.met(r)) {
      true_residual(a, b, x, r);
      if (c.met(r)) { res.report.converged = true; c.fill(res.report, r); return; }
    }
    best.offer(x, r);
    m.apply(r, z);
    const double rz_new = dotp(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  finish_unconverged(res, a, b, c, best);
}

void run_bicgstab(const Operator& a, const Precond& m, std::span<const double> b, const SolverSettings& s,
                  const Criterion& c, SolveResult& res) {
  Vec& x = res.x;
  const std::size_t n = x.size();
  Vec r(n), rhat(n), p(n, 0.0), v(n, 0.0), phat(n), sv(n), shat(n), t(n);
  true_residual(a, b, x, r);
  Best best;
  best.offer(x, r);
  if (c.met(r)) { res.report.converged = true; c.fill(res.report, r); return; }
  rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  int restarts = 0;
  for (int k = 1; k <= s.max_iter; ++k) {
    res.report.iterations = k;
    const double rho_new = dotp(rhat, r);
    if (rho_new == 0.0 || !std::isfinite(rho_new)) {
      if (++restarts > 3) fail(ErrorCode::SolverBreakdown, "BiCGStab breakdown (rho = 0)");
      true_residual(a, b, x, r);
      rhat = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
      continue;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    m.apply(p, phat);
    a.apply(phat, v);
    const double rv = dotp(rhat, v);
    if (rv == 0.0 || !std::isfinite(rv)) fail(ErrorCode::SolverBreakdown, "BiCGStab breakdown (rhat.v = 0)");
    alpha = rho / rv;
    for (std::size_t i = 0; i < n; ++i) sv[i] = r[i] - alpha * v[i];
    if (c.met(sv)) {
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
      true_residual(a, b, x, r);
      if (c.met(r)) { res.report.converged = true; c.fill(res.report, r); return; }
      best.offer(x, r);
      continue;
    }
    m.apply(sv, shat);
    a.apply(shat, t);
    const double tt = dotp(t, t);
    omega = tt > 0.0 ? dotp(t, sv) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = sv[i] - omega * t[i];
    }
    if (c.met(r)) {
      true_residual(a, b, x, r);
      if (c.met(r)) { res.report.converged = true; c.fill(res.report, r); return; }
    }
    best.offer(x, r);
    if (omega == 0.0) {
      if (++restarts > 3) fail(ErrorCode::SolverBreakdown, "BiCGStab breakdown (omega = 0)");
      true_residual(a, b, x, r);
      rhat = r;
      std::fill(p.begin(), p.end(), 0.0);
      std::fill(v.begin(), v.end(), 0.0);
      rho = alpha = omega = 1.0;
    }
  }
  finish_unconverged(res, a, b, c, best);
}

void run_gmres(const Operator& a, const Precond& m, std::span<const double> b, const SolverSettings& s,
               const Criterion& c, SolveResult& res) {
  Vec& x = res.x;
  const std::size_t n = x.size();
  const int mr = std::max(1, s.restart);
  const double target = std::min(c.tol2, c.tol1 / std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1))));
  Vec r(n), w(n), z(n);
  Best best;
  int total = 0;
  while (true) {
    true_residual(a, b, x, r);
    best.offer(x, r);
    if (c.met(r)) { res.report.converged = true; c.fill(res.report, r); res.report.iterations = total; return; }
    if (total >= s.max_iter) break;
    const double beta = norm2(r);
    std::vector<Vec> v(1, Vec(n));
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    std::vector<Vec> h;
    Vec cs, sn, g{beta};
    int j = 0;
    for (; j < mr && total < s.max_iter; ++j) {
      ++total;
      m.apply(v[static_cast<std::size_t>(j)], z);
      a.apply(z, w);
      Vec hj(static_cast<std::size_t>(j) + 2, 0.0);
      for (int i = 0; i <= j; ++i) {
        hj[static_cast<std::size_t>(i)] = dotp(w, v[static_cast<std::size_t>(i)]);
        for (std::size_t k = 0; k < n; ++k) w[k] -= hj[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)][k];
      }
      const double wn = norm2(w);
      hj[static_cast<std::size_t>(j) + 1] = wn;
      for (int i = 0; i < j; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        const double t0 = cs[ii] * hj[ii] + sn[ii] * hj[ii + 1];
        hj[ii + 1] = -sn[ii] * hj[ii] + cs[ii] * hj[ii + 1];
        hj[ii] = t0;
      }
      const auto jj = static_cast<std::size_t>(j);
      const double den = std::hypot(hj[jj], hj[jj + 1]);
      if (den == 0.0) fail(ErrorCode::SolverBreakdown, "GMRES breakdown");
      cs.push_back(hj[jj] / den);
      sn.push_back(hj[jj + 1] / den);
      hj[jj] = den;
      hj[jj + 1] = 0.0;
      g.push_back(-sn[jj] * g[jj]);
      g[jj] = cs[jj] * g[jj];
      h.push_back(std::move(hj));
      if (wn > 0.0) {
        Vec next(n);
        for (std::size_t k = 0; k < n; ++k) next[k] = w[k] / wn;
        v.push_back(std::move(next));
      }
      if (std::abs(g[jj + 1]) <= target || wn == 0.0) { ++j; break; }
    }
    Vec y(static_cast<std::size_t>(j), 0.0);
    for (int i = j - 1; i >= 0; --i) {
      const auto ii = static_cast<std::size_t>(i);
      double sum = g[ii];
      for (int k = i + 1; k < j; ++k) sum -= h[static_cast<std::size_t>(k)][ii] * y[static_cast<std::size_t>(k)];
      y[ii] = sum / h[ii][ii];
    }
    Vec u(n, 0.0);
    for (int i = 0; i < j; ++i) {
      for (std::size_t k = 0; k < n; ++k) u[k] += y[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)][k];
    }
    m.apply(u, z);
    for (std::size_t k = 0; k < n; ++k) x[k] += z[k];
  }
  res.report.iterations = total;
  finish_unconverged(res, a, b, c, best);
}

}  // namespace

std::string SolveReport::summary() const {
  std::ostringstream os;
  os << to_string(method) << " iterations=" << iterations << " residual=" << residual << " abs_residual=" << abs_residual
     << (converged ? " converged" : " not converged");
  return os.str();
}

SolveResult krylov_solve(const CsrMatrix& a, std::span<const double> b, const SolverSettings& s,
                         std::span<const double> x0, const Ilu0* precond, bool transpose) {
  if (b.size() != a.n) fail(ErrorCode::ShapeError, "right-hand side size does not match matrix");
  SolveResult res;
  res.report.method = s.method;
  res.x.assign(a.n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), res.x.begin());
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(res.x.begin(), res.x.end(), 0.0);
    res.report.converged = true;
    return res;
  }
  std::optional<Ilu0> local;
  if (s.preconditioner == Preconditioner::ILU0 && !precond) {
    local.emplace(a);
    precond = &*local;
  }
  if (s.preconditioner == Preconditioner::None) precond = nullptr;
  const Operator op(a, transpose);
  const Precond pc(precond, transpose);
  const Criterion crit{bnorm, s.tol * bnorm, s.abs_tol};
  switch (s.method) {
    case KrylovMethod::CG: run_cg(op, pc, b, s, crit, res); break;
    case KrylovMethod::BiCGStab: run_bicgstab(op, pc, b, s, crit, res); break;
    case KrylovMethod::GMRES: run_gmres(op, pc, b, s, crit, res); break;
  }
  for (double v : res.x) {
    if (!std::isfinite(v)) fail(ErrorCode::NumericalBlowup, "linear solve produced a non-finite value");
  }
  return res;
}

Deflated deflate_nullspace(const CsrMatrix& a, std::span<const double> b, NullSpace mode, std::size_t pin_cell,
                           double ref) {
  Deflated d{a, std::vector<double>(b.begin(), b.end())};
  if (mode == NullSpace::None) return d;
  if (pin_cell >= a.n) fail(ErrorCode::InvalidConfig, "reference cell out of range");
  if (mode == NullSpace::ProjectMean) {
    double mean = 0.0;
    for (double v : d.b) mean += v;
    mean /= static_cast<double>(d.b.size());
    for (double& v : d.b) v -= mean;
    ref = 0.0;
  }
  const std::size_t r = pin_cell;
  double diag = d.a.val[d.a.diag_pos[r]];
  if (diag == 0.0) diag = 1.0;
  for (std::size_t p = d.a.row_ptr[r]; p < d.a.row_ptr[r + 1]; ++p) {
    const std::size_t j = d.a.col[p];
    if (j == r) continue;
    const std::size_t q = d.a.find(j, r);
    if (q != SIZE_MAX) {
      d.b[j] -= d.a.val[q] * ref;
      d.a.val[q] = 0.0;
    }
    d.a.val[p] = 0.0;
  }
  d.a.val[d.a.diag_pos[r]] = diag;
  d.b[r] = diag * ref;
  return d;
}

SolveResult solve_system(const CsrMatrix& a, std::span<const double> b, const SolverSettings& s, NullSpace mode,
                         std::size_t pin_cell, double ref, std::span<const double> x0) {
  if (mode == NullSpace::None) return krylov_solve(a, b, s, x0);
  const Deflated d = deflate_nullspace(a, b, mode, pin_cell, ref);
  SolveResult res = krylov_solve(d.a, d.b, s, x0);
  if (mode == NullSpace::ProjectMean) {
    double mean = 0.0;
    for (double v : res.x) mean += v;
    mean /= static_cast<double>(res.x.size());
    for (double& v : res.x) v -= mean;
  }
  return res;
}

void require_converged(const SolveReport& r, const std::string& what) {
  if (!r.converged) fail(ErrorCode::NotConverged, what + ": " + r.summary());
}

}  // namespace fvg::linalg
