#include "fvgraph/ad/ops.hpp"

#include <cmath>
#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::ad {

namespace {

std::size_t broadcast_size(const Var& a, const Var& b, const char* op) {
  const auto na = a.size(), nb = b.size();
  if (na == nb || nb == 1) return na;
  if (na == 1) return nb;
  fail(ErrorCode::ShapeError, std::string(op) + ": sizes " + std::to_string(na) + " and " + std::to_string(nb));
}

inline double at(const Vector& v, std::size_t i) { return v.size() == 1 ? v[0] : v[i]; }

/// Accumulates into a possibly broadcast input.
void acc(Tape& t, const Var& v, std::size_t i, double g) {
  if (v.size() == 1) t.accumulate_at(v, 0, g);
  else t.accumulate_at(v, i, g);
}

template <class F, class DA, class DB>
Var binary(const char* op, const Var& a, const Var& b, F f, DA da, DB db) {
  const auto n = broadcast_size(a, b, op);
  const Vector& x = a.value();
  const Vector& y = b.value();
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(at(x, i), at(y, i));
  return a.tape().record(op, std::move(out), {a, b}, [a, b, da, db](Tape& t, const Vector& g) {
    const Vector& x = a.value();
    const Vector& y = b.value();
    const bool ga = a.requires_grad(), gb = b.requires_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (ga) acc(t, a, i, g[i] * da(at(x, i), at(y, i)));
      if (gb) acc(t, b, i, g[i] * db(at(x, i), at(y, i)));
    }
  });
}

template <class F, class D>
Var unary(const char* op, const Var& a, F f, D df) {
  const Vector& x = a.value();
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  return a.tape().record(op, std::move(out), {a}, [a, df](Tape& t, const Vector& g) {
    const Vector& x = a.value();
    Vector& ga = t.adjoint_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * df(x[i]);
  });
}

}  // namespace

Var add(const Var& a, const Var& b) {
  return binary("add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
                [](double, double) { return 1.0; });
}

Var sub(const Var& a, const Var& b) {
  return binary("sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
                [](double, double) { return -1.0; });
}

Var mul(const Var& a, const Var& b) {
  return binary("mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
                [](double x, double) { return x; });
}

Var div(const Var& a, const Var& b) {
  return binary("div", a, b, [](double x, double y) { return x / y; }, [](double, double y) { return 1.0 / y; },
                [](double x, double y) { return -x / (y * y); });
}

Var neg(const Var& a) { return scale(a, -1.0); }

Var scale(const Var& a, double c) {
  return unary("scale", a, [c](double x) { return c * x; }, [c](double) { return c; });
}

Var add_const(const Var& a, double c) {
  return unary("add_const", a, [c](double x) { return x + c; }, [](double) { return 1.0; });
}

Var mul_const(const Var& a, std::span<const double> c) {
  const Vector& x = a.value();
  if (c.size() != x.size()) fail(ErrorCode::ShapeError, "mul_const: size mismatch");
  Vector coef(c.begin(), c.end());
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = coef[i] * x[i];
  return a.tape().record("mul_const", std::move(out), {a}, [a, coef = std::move(coef)](Tape& t, const Vector& g) {
    Vector& ga = t.adjoint_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += coef[i] * g[i];
  });
}

Var add_vec_const(const Var& a, std::span<const double> c) {
  const Vector& x = a.value();
  if (c.size() != x.size()) fail(ErrorCode::ShapeError, "add_vec_const: size mismatch");
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + c[i];
  return a.tape().record("add_vec_const", std::move(out), {a}, [a](Tape& t, const Vector& g) { t.accumulate(a, g); });
}

Var exp(const Var& a) {
  return unary("exp", a, [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); });
}

Var log(const Var& a) {
  return unary("log", a, [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; });
}

Var square(const Var& a) {
  return unary("square", a, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
}

Var reciprocal(const Var& a) {
  return unary("reciprocal", a, [](double x) { return 1.0 / x; }, [](double x) { return -1.0 / (x * x); });
}

Var relu(const Var& a) {
  return unary("relu", a, [](double x) { return x >= 0.0 ? x : 0.0; }, [](double x) { return x >= 0.0 ? 1.0 : 0.0; });
}

Var sum(const Var& a) {
  double s = 0.0;
  for (double x : a.value()) s += x;
  return a.tape().record("sum", Vector{s}, {a}, [a](Tape& t, const Vector& g) {
    Vector& ga = t.adjoint_ref(a);
    for (double& x : ga) x += g[0];
  });
}

Var dot(const Var& a, const Var& b) {
  if (a.size() != b.size()) fail(ErrorCode::ShapeError, "dot: size mismatch");
  const Vector& x = a.value();
  const Vector& y = b.value();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return a.tape().record("dot", Vector{s}, {a, b}, [a, b](Tape& t, const Vector& g) {
    const Vector& x = a.value();
    const Vector& y = b.value();
    if (a.requires_grad()) {
      Vector& ga = t.adjoint_ref(a);
      for (std::size_t i = 0; i < x.size(); ++i) ga[i] += g[0] * y[i];
    }
    if (b.requires_grad()) {
      Vector& gb = t.adjoint_ref(b);
      for (std::size_t i = 0; i < x.size(); ++i) gb[i] += g[0] * x[i];
    }
  });
}

Var weighted_sum(const Var& a, std::span<const double> w) {
  if (w.size() != a.size()) fail(ErrorCode::ShapeError, "weighted_sum: size mismatch");
  Vector wv(w.begin(), w.end());
  double s = 0.0;
  for (std::size_t i = 0; i < wv.size(); ++i) s += wv[i] * a.value()[i];
  return a.tape().record("weighted_sum", Vector{s}, {a}, [a, wv = std::move(wv)](Tape& t, const Vector& g) {
    Vector& ga = t.adjoint_ref(a);
    for (std::size_t i = 0; i < wv.size(); ++i) ga[i] += g[0] * wv[i];
  });
}

Var broadcast(const Var& s, std::size_t n) {
  if (s.size() != 1) fail(ErrorCode::ShapeError, "broadcast needs a scalar");
  return s.tape().record("broadcast", Vector(n, s.value()[0]), {s}, [s](Tape& t, const Vector& g) {
    double total = 0.0;
    for (double x : g) total += x;
    t.accumulate_at(s, 0, total);
  });
}

Var gather(const Var& a, std::span<const std::size_t> index) {
  std::vector<std::size_t> idx(index.begin(), index.end());
  const Vector& x = a.value();
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= x.size()) fail(ErrorCode::ShapeError, "gather: index out of range");
    out[i] = x[idx[i]];
  }
  return a.tape().record("gather", std::move(out), {a}, [a, idx = std::move(idx)](Tape& t, const Vector& g) {
    Vector& ga = t.adjoint_ref(a);
    for (std::size_t i = 0; i < idx.size(); ++i) ga[idx[i]] += g[i];
  });
}

Var scatter_add(const Var& a, std::span<const std::size_t> index, std::size_t n) {
  if (index.size() != a.size()) fail(ErrorCode::ShapeError, "scatter_add: size mismatch");
  std::vector<std::size_t> idx(index.begin(), index.end());
  const Vector& x = a.value();
  Vector out(n, 0.0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= n) fail(ErrorCode::ShapeError, "scatter_add: index out of range");
    out[idx[i]] += x[i];
  }
  return a.tape().record("scatter_add", std::move(out), {a}, [a, idx = std::move(idx)](Tape& t, const Vector& g) {
    Vector& ga = t.adjoint_ref(a);
    for (std::size_t i = 0; i < idx.size(); ++i) ga[i] += g[idx[i]];
  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) fail(ErrorCode::ShapeError, "concat of nothing");
  Vector out;
  std::vector<Var> ins(parts.begin(), parts.end());
  for (const auto& p : ins) out.insert(out.end(), p.value().begin(), p.value().end());
  return ins[0].tape().record("concat", std::move(out), parts, [ins](Tape& t, const Vector& g) {
    std::size_t off = 0;
    for (const auto& p : ins) {
      const auto n = p.size();
      t.accumulate(p, std::span<const double>(g.data() + off, n));
      off += n;
    }
  });
}

Var slice(const Var& a, std::size_t start, std::size_t count) {
  if (start + count > a.size()) fail(ErrorCode::ShapeError, "slice out of range");
  Vector out(a.value().begin() + static_cast<std::ptrdiff_t>(start),
             a.value().begin() + static_cast<std::ptrdiff_t>(start + count));
  return a.tape().record("slice", std::move(out), {a}, [a, start](Tape& t, const Vector& g) {
    Vector& ga = t.adjoint_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[start + i] += g[i];
  });
}

Var strided(const Var& a, std::size_t offset, std::size_t stride) {
  const Vector& x = a.value();
  Vector out;
  for (std::size_t i = offset; i < x.size(); i += stride) out.push_back(x[i]);
  return a.tape().record("strided", std::move(out), {a}, [a, offset, stride](Tape& t, const Vector& g) {
    Vector& ga = t.adjoint_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[offset + i * stride] += g[i];
  });
}

std::vector<std::string_view> registered_ops() {
  return {"add", "sub", "mul", "div", "scale", "add_const", "mul_const", "add_vec_const", "exp", "log", "square",
          "reciprocal", "relu", "sum", "dot", "weighted_sum", "broadcast", "gather", "scatter_add", "concat", "slice",
          "strided",
          // fvops
          "interpolate", "green_gauss_gradient", "face_flux", "boundary_face_flux", "convection_correction",
          "nonorth_flux", "boundary_nonorth_flux", "face_sum", "boundary_values",
          // linalg
          "sparse_solve", "matvec", "offdiag_matvec",
          // bc
          "windkessel_step"};
}

}  // namespace fvg::ad
