#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace fvg::ad {

using Vector = std::vector<double>;

class Tape;

/// Handle to a value on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }
  const Vector& value() const;
  std::size_t size() const { return value().size(); }
  double operator[](std::size_t i) const { return value()[i]; }
  bool requires_grad() const;

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Append-only record of coarse vector operations. When not recording, ops
/// evaluate eagerly and store no pullbacks.
class Tape {
 public:
  using Pullback = std::function<void(Tape&, const Vector& out_adjoint)>;

  explicit Tape(bool recording = true) : recording_(recording) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }
  std::size_t size() const { return nodes_.size(); }

  /// Differentiable input.
  Var leaf(Vector value);
  /// Input that never receives a gradient.
  Var constant(Vector value);
  Var scalar_constant(double v) { return constant(Vector{v}); }

  /// Appends an op result. The pullback is kept only if recording and some input needs a gradient.
  Var record(std::string_view op, Vector value, std::span<const Var> inputs, Pullback pullback);
  Var record(std::string_view op, Vector value, std::initializer_list<Var> inputs, Pullback pullback) {
    return record(op, std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(pullback));
  }
  /// For ops without a VJP: throws NonDifferentiableOp if any input needs a gradient while recording.
  Var record_nondiff(std::string_view op, Vector value, std::span<const Var> inputs);

  const Vector& value(const Var& v) const { return nodes_[v.id()].value; }
  bool requires_grad(const Var& v) const { return nodes_[v.id()].requires_grad; }

  /// Adds `adj` into the adjoint of v (no-op for constants).
  void accumulate(const Var& v, std::span<const double> adj);
  void accumulate_at(const Var& v, std::size_t i, double adj);
  /// Mutable adjoint storage, zero-initialised on first use.
  Vector& adjoint_ref(const Var& v);
  /// Copy of the adjoint (zeros when untouched).
  Vector gradient(const Var& v) const;

  /// Reverse sweep over all recorded nodes, last to first.
  void backward();
  /// Seeds a size-1 output with 1 and runs the reverse sweep.
  void backward(const Var& scalar_output);
  void zero_adjoints();

 private:
  struct Node {
    Vector value;
    Vector adjoint;
    Pullback pullback;
    std::string_view op;
    bool requires_grad = false;
    bool has_adjoint = false;
  };
  std::deque<Node> nodes_;
  bool recording_;
};

}  // namespace fvg::ad
