#include "fvgraph/ad/tape.hpp"

#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::ad {

const Vector& Var::value() const { return tape_->value(*this); }
bool Var::requires_grad() const { return tape_->requires_grad(*this); }

Var Tape::leaf(Vector value) {
  Node n;
  n.value = std::move(value);
  n.op = "leaf";
  n.requires_grad = recording_;
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Vector value) {
  Node n;
  n.value = std::move(value);
  n.op = "constant";
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(std::string_view op, Vector value, std::span<const Var> inputs, Pullback pullback) {
  Node n;
  n.value = std::move(value);
  n.op = op;
  if (recording_) {
    for (const auto& in : inputs) {
      if (&in.tape() != this) fail(ErrorCode::ShapeError, std::string(op) + ": input from another tape");
      if (nodes_[in.id()].requires_grad) {
        n.requires_grad = true;
        break;
      }
    }
    if (n.requires_grad) n.pullback = std::move(pullback);
  }
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record_nondiff(std::string_view op, Vector value, std::span<const Var> inputs) {
  if (recording_) {
    for (const auto& in : inputs) {
      if (nodes_[in.id()].requires_grad) {
        fail(ErrorCode::NonDifferentiableOp, "op '" + std::string(op) + "' has no registered VJP");
      }
    }
  }
  return record(op, std::move(value), inputs, nullptr);
}

Vector& Tape::adjoint_ref(const Var& v) {
  Node& n = nodes_[v.id()];
  if (!n.has_adjoint) {
    n.adjoint.assign(n.value.size(), 0.0);
    n.has_adjoint = true;
  }
  return n.adjoint;
}

void Tape::accumulate(const Var& v, std::span<const double> adj) {
  if (!nodes_[v.id()].requires_grad) return;
  Vector& a = adjoint_ref(v);
  if (adj.size() != a.size()) {
    fail(ErrorCode::ShapeError, "adjoint of size " + std::to_string(adj.size()) + " for value of size " +
                                    std::to_string(a.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += adj[i];
}

void Tape::accumulate_at(const Var& v, std::size_t i, double adj) {
  if (!nodes_[v.id()].requires_grad) return;
  adjoint_ref(v)[i] += adj;
}

Vector Tape::gradient(const Var& v) const {
  const Node& n = nodes_[v.id()];
  if (!n.has_adjoint) return Vector(n.value.size(), 0.0);
  return n.adjoint;
}

void Tape::backward() {
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& n = nodes_[i];
    if (n.pullback && n.has_adjoint) n.pullback(*this, n.adjoint);
  }
}

void Tape::backward(const Var& scalar_output) {
  if (scalar_output.size() != 1) fail(ErrorCode::ShapeError, "backward() needs a scalar output");
  accumulate(scalar_output, Vector{1.0});
  backward();
}

void Tape::zero_adjoints() {
  for (auto& n : nodes_) {
    n.adjoint.clear();
    n.has_adjoint = false;
  }
}

}  // namespace fvg::ad
