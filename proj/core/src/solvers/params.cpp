#include "fvgraph/solvers/params.hpp"

#include "fvgraph/common/error.hpp"

namespace fvg::solvers {

void ParamSet::set(const std::string& name, const Var& v) {
  if (v.size() != 1) fail(ErrorCode::ShapeError, "parameter '" + name + "' must be a scalar");
  auto it = index_.find(name);
  if (it == index_.end()) {
    index_.emplace(name, vars_.size());
    vars_.push_back(v);
  } else {
    vars_[it->second] = v;
  }
}

Var ParamSet::get_or(const std::string& name, double fallback) {
  auto it = index_.find(name);
  if (it != index_.end()) return vars_[it->second];
  return tape_->scalar_constant(fallback);
}

std::size_t ParamSet::slot(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) fail(ErrorCode::InvalidConfig, "unknown parameter '" + name + "'");
  return it->second;
}

ParamSet make_params(ad::Tape& tape, const ParamValues& values, bool differentiable) {
  ParamSet p(tape);
  for (const auto& [name, v] : values) p.set(name, differentiable ? tape.leaf({v}) : tape.constant({v}));
  return p;
}

}  // namespace fvg::solvers
