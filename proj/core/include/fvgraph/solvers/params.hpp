#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "fvgraph/ad/tape.hpp"

namespace fvg::solvers {

using ad::Var;

/// Named scalar inputs of one step on one tape (boundary bindings, nu,
/// Windkessel parameters, imposed outlet pressures). Slots are stable once handed out.
class ParamSet {
 public:
  explicit ParamSet(ad::Tape& tape) : tape_(&tape) {}

  ad::Tape& tape() const { return *tape_; }
  void set(const std::string& name, const Var& v);
  bool has(const std::string& name) const { return index_.count(name) != 0; }
  /// The named value, or a tape constant holding `fallback` when absent.
  Var get_or(const std::string& name, double fallback);
  /// Throws InvalidConfig for unknown names.
  std::size_t slot(const std::string& name) const;
  std::span<const Var> vars() const { return vars_; }

 private:
  ad::Tape* tape_;
  std::map<std::string, std::size_t> index_;
  std::vector<Var> vars_;
};

/// Named scalar parameter values outside any tape.
using ParamValues = std::map<std::string, double>;

/// Creates one leaf (or constant when `differentiable` is false) per value.
ParamSet make_params(ad::Tape& tape, const ParamValues& values, bool differentiable);

}  // namespace fvg::solvers
