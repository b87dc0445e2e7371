#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fvgraph/ad/tape.hpp"

namespace fvg::ad {

/// Binary ops accept equal sizes or a size-1 operand that broadcasts.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);

Var neg(const Var& a);
Var scale(const Var& a, double c);
Var add_const(const Var& a, double c);
Var mul_const(const Var& a, std::span<const double> c);
Var add_vec_const(const Var& a, std::span<const double> c);
Var exp(const Var& a);
Var log(const Var& a);
Var square(const Var& a);
Var reciprocal(const Var& a);
/// max(x, 0) with derivative 1 at x = 0.
Var relu(const Var& a);

Var sum(const Var& a);
Var dot(const Var& a, const Var& b);
Var weighted_sum(const Var& a, std::span<const double> w);
Var broadcast(const Var& scalar, std::size_t n);

Var gather(const Var& a, std::span<const std::size_t> index);
Var scatter_add(const Var& a, std::span<const std::size_t> index, std::size_t n);
Var concat(std::span<const Var> parts);
Var slice(const Var& a, std::size_t start, std::size_t count);
/// Extracts every stride-th entry starting at offset (e.g. one component of an interleaved field).
Var strided(const Var& a, std::size_t offset, std::size_t stride);

/// Names of every op with a registered VJP.
std::vector<std::string_view> registered_ops();

}  // namespace fvg::ad
