#pragma once

#include <span>
#include <vector>

#include "fvgraph/linalg/sparse.hpp"

namespace fvg::linalg {

/// Zero fill-in incomplete LU on the matrix pattern: L unit lower, U upper, stored together.
class Ilu0 {
 public:
  /// Throws SingularDiagonal for a zero diagonal entry, PivotBreakdown for a vanishing pivot.
  explicit Ilu0(const CsrMatrix& a);

  /// z = (LU)^{-1} r
  void apply(std::span<const double> r, std::span<double> z) const;
  /// z = (LU)^{-T} r
  void apply_transpose(std::span<const double> r, std::span<double> z) const;

  const CsrMatrix& factors() const { return lu_; }

 private:
  CsrMatrix lu_;
};

}  // namespace fvg::linalg
