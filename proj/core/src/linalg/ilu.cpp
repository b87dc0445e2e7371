#include "fvgraph/linalg/ilu.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "fvgraph/common/error.hpp"

namespace fvg::linalg {

Ilu0::Ilu0(const CsrMatrix& a) : lu_(a) {
  const std::size_t n = lu_.n;
  for (std::size_t i = 0; i < n; ++i) {
    if (lu_.val[lu_.diag_pos[i]] == 0.0) fail(ErrorCode::SingularDiagonal, "zero diagonal at row " + std::to_string(i));
  }
  std::vector<std::size_t> iw(n, SIZE_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    double row_scale = 0.0;
    for (std::size_t p = lu_.row_ptr[i]; p < lu_.row_ptr[i + 1]; ++p) {
      iw[lu_.col[p]] = p;
      row_scale = std::max(row_scale, std::abs(lu_.val[p]));
    }
    for (std::size_t p = lu_.row_ptr[i]; p < lu_.diag_pos[i]; ++p) {
      const std::size_t k = lu_.col[p];
      const double lik = lu_.val[p] / lu_.val[lu_.diag_pos[k]];
      lu_.val[p] = lik;
      for (std::size_t q = lu_.diag_pos[k] + 1; q < lu_.row_ptr[k + 1]; ++q) {
        const std::size_t pos = iw[lu_.col[q]];
        if (pos != SIZE_MAX) lu_.val[pos] -= lik * lu_.val[q];
      }
    }
    const double piv = lu_.val[lu_.diag_pos[i]];
    if (!std::isfinite(piv) || std::abs(piv) <= 1e-14 * row_scale) {
      fail(ErrorCode::PivotBreakdown, "vanishing ILU pivot at row " + std::to_string(i));
    }
    for (std::size_t p = lu_.row_ptr[i]; p < lu_.row_ptr[i + 1]; ++p) iw[lu_.col[p]] = SIZE_MAX;
  }
}

void Ilu0::apply(std::span<const double> r, std::span<double> z) const {
  const std::size_t n = lu_.n;
  for (std::size_t i = 0; i < n; ++i) {
    double s = r[i];
    for (std::size_t p = lu_.row_ptr[i]; p < lu_.diag_pos[i]; ++p) s -= lu_.val[p] * z[lu_.col[p]];
    z[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = z[i];
    for (std::size_t p = lu_.diag_pos[i] + 1; p < lu_.row_ptr[i + 1]; ++p) s -= lu_.val[p] * z[lu_.col[p]];
    z[i] = s / lu_.val[lu_.diag_pos[i]];
  }
}

void Ilu0::apply_transpose(std::span<const double> r, std::span<double> z) const {
  const std::size_t n = lu_.n;
  std::vector<double> w(r.begin(), r.end());
  // U^T y = r: column sweep forward
  for (std::size_t i = 0; i < n; ++i) {
    const double yi = w[i] / lu_.val[lu_.diag_pos[i]];
    w[i] = yi;
    for (std::size_t p = lu_.diag_pos[i] + 1; p < lu_.row_ptr[i + 1]; ++p) w[lu_.col[p]] -= lu_.val[p] * yi;
  }
  // L^T z = y: column sweep backward, unit diagonal
  for (std::size_t i = n; i-- > 0;) {
    const double zi = w[i];
    for (std::size_t p = lu_.row_ptr[i]; p < lu_.diag_pos[i]; ++p) w[lu_.col[p]] -= lu_.val[p] * zi;
  }
  std::copy(w.begin(), w.end(), z.begin());
}

}  // namespace fvg::linalg
