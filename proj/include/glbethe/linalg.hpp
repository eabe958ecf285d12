#pragma once

#include "glbethe/matrix.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace glb {

// Solve A x = b by LU with partial pivoting. Returns nullopt when a pivot
// falls below rel_pivot_tol times the largest entry of A.
inline std::optional<std::vector<cplx>> lu_solve(CMatrix a, std::vector<cplx> b, double rel_pivot_tol = 1e-14) {
  const std::size_t n = a.rows();
  const double scale = std::max(a.max_norm(), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= rel_pivot_tol * scale) return std::nullopt;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      cplx f = a(i, k) / a(k, k);
      if (f == cplx{}) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<cplx> x(n);
  for (std::size_t k = n; k-- > 0;) {
    cplx s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
    x[k] = s / a(k, k);
  }
  return x;
}

inline std::optional<CMatrix> inverse(const CMatrix& a) {
  const std::size_t n = a.rows();
  CMatrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<cplx> e(n);
    e[j] = 1.0;
    auto x = lu_solve(a, e);
    if (!x) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = (*x)[i];
  }
  return inv;
}

}  // namespace glb
