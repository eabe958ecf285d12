#pragma once
// Dense complex eigenvalues: balancing, Householder reduction to Hessenberg
// form, then single-shift complex QR with deflation.

#include "glbethe/error.hpp"
#include "glbethe/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace glb {

struct EigenResult {
  std::vector<cplx> values;
  double backward_error = 0.0;  // ||Q H Q* - A|| / ||A|| (Frobenius, balanced A)
  int iterations = 0;
};

class EigenNonConvergence : public Error {
 public:
  EigenNonConvergence(std::vector<cplx> partial, int iterations)
      : Error(ErrorKind::non_convergence, "QR iteration budget exhausted after " + std::to_string(iterations) +
                                              " iterations with " + std::to_string(partial.size()) + " eigenvalues deflated"),
        partial_(std::move(partial)) {}
  const std::vector<cplx>& partial() const { return partial_; }

 private:
  std::vector<cplx> partial_;
};

namespace detail {

inline double frobenius(const CMatrix& m) {
  double s = 0.0;
  for (const auto& v : m.data()) s += std::norm(v);
  return std::sqrt(s);
}

// Diagonal similarity by powers of two equalizing row and column norms.
inline void balance(CMatrix& a) {
  const std::size_t n = a.rows();
  const double radix = 2.0;
  bool done = false;
  for (int sweep = 0; sweep < 100 && !done; ++sweep) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Householder reduction A = Q H Q*; returns Q.
inline CMatrix hessenberg(CMatrix& a) {
  const std::size_t n = a.rows();
  CMatrix q = CMatrix::identity(n);
  std::vector<cplx> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha_norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha_norm += std::norm(a(i, k));
    alpha_norm = std::sqrt(alpha_norm);
    if (alpha_norm == 0.0) continue;
    const cplx x0 = a(k + 1, k);
    const cplx phase = std::abs(x0) == 0.0 ? cplx(1.0) : x0 / std::abs(x0);
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.0;
    v[k + 1] = x0 + phase * alpha_norm;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    // A <- (I - 2 v v*/|v|^2) A (I - 2 v v*/|v|^2)
    for (std::size_t j = 0; j < n; ++j) {
      cplx s{};
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * a(i, j);
      s *= 2.0 / vnorm2;
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= v[i] * s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{};
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      s *= 2.0 / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= s * std::conj(v[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      cplx s{};
      for (std::size_t j = k + 1; j < n; ++j) s += q(i, j) * v[j];
      s *= 2.0 / vnorm2;
      for (std::size_t j = k + 1; j < n; ++j) q(i, j) -= s * std::conj(v[j]);
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
  return q;
}

inline cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d) {
  const cplx tr = a + d;
  const cplx disc = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
  const cplx l1 = 0.5 * (tr + disc);
  const cplx l2 = 0.5 * (tr - disc);
  return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

}  // namespace detail

inline EigenResult eigenvalues_dense(const CMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw Error(ErrorKind::invalid_argument, "eigenvalues of a non-square matrix");
  for (const auto& v : m.data())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error(ErrorKind::invalid_argument, "non-finite matrix entry");
  EigenResult res;
  if (n == 0) return res;
  CMatrix a = m;
  detail::balance(a);
  const CMatrix balanced = a;
  CMatrix q = detail::hessenberg(a);
  {
    const double an = detail::frobenius(balanced);
    const double err = detail::frobenius(q * a * conj_transpose(q) - balanced);
    res.backward_error = an > 0.0 ? err / an : err;
  }
  CMatrix& h = a;
  const double eps = std::numeric_limits<double>::epsilon();
  const double hnorm = std::max(detail::frobenius(h), std::numeric_limits<double>::min());
  std::vector<cplx> values(n);
  std::vector<bool> found(n, false);
  std::vector<cplx> partial;
  long hi = static_cast<long>(n) - 1;
  int its = 0;
  int total = 0;
  const int budget = 30 * static_cast<int>(n);
  while (hi >= 0) {
    long lo = hi;
    while (lo > 0) {
      const double s = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      const double ref = s == 0.0 ? hnorm : s;
      if (std::abs(h(lo, lo - 1)) <= eps * ref) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      values[hi] = h(hi, hi);
      found[hi] = true;
      partial.push_back(h(hi, hi));
      --hi;
      its = 0;
      continue;
    }
    if (total >= budget) throw EigenNonConvergence(partial, total);
    ++its;
    ++total;
    cplx mu;
    if (its % 10 == 0) {
      mu = h(hi, hi) + cplx(0.75 * std::abs(h(hi, hi - 1)), 0.43 * std::abs(h(hi, hi - 1)));
    } else {
      mu = detail::wilkinson_shift(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
    }
    const auto ulo = static_cast<std::size_t>(lo);
    const auto uhi = static_cast<std::size_t>(hi);
    for (std::size_t k = ulo; k <= uhi; ++k) h(k, k) -= mu;
    std::vector<double> cs(uhi - ulo);
    std::vector<cplx> sn(uhi - ulo);
    for (std::size_t k = ulo; k < uhi; ++k) {
      const cplx x = h(k, k), y = h(k + 1, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      double c;
      cplx s;
      if (r == 0.0) {
        c = 1.0;
        s = 0.0;
      } else if (std::abs(x) == 0.0) {
        c = 0.0;
        s = std::conj(y) / std::abs(y);
      } else {
        c = std::abs(x) / r;
        s = (x / std::abs(x)) * std::conj(y) / r;
      }
      cs[k - ulo] = c;
      sn[k - ulo] = s;
      for (std::size_t j = k; j <= uhi; ++j) {
        const cplx t1 = h(k, j), t2 = h(k + 1, j);
        h(k, j) = c * t1 + s * t2;
        h(k + 1, j) = -std::conj(s) * t1 + c * t2;
      }
    }
    for (std::size_t k = ulo; k < uhi; ++k) {
      const double c = cs[k - ulo];
      const cplx s = sn[k - ulo];
      const std::size_t top = std::min(k + 2, uhi);
      for (std::size_t i = ulo; i <= top; ++i) {
        const cplx t1 = h(i, k), t2 = h(i, k + 1);
        h(i, k) = c * t1 + std::conj(s) * t2;
        h(i, k + 1) = -s * t1 + c * t2;
      }
    }
    for (std::size_t k = ulo; k <= uhi; ++k) h(k, k) += mu;
  }
  res.values = std::move(values);
  res.iterations = total;
  return res;
}

inline void sort_spectrum(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

}  // namespace glb
