#pragma once
// gl(N) representations, Yangian evaluation operators and Drinfel'd
// polynomials.

#include "glbethe/error.hpp"
#include "glbethe/matrix.hpp"
#include "glbethe/polynomial.hpp"
#include "glbethe/scalar.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace glb {

template <class T>
T from_complex(const cplx& z);
template <>
inline cplx from_complex<cplx>(const cplx& z) { return z; }
template <>
inline GaussianRational from_complex<GaussianRational>(const cplx& z) {
  // doubles are dyadic rationals, so this conversion is exact
  return {rational(z.real()), rational(z.imag())};
}

struct RepKind {
  enum class Kind { fundamental, gl2_spin, symmetric_power };
  Kind kind = Kind::fundamental;
  double spin = 0.0;  // gl2_spin
  int power = 1;      // symmetric_power

  static RepKind fundamental() { return {}; }
  static RepKind gl2(double s) { return {Kind::gl2_spin, s, 0}; }
  static RepKind sym(int m) { return {Kind::symmetric_power, 0.0, m}; }
  std::string name() const {
    switch (kind) {
      case Kind::fundamental: return "fundamental";
      case Kind::gl2_spin: return "gl2_spin(" + std::to_string(spin) + ")";
      case Kind::symmetric_power: return "symmetric_power(" + std::to_string(power) + ")";
    }
    return "?";
  }
};

// Generators are stored with integer entries: every supported irrep is
// realized on monomials of degree m with e_ij = x_i d/dx_j.
class Irrep {
 public:
  Irrep(int rank, RepKind kind, std::vector<int> weight, std::vector<std::vector<int>> basis)
      : rank_(rank), kind_(kind), weight_(std::move(weight)), basis_(std::move(basis)) {
    const std::size_t d = basis_.size();
    gens_.assign(static_cast<std::size_t>(rank_ * rank_), std::vector<long long>(d * d, 0));
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t b = 0; b < d; ++b) index[basis_[b]] = b;
    for (int i = 0; i < rank_; ++i)
      for (int j = 0; j < rank_; ++j)
        for (std::size_t b = 0; b < d; ++b) {
          const auto& beta = basis_[b];
          if (beta[j] == 0) continue;
          auto out = beta;
          out[j] -= 1;
          out[i] += 1;
          gens_[static_cast<std::size_t>(i * rank_ + j)][index.at(out) * d + b] = beta[j];
        }
  }

  int rank() const { return rank_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<int>& weight() const { return weight_; }
  const RepKind& kind() const { return kind_; }
  // Cartan weight of each basis vector (its monomial exponent).
  const std::vector<std::vector<int>>& basis() const { return basis_; }

  // pi(e_ij), 0-based indices
  template <class T = cplx>
  Matrix<T> generator(int i, int j) const {
    const std::size_t d = dim();
    Matrix<T> m(d, d);
    const auto& g = gens_[static_cast<std::size_t>(i * rank_ + j)];
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        if (g[r * d + c] != 0) m(r, c) = Field<T>::from_int(g[r * d + c]);
    return m;
  }
  long long generator_entry(int i, int j, std::size_t r, std::size_t c) const {
    return gens_[static_cast<std::size_t>(i * rank_ + j)][r * dim() + c];
  }

  // Distinct eigenvalues of sum_ij E_ij (x) pi(e_ji) on C^N (x) V.
  std::vector<int> split_eigenvalues() const {
    std::vector<int> out;
    for (int k = 0; k < rank_; ++k)
      if (k == 0 || weight_[k - 1] > weight_[k]) out.push_back(weight_[k] - k);
    return out;
  }

 private:
  int rank_;
  RepKind kind_;
  std::vector<int> weight_;
  std::vector<std::vector<int>> basis_;
  std::vector<std::vector<long long>> gens_;
};

namespace detail {
inline void compositions(int n, int m, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n - 1) {
    cur.push_back(m);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = m; v >= 0; --v) {
    cur.push_back(v);
    compositions(n, m - v, cur, out);
    cur.pop_back();
  }
}
inline Irrep symmetric(int rank, int m, RepKind kind) {
  std::vector<std::vector<int>> basis;
  std::vector<int> cur;
  detail::compositions(rank, m, cur, basis);
  std::vector<int> w(static_cast<std::size_t>(rank), 0);
  w[0] = m;
  return Irrep(rank, kind, w, basis);
}
}  // namespace detail

inline Irrep make_irrep(int rank, RepKind kind) {
  if (rank < 2) throw Error(ErrorKind::unsupported_representation, "rank must be at least 2");
  switch (kind.kind) {
    case RepKind::Kind::fundamental:
      return detail::symmetric(rank, 1, kind);
    case RepKind::Kind::gl2_spin: {
      const double twice = 2.0 * kind.spin;
      if (rank != 2 || twice < 0 || std::abs(twice - std::round(twice)) > 1e-12)
        throw Error(ErrorKind::unsupported_representation, "gl2_spin needs rank 2 and 2s a non-negative integer");
      return detail::symmetric(2, static_cast<int>(std::lround(twice)), kind);
    }
    case RepKind::Kind::symmetric_power:
      if (kind.power < 1) throw Error(ErrorKind::unsupported_representation, "symmetric_power needs m >= 1");
      return detail::symmetric(rank, kind.power, kind);
  }
  throw Error(ErrorKind::unsupported_representation, "unknown kind");
}

struct SiteSpec {
  Irrep irrep;
  cplx a{0.0, 0.0};
};

// sum_ij E_ij (aux) (x) pi(e_ji) (site); legs (aux, site).
template <class T = cplx>
Matrix<T> split_operator(const Irrep& rep) {
  const std::size_t n = static_cast<std::size_t>(rep.rank());
  const std::size_t d = rep.dim();
  Matrix<T> g(n * d, n * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
          long long v = rep.generator_entry(static_cast<int>(j), static_cast<int>(i), r, c);
          if (v != 0) g(i * d + r, j * d + c) = Field<T>::from_int(v);
        }
  return g;
}

// (x)1 + i G for x = lambda + a.
template <class T = cplx>
Matrix<T> evaluation_L_shifted(const Irrep& rep, const T& x) {
  Matrix<T> l = split_operator<T>(rep) * Field<T>::imag_unit();
  for (std::size_t k = 0; k < l.rows(); ++k) l(k, k) += x;
  return l;
}

template <class T = cplx>
OperatorMatrix<T> evaluation_L(const SiteSpec& site, const T& lambda) {
  OperatorMatrix<T> op;
  op.data = evaluation_L_shifted<T>(site.irrep, lambda + from_complex<T>(site.a));
  op.legs = {{"aux", static_cast<std::size_t>(site.irrep.rank())}, {"site", site.irrep.dim()}};
  return op;
}

// prod_gamma (x + i gamma): scalar with L(x) adj(x) = det_factor(x) 1.
template <class T = cplx>
T evaluation_L_det_factor(const Irrep& rep, const T& x) {
  T v = Field<T>::one();
  for (int g : rep.split_eigenvalues()) v *= (x + Field<T>::imag_unit() * Field<T>::from_int(g));
  return v;
}

// Polynomial adjugate of L at shifted argument x, built from the spectral
// projectors of the split operator.
template <class T = cplx>
Matrix<T> evaluation_L_adjugate(const Irrep& rep, const T& x) {
  const auto gammas = rep.split_eigenvalues();
  const Matrix<T> g = split_operator<T>(rep);
  const std::size_t n = g.rows();
  Matrix<T> out(n, n);
  for (std::size_t c = 0; c < gammas.size(); ++c) {
    Matrix<T> proj = Matrix<T>::identity(n);
    T f = Field<T>::one();
    for (std::size_t c2 = 0; c2 < gammas.size(); ++c2) {
      if (c2 == c) continue;
      Matrix<T> shifted = g;
      for (std::size_t k = 0; k < n; ++k) shifted(k, k) -= Field<T>::from_int(gammas[c2]);
      T denom = Field<T>::from_int(gammas[c] - gammas[c2]);
      proj = proj * shifted;
      proj *= (Field<T>::one() / denom);
      f *= (x + Field<T>::imag_unit() * Field<T>::from_int(gammas[c2]));
    }
    out += proj * f;
  }
  return out;
}

// P_k(lambda) = prod_n (lambda + a_n + i alpha_k^(n)), k = 1..N.
inline std::vector<FactoredPolynomial> drinfeld_polynomials(const std::vector<SiteSpec>& sites) {
  if (sites.empty()) throw Error(ErrorKind::invalid_argument, "empty site list");
  const int n = sites.front().irrep.rank();
  std::vector<FactoredPolynomial> out(static_cast<std::size_t>(n));
  for (const auto& s : sites) {
    if (s.irrep.rank() != n) throw Error(ErrorKind::invalid_argument, "mixed ranks in site list");
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)].roots.push_back(-s.a - I * static_cast<double>(s.irrep.weight()[static_cast<std::size_t>(k)]));
  }
  return out;
}

// Q_i with mu_i/mu_{i+1} = Q_i(lambda + i)/Q_i(lambda), i = 1..N-1.
inline std::vector<FactoredPolynomial> drinfeld_string_polynomials(const std::vector<SiteSpec>& sites) {
  const int n = sites.front().irrep.rank();
  std::vector<FactoredPolynomial> out(static_cast<std::size_t>(n - 1));
  for (const auto& s : sites) {
    const auto& w = s.irrep.weight();
    for (int k = 0; k + 1 < n; ++k)
      for (int j = 0; j < w[static_cast<std::size_t>(k)] - w[static_cast<std::size_t>(k + 1)]; ++j)
        out[static_cast<std::size_t>(k)].roots.push_back(-s.a - I * static_cast<double>(w[static_cast<std::size_t>(k + 1)] + j));
  }
  return out;
}

}  // namespace glb
