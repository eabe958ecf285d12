#pragma once
// Analytical Bethe ansatz: eigenvalue formulas, dressing functions, boundary
// polynomials, cleared Bethe equations and a deflated Newton solver.

#include "glbethe/chain.hpp"
#include "glbethe/linalg.hpp"
#include "glbethe/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace glb {

inline constexpr double kPoleTol = 1e-12;

// e_n(x) = (x + i n/2)/(x - i n/2); the order may be complex.
inline cplx e_fn(cplx n, cplx x) {
  const cplx den = x - I * n / 2.0;
  if (std::abs(den) <= kPoleTol * std::max(1.0, std::abs(x)))
    throw Error(ErrorKind::pole, "e_n has a pole at x = i n/2");
  return (x + I * n / 2.0) / den;
}

inline cplx e_tilde(cplx n, cplx x, cplx y) { return e_fn(n, x - y) * e_fn(n, x + y); }

struct BetheRootSet {
  std::vector<int> M;                      // M_1..M_{N-1}
  std::vector<std::vector<cplx>> roots;    // roots[k-1] = level-k roots
  double residual = 0.0;                   // max relative cleared residual
  int iterations = 0;
  std::uint64_t seed = 0;
  int start = -1;
  bool singular = false;
  std::string note;

  static BetheRootSet empty(int n) {
    BetheRootSet r;
    r.M.assign(static_cast<std::size_t>(n - 1), 0);
    r.roots.assign(static_cast<std::size_t>(n - 1), {});
    return r;
  }
  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& l : roots) t += l.size();
    return t;
  }
  const std::vector<cplx>& level(int k) const {  // 1-based, empty outside 1..N-1
    static const std::vector<cplx> none;
    if (k < 1 || k > static_cast<int>(roots.size())) return none;
    return roots[static_cast<std::size_t>(k - 1)];
  }
};

// Open chains: g_k = f_k(lambda) * Dt_k(lambda) with
// f_k = 2l(2l + iN)/((2l + i(k-1))(2l + ik)),
// Dt_k = l + xi (k <= M), xi - l - iM (k > M).
// SNP (Ktilde = kappa 1): g_1 = kappa (z - i)/z, g_N = kappa (z + i)/z,
// g_k = kappa otherwise, with z = 2 lambda + iN/2.
inline cplx g_factor(int k, cplx lambda, const Boundary& b, int n) {
  if (b.kind == Boundary::Kind::closed) return 1.0;
  if (b.kind == Boundary::Kind::open) {
    const cplx d1 = 2.0 * lambda + I * static_cast<double>(k - 1);
    const cplx d2 = 2.0 * lambda + I * static_cast<double>(k);
    if (std::abs(d1) <= kPoleTol || std::abs(d2) <= kPoleTol) throw Error(ErrorKind::pole, "g_k denominator vanishes");
    const cplx f = 2.0 * lambda * (2.0 * lambda + I * static_cast<double>(n)) / (d1 * d2);
    const cplx dk = k <= b.M ? lambda + b.xi : b.xi - lambda - I * static_cast<double>(b.M);
    return f * dk;
  }
  const cplx kappa = b.Ktilde(0, 0);
  if (k != 1 && k != n) return kappa;
  const cplx z = 2.0 * lambda + I * static_cast<double>(n) / 2.0;
  if (std::abs(z) <= kPoleTol) throw Error(ErrorKind::pole, "g_k denominator vanishes");
  return kappa * (k == 1 ? (z - I) : (z + I)) / z;
}

// Dressing function A_k (k = 1..N).
inline cplx dressing(Boundary::Kind kind, int k, const BetheRootSet& r, cplx lambda) {
  cplx a = 1.0;
  const double kd = static_cast<double>(k);
  auto guard = [&](cplx den, int level, std::size_t idx) {
    if (std::abs(den) <= kPoleTol * std::max(1.0, std::abs(lambda)))
      throw Error(ErrorKind::pole, "dressing pole at level " + std::to_string(level) + " root " + std::to_string(idx + 1));
    return den;
  };
  const auto& prev = r.level(k - 1);
  const auto& cur = r.level(k);
  if (kind == Boundary::Kind::closed) {
    for (std::size_t n = 0; n < prev.size(); ++n)
      a *= (lambda - prev[n] + I * (kd + 1.0) / 2.0) / guard(lambda - prev[n] + I * (kd - 1.0) / 2.0, k - 1, n);
    for (std::size_t n = 0; n < cur.size(); ++n)
      a *= (lambda - cur[n] + I * (kd - 2.0) / 2.0) / guard(lambda - cur[n] + I * kd / 2.0, k, n);
    return a;
  }
  for (std::size_t n = 0; n < prev.size(); ++n)
    for (double sg : {1.0, -1.0})
      a *= (lambda + sg * prev[n] + I * (kd + 1.0) / 2.0) / guard(lambda + sg * prev[n] + I * (kd - 1.0) / 2.0, k - 1, n);
  for (std::size_t n = 0; n < cur.size(); ++n)
    for (double sg : {1.0, -1.0})
      a *= (lambda + sg * cur[n] + I * kd / 2.0 - I) / guard(lambda + sg * cur[n] + I * kd / 2.0, k, n);
  return a;
}

// ---- boundary polynomials ---------------------------------------------------

struct BoundaryPolynomials {
  std::vector<FactoredPolynomial> polys;  // P_k, beta_k or sigma_k
  double heldout_residual = 0.0;          // relative, at off-grid points
};

namespace detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline std::vector<cplx> reference_vector(const ChainSpec& spec, std::size_t aux) {
  const std::size_t d = spec.quantum_dim();
  std::vector<cplx> v(static_cast<std::size_t>(spec.N) * d, 0.0);
  v[aux * d] = 1.0;
  return v;
}

inline void apply_monodromy(const ChainSpec& spec, cplx lambda, std::vector<cplx>& v) {
  const auto dims = chain_legs(spec);
  for (std::size_t j = spec.sites.size(); j-- > 0;)
    apply_local(v, evaluation_L<cplx>(spec.sites[j], lambda).data, LegSplit(dims, {0, j + 1}));
}

inline void apply_inverse_numerator(const ChainSpec& spec, cplx lambda, std::vector<cplx>& v) {
  const auto dims = chain_legs(spec);
  for (std::size_t j = 0; j < spec.sites.size(); ++j)
    apply_local(v, evaluation_L_adjugate<cplx>(spec.sites[j].irrep, -lambda + spec.sites[j].a), LegSplit(dims, {0, j + 1}));
}

inline void project_aux(std::vector<cplx>& v, std::size_t d, std::size_t aux) {
  for (std::size_t k = 0; k < v.size(); ++k)
    if (k / d != aux) v[k] = 0.0;
}

inline bool is_scalar_matrix(const CMatrix& m, double tol = 0.0) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const cplx expect = i == j ? m(0, 0) : cplx{};
      if (std::abs(m(i, j) - expect) > tol) return false;
    }
  return true;
}

}  // namespace detail

// Relative size of s(lambda) omega - <omega|s|omega> omega for the plain
// frame of the snp transfer matrix.
inline double snp_plain_reference_residual(const ChainSpec& spec, cplx lambda) {
  const CMatrix s = transfer<cplx>(spec, lambda);
  double off = 0.0, scale = std::abs(s(0, 0));
  for (std::size_t i = 1; i < s.rows(); ++i) {
    off = std::max(off, std::abs(s(i, 0)));
    scale = std::max(scale, std::abs(s(i, 0)));
  }
  return scale == 0.0 ? 0.0 : off / scale;
}

// Diagonal auxiliary component k of the boundary monodromy evaluated on the
// pseudo-vacuum, as a function of lambda.
inline cplx reference_component(const ChainSpec& spec, std::size_t k, cplx lambda) {
  const std::size_t d = spec.quantum_dim();
  const auto n = static_cast<std::size_t>(spec.N);
  auto v = detail::reference_vector(spec, k);
  switch (spec.boundary.kind) {
    case Boundary::Kind::closed:
      detail::apply_monodromy(spec, lambda, v);
      return v[k * d];
    case Boundary::Kind::open:
      detail::apply_inverse_numerator(spec, lambda, v);
      detail::project_aux(v, d, k);
      detail::apply_monodromy(spec, lambda, v);
      return v[k * d];
    case Boundary::Kind::snp: {
      // <w|T_kk(lambda)|w> <w|T_k'k'(lambda')|w>, k' = N - 1 - k (0-based)
      const std::size_t kb = n - 1 - k;
      auto w = detail::reference_vector(spec, kb);
      detail::apply_monodromy(spec, snp_reflected(spec.N, lambda), w);
      detail::apply_monodromy(spec, lambda, v);
      return v[k * d] * w[kb * d];
    }
  }
  return 0.0;
}

inline std::size_t boundary_degree_bound(const ChainSpec& spec) {
  std::size_t deg = spec.sites.size();
  if (spec.boundary.kind == Boundary::Kind::open)
    for (const auto& s : spec.sites) deg += s.irrep.split_eigenvalues().size() - 1;
  if (spec.boundary.kind == Boundary::Kind::snp) deg *= 2;
  return deg;
}

// Extract P_k / beta_k / sigma_k by interpolating the pseudo-vacuum
// components on a circle and factoring the interpolant.
inline BoundaryPolynomials boundary_polynomials(const ChainSpec& spec, double heldout_tol = 1e-10) {
  spec.validate();
  ChainSpec work = spec;
  if (work.boundary.kind == Boundary::Kind::open) work.boundary.U.reset();  // spectrum and beta_k do not depend on U
  if (work.boundary.kind == Boundary::Kind::snp && !detail::is_scalar_matrix(work.boundary.Ktilde, 1e-14)) {
    const double r = snp_plain_reference_residual(work, cplx(0.37, 0.21));
    throw Error(ErrorKind::no_reference_state,
                "pseudo-vacuum is not an eigenvector for this Ktilde (relative residual " + std::to_string(r) + ")");
  }
  double spread = 0.0;
  for (const auto& s : work.sites) spread = std::max(spread, std::abs(s.a));
  const double radius = 1.0 + 2.0 * spread + static_cast<double>(work.N);
  const cplx center = 0.0;
  const std::size_t deg = boundary_degree_bound(work);
  BoundaryPolynomials out;
  const std::vector<cplx> held = {center + 0.71 * radius * cplx(std::cos(0.3), std::sin(0.3)),
                                  center + 1.23 * radius * cplx(std::cos(2.1), std::sin(2.1)),
                                  center + 0.42 * radius * cplx(std::cos(4.4), std::sin(4.4))};
  for (std::size_t k = 0; k < static_cast<std::size_t>(work.N); ++k) {
    auto f = [&](cplx l) { return reference_component(work, k, l); };
    auto coef = interpolate_on_circle(f, deg, center, radius);
    double scale = 0.0;
    for (const auto& c : coef) scale = std::max(scale, std::abs(c));
    std::vector<cplx> truth;
    double tscale = scale;
    for (const auto& h : held) {
      truth.push_back(f(h));
      tscale = std::max(tscale, std::abs(truth.back()));
    }
    auto heldout = [&](const FactoredPolynomial& p) {
      double worst = 0.0;
      for (std::size_t j = 0; j < held.size(); ++j) worst = std::max(worst, std::abs(p(held[j]) - truth[j]) / std::max(tscale, 1e-300));
      return worst;
    };
    // a root of multiplicity m splits by about eps^(1/m); try wider merges
    const FactoredPolynomial raw = factor_scaled(coef, center, radius);
    FactoredPolynomial best = raw;
    double err = heldout(best);
    for (double merge : {1e-3, 1e-2, 5e-2}) {
      FactoredPolynomial merged = refine_multiple_roots(coef, merge_root_clusters(raw, merge), center, radius);
      const double em = heldout(merged);
      if (em < err) {
        best = merged;
        err = em;
      }
    }
    if (!(err < heldout_tol))
      throw Error(ErrorKind::extraction, "component " + std::to_string(k + 1) + " held-out residual " + detail::sci(err));
    sort_roots(best.roots);
    out.polys.push_back(best);
    out.heldout_residual = std::max(out.heldout_residual, err);
  }
  return out;
}

// ---- eigenvalue formula -----------------------------------------------------

struct EigenvalueFormula {
  Boundary boundary;
  int N = 2;
  std::vector<FactoredPolynomial> polys;  // P_k (closed), beta_k (open), sigma_k (snp)
  double extraction_residual = 0.0;

  cplx prefactor(int k, cplx lambda) const { return g_factor(k, lambda, boundary, N); }

  cplx evaluate(const BetheRootSet& r, cplx lambda) const {
    cplx s = 0.0;
    for (int k = 1; k <= N; ++k)
      s += prefactor(k, lambda) * polys[static_cast<std::size_t>(k - 1)](lambda) * dressing(boundary.kind, k, r, lambda);
    return s;
  }
  cplx pseudo_vacuum(cplx lambda) const { return evaluate(BetheRootSet::empty(N), lambda); }
};

inline EigenvalueFormula make_formula(const ChainSpec& spec) {
  spec.validate();
  EigenvalueFormula f;
  f.boundary = spec.boundary;
  f.N = spec.N;
  if (spec.boundary.kind == Boundary::Kind::closed) {
    f.polys = drinfeld_polynomials(spec.sites);
  } else {
    auto bp = boundary_polynomials(spec);
    f.polys = bp.polys;
    f.extraction_residual = bp.heldout_residual;
  }
  return f;
}

inline cplx pseudo_vacuum_eigenvalue(const ChainSpec& spec, cplx lambda) { return make_formula(spec).pseudo_vacuum(lambda); }

// ---- cleared Bethe equations ------------------------------------------------

// c0 + cp * z[p] + cq * z[q]; unused slots have index -1.
struct LinearFactor {
  int p = -1;
  cplx cp{};
  int q = -1;
  cplx cq{};
  cplx c0{};

  cplx value(const std::vector<cplx>& z) const {
    cplx v = c0;
    if (p >= 0) v += cp * z[static_cast<std::size_t>(p)];
    if (q >= 0) v += cq * z[static_cast<std::size_t>(q)];
    return v;
  }
  bool operator==(const LinearFactor&) const = default;
};

struct ProductTerm {
  cplx coef{1.0, 0.0};
  std::vector<LinearFactor> factors;

  cplx value(const std::vector<cplx>& z) const {
    cplx v = coef;
    for (const auto& f : factors) v *= f.value(z);
    return v;
  }
  // value and d/dz_v for all variables
  cplx value_and_gradient(const std::vector<cplx>& z, std::vector<cplx>& grad) const {
    const std::size_t m = factors.size();
    std::vector<cplx> vals(m), pre(m + 1), suf(m + 1);
    for (std::size_t j = 0; j < m; ++j) vals[j] = factors[j].value(z);
    pre[0] = coef;
    for (std::size_t j = 0; j < m; ++j) pre[j + 1] = pre[j] * vals[j];
    suf[m] = 1.0;
    for (std::size_t j = m; j-- > 0;) suf[j] = suf[j + 1] * vals[j];
    std::fill(grad.begin(), grad.end(), cplx{});
    for (std::size_t j = 0; j < m; ++j) {
      const cplx others = pre[j] * suf[j + 1];
      if (factors[j].p >= 0) grad[static_cast<std::size_t>(factors[j].p)] += factors[j].cp * others;
      if (factors[j].q >= 0) grad[static_cast<std::size_t>(factors[j].q)] += factors[j].cq * others;
    }
    return pre[m];
  }
};

// One equation: lhs_num * rhs_den - rhs_num * lhs_den = 0.
struct BaeEquation {
  int level = 1;
  std::size_t index = 0;
  ProductTerm lhs_num, lhs_den, rhs_num, rhs_den;
};

struct BaeSystem {
  std::vector<int> M;
  std::vector<std::size_t> offset;  // variable offset per level
  std::vector<BaeEquation> equations;
  bool reflected = false;  // open / snp: roots defined up to sign

  std::size_t size() const { return equations.size(); }
};

namespace detail {
inline LinearFactor diff(int p, int q, cplx c0) { return {p, 1.0, q, -1.0, c0}; }
inline LinearFactor sum(int p, int q, cplx c0) { return {p, 1.0, q, 1.0, c0}; }
inline LinearFactor lin(int p, cplx cp, cplx c0) { return {p, cp, -1, 0.0, c0}; }

inline void append(ProductTerm& t, const ProductTerm& o) {
  t.coef *= o.coef;
  t.factors.insert(t.factors.end(), o.factors.begin(), o.factors.end());
}

// P(shift_coef * z + shift) as a product of linear factors in z[var].
inline ProductTerm polynomial_factors(const FactoredPolynomial& p, int var, cplx shift) {
  ProductTerm t;
  t.coef = p.leading;
  for (const auto& r : p.roots) t.factors.push_back(lin(var, 1.0, shift - r));
  return t;
}
}  // namespace detail

// Left-hand side of every equation. Depends only on N, the root counts and
// whether the boundary reflects roots; never on the sites.
inline BaeSystem bae_lhs_structure(int n, const std::vector<int>& M, bool reflected) {
  BaeSystem sys;
  sys.M = M;
  sys.reflected = reflected;
  std::size_t off = 0;
  for (int m : M) {
    sys.offset.push_back(off);
    off += static_cast<std::size_t>(m);
  }
  auto var = [&](int level, int idx) { return static_cast<int>(sys.offset[static_cast<std::size_t>(level - 1)]) + idx; };
  const cplx h = I / 2.0;
  for (int k = 1; k <= n - 1; ++k) {
    for (int a = 0; a < M[static_cast<std::size_t>(k - 1)]; ++a) {
      BaeEquation eq;
      eq.level = k;
      eq.index = static_cast<std::size_t>(a);
      const int x = var(k, a);
      for (int nb : {k - 1, k + 1}) {
        if (nb < 1 || nb > n - 1) continue;
        for (int b = 0; b < M[static_cast<std::size_t>(nb - 1)]; ++b) {
          const int y = var(nb, b);
          eq.lhs_num.factors.push_back(detail::diff(x, y, -h));
          eq.lhs_den.factors.push_back(detail::diff(x, y, h));
          if (reflected) {
            eq.lhs_num.factors.push_back(detail::sum(x, y, -h));
            eq.lhs_den.factors.push_back(detail::sum(x, y, h));
          }
        }
      }
      for (int b = 0; b < M[static_cast<std::size_t>(k - 1)]; ++b) {
        if (b == a) continue;
        const int y = var(k, b);
        eq.lhs_num.factors.push_back(detail::diff(x, y, I));
        eq.lhs_den.factors.push_back(detail::diff(x, y, -I));
        if (reflected) {
          eq.lhs_num.factors.push_back(detail::sum(x, y, I));
          eq.lhs_den.factors.push_back(detail::sum(x, y, -I));
        }
      }
      sys.equations.push_back(std::move(eq));
    }
  }
  return sys;
}

// Full cleared system for the boundary described by the formula.
inline BaeSystem bae_system(const EigenvalueFormula& f, const std::vector<int>& M) {
  if (static_cast<int>(M.size()) != f.N - 1) throw Error(ErrorKind::invalid_argument, "M must have N-1 entries");
  const bool reflected = f.boundary.kind != Boundary::Kind::closed;
  BaeSystem sys = bae_lhs_structure(f.N, M, reflected);
  for (auto& eq : sys.equations) {
    const int k = eq.level;
    const int x = static_cast<int>(sys.offset[static_cast<std::size_t>(k - 1)] + eq.index);
    const double kd = static_cast<double>(k);
    const auto& pk = f.polys[static_cast<std::size_t>(k - 1)];
    const auto& pk1 = f.polys[static_cast<std::size_t>(k)];
    if (f.boundary.kind == Boundary::Kind::snp) {
      // g_k sigma_k (x + ik/2) / g_{k+1} sigma_{k+1} (x + ik/2)
      const cplx shift = I * kd / 2.0;
      eq.rhs_num = detail::polynomial_factors(pk, x, shift);
      eq.rhs_den = detail::polynomial_factors(pk1, x, shift);
      const cplx zc = 2.0 * shift + I * static_cast<double>(f.N) / 2.0;  // z = 2x + zc
      auto g_num = [&](int j) -> std::vector<LinearFactor> {
        if (j == 1) return {detail::lin(x, 2.0, zc - I)};
        if (j == f.N) return {detail::lin(x, 2.0, zc + I)};
        return {};
      };
      auto g_den = [&](int j) -> std::vector<LinearFactor> {
        if (j == 1 || j == f.N) return {detail::lin(x, 2.0, zc)};
        return {};
      };
      for (const auto& lf : g_num(k)) eq.rhs_num.factors.push_back(lf);
      for (const auto& lf : g_den(k + 1)) eq.rhs_num.factors.push_back(lf);
      for (const auto& lf : g_num(k + 1)) eq.rhs_den.factors.push_back(lf);
      for (const auto& lf : g_den(k)) eq.rhs_den.factors.push_back(lf);
      continue;
    }
    const cplx shift = -I * kd / 2.0;
    eq.rhs_num = detail::polynomial_factors(pk, x, shift);
    eq.rhs_den = detail::polynomial_factors(pk1, x, shift);
    if (f.boundary.kind == Boundary::Kind::open && k == f.boundary.M) {
      // -e_{-M-2i xi}(x) = -(x + xi - iM/2)/(x - xi + iM/2)
      const double md = static_cast<double>(f.boundary.M);
      eq.rhs_num.coef *= -1.0;
      eq.rhs_num.factors.push_back(detail::lin(x, 1.0, f.boundary.xi - I * md / 2.0));
      eq.rhs_den.factors.push_back(detail::lin(x, 1.0, -f.boundary.xi + I * md / 2.0));
    }
  }
  return sys;
}

inline std::vector<cplx> flatten(const BetheRootSet& r) {
  std::vector<cplx> z;
  for (const auto& l : r.roots) z.insert(z.end(), l.begin(), l.end());
  return z;
}

inline BetheRootSet unflatten(const BaeSystem& sys, const std::vector<cplx>& z) {
  BetheRootSet r;
  r.M = sys.M;
  for (std::size_t k = 0; k < sys.M.size(); ++k)
    r.roots.emplace_back(z.begin() + static_cast<long>(sys.offset[k]), z.begin() + static_cast<long>(sys.offset[k] + static_cast<std::size_t>(sys.M[k])));
  return r;
}

struct EquationSides {
  cplx lhs_num, lhs_den, rhs_num, rhs_den;
  cplx cleared() const { return lhs_num * rhs_den - rhs_num * lhs_den; }
  double weight() const { return std::abs(lhs_num * rhs_den) + std::abs(rhs_num * lhs_den); }
};

inline std::vector<EquationSides> bae_sides(const BaeSystem& sys, const std::vector<cplx>& z) {
  std::vector<EquationSides> out;
  for (const auto& eq : sys.equations)
    out.push_back({eq.lhs_num.value(z), eq.lhs_den.value(z), eq.rhs_num.value(z), eq.rhs_den.value(z)});
  return out;
}

// One residual per root in cleared-fraction form.
inline std::vector<cplx> bae_residual(const EigenvalueFormula& f, const BetheRootSet& r) {
  const auto sys = bae_system(f, r.M);
  std::vector<cplx> res;
  for (const auto& s : bae_sides(sys, flatten(r))) res.push_back(s.cleared());
  return res;
}

inline std::vector<cplx> bae_residual(const ChainSpec& spec, const BetheRootSet& r) { return bae_residual(make_formula(spec), r); }

inline double relative_residual(const BaeSystem& sys, const std::vector<cplx>& z) {
  double worst = 0.0;
  for (const auto& s : bae_sides(sys, z)) {
    const double w = s.weight();
    worst = std::max(worst, w == 0.0 ? 0.0 : std::abs(s.cleared()) / w);
  }
  return worst;
}

// Smallest |factor| / (1 + |root|) such that a factor of each cleared term
// (lhs_num * rhs_den and rhs_num * lhs_den) vanishes: zero when both sides of
// a Bethe equation are 0/0 or 0 = 0.
inline double singularity_margin(const BaeSystem& sys, const std::vector<cplx>& z) {
  double worst = 1e300;
  for (const auto& eq : sys.equations) {
    const double sc = 1.0 + std::abs(z[sys.offset[static_cast<std::size_t>(eq.level - 1)] + eq.index]);
    double ma = 1e300, mb = 1e300;
    for (const auto* t : {&eq.lhs_num, &eq.rhs_den})
      for (const auto& lf : t->factors) ma = std::min(ma, std::abs(lf.value(z)) / sc);
    for (const auto* t : {&eq.rhs_num, &eq.lhs_den})
      for (const auto& lf : t->factors) mb = std::min(mb, std::abs(lf.value(z)) / sc);
    worst = std::min(worst, std::max(ma, mb));
  }
  return worst;
}

// ---- solver -----------------------------------------------------------------

struct SolverStrategy {
  int grid_starts = 48;
  int random_starts = 160;
  std::uint64_t seed = 1;
  double tol = 1e-11;       // relative cleared residual
  double tol_dup = 1e-8;
  double singular_tol = 1e-7;
  int max_iterations = 100;
  std::size_t max_roots = 12;
  bool deflation = true;
};

struct SolveResult {
  std::vector<BetheRootSet> solutions;  // admissible, regular
  std::vector<BetheRootSet> singular;   // admissible but singular
  std::vector<BetheRootSet> rejected;   // converged, failed admissibility
  std::vector<std::string> log;
  int starts = 0;
  int jacobian_failures = 0;
};

namespace detail {

inline void canonicalize(BetheRootSet& r, bool reflected) {
  for (auto& level : r.roots) {
    if (reflected)
      for (auto& x : level)
        if (x.real() < 0.0 || (x.real() == 0.0 && x.imag() < 0.0)) x = -x;
    std::sort(level.begin(), level.end(), [](const cplx& a, const cplx& b) {
      if (std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
      return a.imag() < b.imag();
    });
  }
}

inline double set_distance(const BetheRootSet& a, const BetheRootSet& b, bool reflected) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.roots.size(); ++k) {
    const auto& la = a.roots[k];
    const auto& lb = b.roots[k];
    std::vector<std::size_t> perm(la.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    auto dist = [&](cplx x, cplx y) { return reflected ? std::min(std::abs(x - y), std::abs(x + y)) : std::abs(x - y); };
    if (la.size() <= 7) {
      do {
        double s = 0.0;
        for (std::size_t i = 0; i < la.size(); ++i) s = std::max(s, dist(la[i], lb[perm[i]]));
        best = std::min(best, s);
      } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
      best = 0.0;
      for (std::size_t i = 0; i < la.size(); ++i) best = std::max(best, dist(la[i], lb[i]));
    }
    d = std::max(d, la.empty() ? 0.0 : best);
  }
  return d;
}

// z - s with s permuted (and sign-flipped for reflected roots) to best match z.
inline std::vector<cplx> aligned_difference(const BaeSystem& sys, const std::vector<cplx>& z, const std::vector<cplx>& s) {
  std::vector<cplx> out(z.size());
  for (std::size_t k = 0; k < sys.M.size(); ++k) {
    const std::size_t off = sys.offset[k];
    const std::size_t m = static_cast<std::size_t>(sys.M[k]);
    std::vector<std::size_t> perm(m), best_perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    best_perm = perm;
    auto term = [&](std::size_t i, std::size_t j) {
      cplx a = z[off + i] - s[off + j];
      if (sys.reflected) {
        cplx b = z[off + i] + s[off + j];
        if (std::abs(b) < std::abs(a)) a = b;
      }
      return a;
    };
    if (m <= 7) {
      double best = 1e300;
      do {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += std::norm(term(i, perm[i]));
        if (sum < best) {
          best = sum;
          best_perm = perm;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    for (std::size_t i = 0; i < m; ++i) out[off + i] = term(i, best_perm[i]);
  }
  return out;
}

struct NewtonOutcome {
  bool converged = false;
  bool jacobian_failure = false;
  int iterations = 0;
  double residual = 0.0;
};

inline void evaluate_system(const BaeSystem& sys, const std::vector<cplx>& z, std::vector<cplx>& f, CMatrix& jac, std::vector<double>& w) {
  const std::size_t n = sys.size();
  f.assign(n, 0.0);
  w.assign(n, 0.0);
  jac = CMatrix(n, n);
  std::vector<cplx> g1(n), g2(n), g3(n), g4(n);
  for (std::size_t e = 0; e < n; ++e) {
    const auto& eq = sys.equations[e];
    const cplx ln = eq.lhs_num.value_and_gradient(z, g1);
    const cplx ld = eq.lhs_den.value_and_gradient(z, g2);
    const cplx rn = eq.rhs_num.value_and_gradient(z, g3);
    const cplx rd = eq.rhs_den.value_and_gradient(z, g4);
    f[e] = ln * rd - rn * ld;
    w[e] = std::abs(ln * rd) + std::abs(rn * ld);
    for (std::size_t v = 0; v < n; ++v) jac(e, v) = g1[v] * rd + ln * g4[v] - g3[v] * ld - rn * g2[v];
  }
}

inline double merit(const std::vector<cplx>& f, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t e = 0; e < f.size(); ++e) s += std::norm(f[e]) / std::max(w[e] * w[e], 1e-300);
  return s;
}

inline double rel_of(const std::vector<cplx>& f, const std::vector<double>& w) {
  double r = 0.0;
  for (std::size_t e = 0; e < f.size(); ++e) r = std::max(r, w[e] == 0.0 ? 0.0 : std::abs(f[e]) / w[e]);
  return r;
}

inline NewtonOutcome newton(const BaeSystem& sys, std::vector<cplx>& z, const std::vector<std::vector<cplx>>& known, const SolverStrategy& st) {
  NewtonOutcome out;
  std::vector<cplx> f;
  std::vector<double> w;
  CMatrix jac;
  for (int it = 0; it < st.max_iterations; ++it) {
    evaluate_system(sys, z, f, jac, w);
    out.residual = rel_of(f, w);
    out.iterations = it;
    if (out.residual < st.tol) {
      out.converged = true;
      break;
    }
    std::vector<cplx> rhs(f.size());
    for (std::size_t e = 0; e < f.size(); ++e) rhs[e] = -f[e];
    auto step = lu_solve(jac, rhs);
    if (!step) {
      out.jacobian_failure = true;
      return out;
    }
    auto d = *step;
    if (st.deflation && !known.empty()) {
      // Sherman-Morrison update for the deflated operator m(z) F(z)
      cplx gd = 0.0;
      for (const auto& s : known) {
        auto diff = aligned_difference(sys, z, s);
        double rho = 0.0;
        for (const auto& v : diff) rho += std::norm(v);
        if (rho == 0.0) continue;
        for (std::size_t v = 0; v < z.size(); ++v) gd += -std::conj(diff[v]) * d[v] / (rho * (1.0 + rho));
      }
      if (std::abs(1.0 - gd) > 1e-12) {
        const cplx scale = 1.0 / (1.0 - gd);
        for (auto& v : d) v *= scale;
      }
    }
    const double m0 = merit(f, w);
    double t = 1.0;
    bool accepted = false;
    std::vector<cplx> trial(z.size()), f2;
    std::vector<double> w2;
    CMatrix j2;
    for (int ls = 0; ls < 12; ++ls) {
      for (std::size_t v = 0; v < z.size(); ++v) trial[v] = z[v] + t * d[v];
      std::vector<cplx> ft;
      for (const auto& s : bae_sides(sys, trial)) ft.push_back(s.cleared());
      if (merit(ft, w) < (1.0 - 1e-4 * t) * m0) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    z = trial;  // take the shortest step when no decrease was found
    if (!accepted && t < 1e-3) {
      evaluate_system(sys, z, f, jac, w);
      out.residual = rel_of(f, w);
      out.converged = out.residual < st.tol;
      return out;
    }
    for (const auto& v : z)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > 1e6) return out;
  }
  return out;
}

// Undeflated Newton polishing.
inline double polish(const BaeSystem& sys, std::vector<cplx>& z) {
  std::vector<cplx> f;
  std::vector<double> w;
  CMatrix jac;
  evaluate_system(sys, z, f, jac, w);
  double best = rel_of(f, w);
  for (int it = 0; it < 6 && best > 0.0; ++it) {
    std::vector<cplx> rhs(f.size());
    for (std::size_t e = 0; e < f.size(); ++e) rhs[e] = -f[e];
    auto step = lu_solve(jac, rhs);
    if (!step) break;
    std::vector<cplx> trial(z.size());
    for (std::size_t v = 0; v < z.size(); ++v) trial[v] = z[v] + (*step)[v];
    std::vector<cplx> f2;
    std::vector<double> w2;
    CMatrix j2;
    evaluate_system(sys, trial, f2, j2, w2);
    const double r = rel_of(f2, w2);
    if (!(r < best)) break;
    best = r;
    z = trial;
    f = f2;
    w = w2;
    jac = j2;
  }
  return best;
}

inline double seed_spread(const ChainSpec& spec) {
  double s = 0.0;
  for (const auto& site : spec.sites) s = std::max(s, std::abs(site.a));
  if (spec.boundary.kind == Boundary::Kind::open) s = std::max(s, std::abs(spec.boundary.xi));
  return 1.0 + s;
}

// Deterministic seed pattern number g.
inline std::vector<cplx> grid_seed(const BaeSystem& sys, int g, double spread) {
  static const double widths[] = {0.35, 0.7, 1.2, 2.0};
  static const double imag_offsets[] = {0.0, -0.5, 0.5, -1.0};
  const double width = widths[g % 4] * spread;
  const int pattern = (g / 4) % 4;
  const double ioff = imag_offsets[(g / 16) % 4];
  std::vector<cplx> z;
  for (std::size_t k = 0; k < sys.M.size(); ++k) {
    const int m = sys.M[k];
    for (int n = 0; n < m; ++n) {
      double re;
      if (sys.reflected)
        re = width * (static_cast<double>(n) + 0.6) / std::max(1, m) + 0.05;
      else
        re = width * (static_cast<double>(n) - 0.5 * (m - 1)) / std::max(1, m);
      cplx x(re + 0.0137 * static_cast<double>(n + 1) * (pattern == 3 ? 1.0 : 0.0), ioff);
      if (pattern == 1 || pattern == 2) {
        // two-strings: pair (2p, 2p+1) shares a centre, split by +-i/2
        const int p = n / 2;
        const bool paired = 2 * p + 1 < m;
        if (paired) {
          double centre = sys.reflected ? width * (static_cast<double>(p) + 0.6) / std::max(1, m) + 0.05
                                        : width * (static_cast<double>(2 * p) + 0.5 - 0.5 * (m - 1)) / std::max(1, m);
          if (pattern == 2 && !sys.reflected) centre = 0.0;
          x = cplx(centre, ioff) + (n % 2 == 0 ? 0.5 * I : -0.5 * I);
        }
      }
      z.push_back(x);
    }
  }
  return z;
}

}  // namespace detail

inline bool roots_admissible(const BetheRootSet& r, bool reflected, double tol_dup, std::string& why) {
  for (std::size_t k = 0; k < r.roots.size(); ++k) {
    const auto& l = r.roots[k];
    for (std::size_t a = 0; a < l.size(); ++a) {
      if (!std::isfinite(l[a].real()) || !std::isfinite(l[a].imag()) || std::abs(l[a]) > 1e5) {
        why = "root at infinity";
        return false;
      }
      if (reflected && std::abs(l[a]) < 1e-6) {
        why = "self-mirror root at 0";
        return false;
      }
      for (std::size_t b = a + 1; b < l.size(); ++b) {
        if (std::abs(l[a] - l[b]) < tol_dup) {
          why = "coinciding roots at level " + std::to_string(k + 1);
          return false;
        }
        if (reflected && std::abs(l[a] + l[b]) < tol_dup) {
          why = "mirror pair at level " + std::to_string(k + 1);
          return false;
        }
      }
    }
  }
  return true;
}

inline SolveResult solve_bae(const EigenvalueFormula& f, const ChainSpec& spec, const std::vector<int>& M, const SolverStrategy& st = {}) {
  SolveResult out;
  const BaeSystem sys = bae_system(f, M);
  const bool reflected = sys.reflected;
  if (sys.size() == 0) {
    BetheRootSet r = BetheRootSet::empty(f.N);
    r.seed = st.seed;
    out.solutions.push_back(r);
    return out;
  }
  if (sys.size() > st.max_roots) throw Error(ErrorKind::invalid_argument, "too many roots for dense search");
  const double spread = detail::seed_spread(spec);
  std::mt19937_64 rng(st.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::vector<cplx>> known;
  std::vector<BetheRootSet> found;

  auto accept = [&](std::vector<cplx> z, int start, int iters) {
    const double res = detail::polish(sys, z);
    BetheRootSet r = unflatten(sys, z);
    r.residual = res;
    r.iterations = iters;
    r.seed = st.seed;
    r.start = start;
    const bool singular = singularity_margin(sys, z) < st.singular_tol;
    detail::canonicalize(r, reflected);
    for (const auto& s : found)
      if (detail::set_distance(s, r, reflected) < 1e-7) return;
    found.push_back(r);
    known.push_back(z);
    std::string why;
    if (!(res < st.tol) && !singular) {
      return;  // lost accuracy while polishing; keep only as a deflation point
    }
    if (!roots_admissible(r, reflected, st.tol_dup, why)) {
      r.note = why;
      out.rejected.push_back(r);
      return;
    }
    if (singular) {
      r.singular = true;
      r.note = "both sides of a Bethe equation vanish";
      out.singular.push_back(r);
      return;
    }
    out.solutions.push_back(r);
  };

  const int total = st.grid_starts + st.random_starts;
  for (int s = 0; s < total; ++s) {
    std::vector<cplx> z;
    if (s < st.grid_starts) {
      z = detail::grid_seed(sys, s, spread);
    } else {
      for (std::size_t k = 0; k < sys.M.size(); ++k) {
        for (int n = 0; n < sys.M[k]; ++n) {
          double re = gauss(rng) * spread, im = gauss(rng) * spread * 0.6;
          if (reflected) re = std::abs(re);
          z.emplace_back(re, im);
        }
        if (sys.M[k] >= 2 && unif(rng) < 0.3) {
          const std::size_t off = sys.offset[k];
          z[off + 1] = z[off] - I;
        }
      }
    }
    ++out.starts;
    // exact seeds (e.g. singular strings) are accepted without iterating
    auto outcome = detail::newton(sys, z, known, st);
    if (outcome.jacobian_failure) {
      ++out.jacobian_failures;
      if (relative_residual(sys, z) < st.tol || singularity_margin(sys, z) < st.singular_tol) {
        if (relative_residual(sys, z) < st.tol) accept(z, s, outcome.iterations);
        continue;
      }
      out.log.push_back("start " + std::to_string(s) + ": singular Jacobian, candidate discarded");
      continue;
    }
    if (!outcome.converged) continue;
    accept(z, s, outcome.iterations);
  }
  auto order = [](const BetheRootSet& a, const BetheRootSet& b) {
    const auto za = flatten(a), zb = flatten(b);
    for (std::size_t v = 0; v < za.size(); ++v) {
      if (std::abs(za[v].real() - zb[v].real()) > 1e-9) return za[v].real() < zb[v].real();
      if (std::abs(za[v].imag() - zb[v].imag()) > 1e-9) return za[v].imag() < zb[v].imag();
    }
    return false;
  };
  std::sort(out.solutions.begin(), out.solutions.end(), order);
  std::sort(out.singular.begin(), out.singular.end(), order);
  std::sort(out.rejected.begin(), out.rejected.end(), order);
  return out;
}

inline SolveResult solve_bae(const ChainSpec& spec, const std::vector<int>& M, const SolverStrategy& st = {}) {
  return solve_bae(make_formula(spec), spec, M, st);
}

}  // namespace glb
