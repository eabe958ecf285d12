#pragma once
// Identity and commutativity tables shared by the CLI and the acceptance run.

#include "glbethe/chain.hpp"
#include "glbethe/oracle.hpp"

#include <string>
#include <utility>
#include <vector>

namespace glb {

struct CheckRow {
  std::string name;
  double value = 0.0;  // worst residual over the sample points
  double tol = 0.0;
  bool exact = false;  // exact mode: pass means every residual is exactly zero
  bool pass = false;
};

// Deterministic rational sample pairs (l, m).
inline std::vector<std::pair<GaussianRational, GaussianRational>> rational_points(int count) {
  std::vector<std::pair<GaussianRational, GaussianRational>> out;
  for (int k = 0; k < count; ++k)
    out.push_back({GaussianRational::frac(2 * k + 1, 3, k - 2, 5), GaussianRational::frac(3 - k, 4, 2 * k + 1, 7)});
  return out;
}

namespace detail {

template <class T>
T point_as(const GaussianRational& z) {
  if constexpr (std::is_same_v<T, GaussianRational>)
    return z;
  else
    return z.to_complex();
}

template <class T, class F>
CheckRow identity_row(const std::string& name, const std::vector<std::pair<GaussianRational, GaussianRational>>& pts, double tol, F&& f) {
  CheckRow row;
  row.name = name;
  row.tol = tol;
  row.exact = std::is_same_v<T, GaussianRational>;
  bool all_zero = true;
  for (const auto& [l, m] : pts) {
    const auto r = f(point_as<T>(l), point_as<T>(m));
    row.value = std::max(row.value, row.exact ? r.absolute : r.relative);
    all_zero = all_zero && r.exact_zero;
  }
  row.pass = row.exact ? all_zero : row.value < tol;
  return row;
}

inline ChainSpec identity_chain(int n, Boundary b) {
  ChainSpec spec;
  spec.N = n;
  const Irrep rep = make_irrep(n, RepKind::fundamental());
  spec.sites = {{rep, cplx(0.5, 0.0)}, {rep, cplx(-0.25, 0.0)}};
  spec.boundary = std::move(b);
  return spec;
}

}  // namespace detail

// Yang-Baxter, unitarity, RTT, reflection and twisted relations for rank n.
// Exact mode demands exact zeros; floating mode compares relative residuals
// to tol.
template <class T>
std::vector<CheckRow> identity_table(int n, int points, double tol) {
  const auto pts = rational_points(points);
  const std::string suffix = " N=" + std::to_string(n);
  std::vector<CheckRow> rows;
  rows.push_back(detail::identity_row<T>("yang-baxter" + suffix, pts, tol, [&](const T& l, const T& m) { return yang_baxter_residual<T>(n, l, m); }));
  rows.push_back(detail::identity_row<T>("unitarity" + suffix, pts, tol, [&](const T& l, const T&) { return unitarity_residual<T>(n, l); }));
  const auto closed = detail::identity_chain(n, Boundary::closed());
  rows.push_back(detail::identity_row<T>("rtt" + suffix, pts, tol, [&](const T& l, const T& m) { return rtt_residual<T>(closed, l, m); }));
  for (int m = 1; m <= n - 1; ++m) {
    const auto open = detail::identity_chain(n, Boundary::open(m, cplx(0.75, 0.0)));
    rows.push_back(detail::identity_row<T>("reflection M=" + std::to_string(m) + suffix, pts, tol,
                                           [&](const T& l, const T& mu) { return reflection_residual<T>(open, l, mu); }));
  }
  CMatrix anti(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (std::size_t a = 0; a < anti.rows(); ++a) anti(a, anti.rows() - 1 - a) = 1.0;
  for (const auto& [label, k] : {std::pair<std::string, CMatrix>{"identity", CMatrix::identity(static_cast<std::size_t>(n))}, {"antidiagonal", anti}}) {
    const auto snp = detail::identity_chain(n, Boundary::snp(k));
    rows.push_back(detail::identity_row<T>("twisted K=" + label + suffix, pts, tol, [&](const T& a, const T& b) { return twisted_residual<T>(snp, a, b); }));
  }
  return rows;
}

// Open transfer matrix in the inverted normalization.
inline CMatrix normalized_transfer(const ChainSpec& spec, cplx lambda) {
  return transfer<cplx>(spec, lambda) * (1.0 / transfer_denominator<cplx>(spec, lambda));
}

// ||[A, B]|| / max(1, ||A|| ||B||) in the max norm.
inline double relative_commutator(const CMatrix& a, const CMatrix& b) {
  return commutator_norm(a, b) / std::max(1.0, a.max_norm() * b.max_norm());
}

// Commutativity of transfer matrices at the given pairs of points.
inline CheckRow transfer_commutativity(const std::string& name, const ChainSpec& spec, const std::vector<std::pair<cplx, cplx>>& pts, double tol) {
  CheckRow row{name, 0.0, tol, false, false};
  for (const auto& [l, m] : pts) row.value = std::max(row.value, relative_commutator(normalized_transfer(spec, l), normalized_transfer(spec, m)));
  row.pass = row.value < tol;
  return row;
}

// Largest commutator of t(lambda) with the coproduct generators e_ij for
// (i, j) in the given list.
inline double symmetry_commutator(const ChainSpec& spec, cplx lambda, const std::vector<std::pair<int, int>>& gens) {
  const CMatrix t = normalized_transfer(spec, lambda);
  double worst = 0.0;
  for (const auto& [i, j] : gens) worst = std::max(worst, relative_commutator(t, coproduct_generator(spec, i, j)));
  return worst;
}

// Generators of gl(N) (all pairs), or of gl(M) + gl(N-M) for open chains.
inline std::vector<std::pair<int, int>> symmetry_generators(const ChainSpec& spec) {
  std::vector<std::pair<int, int>> g;
  for (int i = 0; i < spec.N; ++i)
    for (int j = 0; j < spec.N; ++j) {
      if (spec.boundary.kind == Boundary::Kind::open && ((i < spec.boundary.M) != (j < spec.boundary.M))) continue;
      if (spec.boundary.kind == Boundary::Kind::snp && i != j) continue;
      g.push_back({i, j});
    }
  return g;
}

inline std::vector<std::pair<cplx, cplx>> commutator_points() {
  return {{cplx(0.31, 0.17), cplx(-0.42, 0.28)}, {cplx(1.3, -0.2), cplx(0.05, 0.61)}, {cplx(-0.7, -0.45), cplx(0.9, 0.33)}};
}

struct AffineFit {
  cplx slope{};
  cplx offset{};
  double residual = 0.0;  // max |H - slope S - offset 1| / max |H|
};

// Least-squares H ~ slope S + offset 1 over all matrix entries.
inline AffineFit affine_fit(const CMatrix& h, const CMatrix& s) {
  const std::size_t n = h.rows();
  cplx ss{}, st{}, sd{}, sh{}, th{};
  const double tt = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ss += std::norm(s(i, j));
      sh += std::conj(s(i, j)) * h(i, j);
    }
  for (std::size_t i = 0; i < n; ++i) {
    st += std::conj(s(i, i));
    sd += s(i, i);
    th += h(i, i);
  }
  // [ss st; sd tt] [slope; offset] = [sh; th]
  const cplx det = ss * tt - st * sd;
  AffineFit f;
  if (std::abs(det) == 0.0) {
    f.offset = th / tt;
  } else {
    f.slope = (sh * tt - st * th) / det;
    f.offset = (ss * th - sd * sh) / det;
  }
  CMatrix r = h - s * f.slope;
  for (std::size_t i = 0; i < n; ++i) r(i, i) -= f.offset;
  f.residual = r.max_norm() / std::max(h.max_norm(), 1e-300);
  return f;
}

}  // namespace glb
