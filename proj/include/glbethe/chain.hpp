#pragma once
// R-matrix, monodromy and transfer matrices for closed, open and
// soliton non-preserving (SNP) boundaries.

#include "glbethe/error.hpp"
#include "glbethe/linalg.hpp"
#include "glbethe/matrix.hpp"
#include "glbethe/repr.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace glb {

struct Boundary {
  enum class Kind { closed, open, snp };
  Kind kind = Kind::closed;
  int M = 1;                 // open: size of the +lambda block of E_M
  cplx xi{1.0, 0.0};         // open: K(lambda) = U (lambda E_M + xi) U^-1
  std::optional<CMatrix> U;  // open: identity when empty
  CMatrix Ktilde;            // snp: constant matrix

  static Boundary closed() { return {}; }
  static Boundary open(int m, cplx xi, std::optional<CMatrix> u = std::nullopt) {
    Boundary b;
    b.kind = Kind::open;
    b.M = m;
    b.xi = xi;
    b.U = std::move(u);
    return b;
  }
  static Boundary snp(CMatrix k) {
    Boundary b;
    b.kind = Kind::snp;
    b.Ktilde = std::move(k);
    return b;
  }
  bool has_identity_U() const {
    if (!U) return true;
    return (*U - CMatrix::identity(U->rows())).max_norm() == 0.0;
  }
};

inline const char* to_string(Boundary::Kind k) {
  switch (k) {
    case Boundary::Kind::closed: return "closed";
    case Boundary::Kind::open: return "open";
    case Boundary::Kind::snp: return "snp";
  }
  return "?";
}

struct ChainSpec {
  int N = 2;
  std::vector<SiteSpec> sites;
  Boundary boundary;
  std::size_t max_dim = 4096;

  std::vector<std::size_t> site_dims() const {
    std::vector<std::size_t> d;
    for (const auto& s : sites) d.push_back(s.irrep.dim());
    return d;
  }
  std::size_t quantum_dim() const { return product_of(site_dims()); }
  std::size_t length() const { return sites.size(); }

  void validate() const {
    if (N < 2) throw Error(ErrorKind::invalid_argument, "rank must be at least 2");
    if (sites.empty()) throw Error(ErrorKind::invalid_argument, "chain needs at least one site");
    for (const auto& s : sites)
      if (s.irrep.rank() != N) throw Error(ErrorKind::invalid_argument, "site rank differs from chain rank");
    double dim = 1.0;
    for (const auto& s : sites) dim *= static_cast<double>(s.irrep.dim());
    if (dim > static_cast<double>(max_dim))
      throw Error(ErrorKind::dimension_cap, "quantum dimension " + std::to_string(static_cast<long long>(dim)) +
                                                " exceeds cap " + std::to_string(max_dim));
    if (boundary.kind == Boundary::Kind::open) {
      if (boundary.M < 1 || boundary.M > N - 1)
        throw Error(ErrorKind::config, "M out of range 1..N-1 (got " + std::to_string(boundary.M) + ")");
      if (boundary.U) {
        if (boundary.U->rows() != static_cast<std::size_t>(N) || boundary.U->cols() != static_cast<std::size_t>(N))
          throw Error(ErrorKind::invalid_argument, "U must be N x N");
        if (!inverse(*boundary.U)) throw Error(ErrorKind::invalid_argument, "U is not invertible");
      }
    }
    if (boundary.kind == Boundary::Kind::snp) {
      if (boundary.Ktilde.rows() != static_cast<std::size_t>(N) || boundary.Ktilde.cols() != static_cast<std::size_t>(N))
        throw Error(ErrorKind::invalid_argument, "Ktilde must be N x N");
    }
  }
};

inline ChainSpec homogeneous_chain(int n, int length, RepKind kind = RepKind::fundamental(), Boundary b = Boundary::closed()) {
  ChainSpec spec;
  spec.N = n;
  Irrep rep = make_irrep(n, kind);
  for (int j = 0; j < length; ++j) spec.sites.push_back({rep, {0.0, 0.0}});
  spec.boundary = std::move(b);
  return spec;
}

// R(mu) = mu 1 - i P on C^N (x) C^N.
template <class T = cplx>
OperatorMatrix<T> r_matrix(int n, const T& mu) {
  const auto un = static_cast<std::size_t>(n);
  Matrix<T> r = permutation<T>(un) * (-Field<T>::imag_unit());
  for (std::size_t k = 0; k < un * un; ++k) r(k, k) += mu;
  return {r, {{"aux1", un}, {"aux2", un}}};
}

// Rc(u) = u 1 + i P = -R(-u): the form in which the exchange relations close.
template <class T = cplx>
Matrix<T> exchange_r(int n, const T& u) {
  return r_matrix<T>(n, -u).data * Field<T>::from_int(-1);
}

template <class T = cplx>
std::vector<std::size_t> chain_legs(const ChainSpec& spec) {
  std::vector<std::size_t> dims{static_cast<std::size_t>(spec.N)};
  for (auto d : spec.site_dims()) dims.push_back(d);
  return dims;
}

template <class T = cplx>
std::vector<Leg> leg_labels(const ChainSpec& spec) {
  std::vector<Leg> legs{{"aux", static_cast<std::size_t>(spec.N)}};
  for (std::size_t j = 0; j < spec.sites.size(); ++j) legs.push_back({"site" + std::to_string(j + 1), spec.sites[j].irrep.dim()});
  return legs;
}

// T(lambda) = L_1(lambda) ... L_l(lambda), legs (aux, site_1, ..., site_l).
template <class T = cplx>
OperatorMatrix<T> monodromy(const ChainSpec& spec, const T& lambda) {
  const auto dims = chain_legs(spec);
  Matrix<T> m = Matrix<T>::identity(product_of(dims));
  for (std::size_t j = 0; j < spec.sites.size(); ++j) {
    LegSplit split(dims, {0, j + 1});
    right_multiply_local(m, evaluation_L<T>(spec.sites[j], lambda).data, split);
  }
  return {m, leg_labels(spec)};
}

template <class T = cplx>
Matrix<T> k_matrix(const Boundary& b, int n, const T& lambda) {
  const auto un = static_cast<std::size_t>(n);
  Matrix<T> k(un, un);
  for (std::size_t a = 0; a < un; ++a) k(a, a) = (static_cast<int>(a) < b.M ? lambda : -lambda) + from_complex<T>(b.xi);
  if (b.has_identity_U()) return k;
  if constexpr (std::is_same_v<T, cplx>) {
    return (*b.U) * k * (*inverse(*b.U));
  } else {
    throw Error(ErrorKind::invalid_argument, "exact mode supports U = identity only");
  }
}

template <class T>
Matrix<T> to_field(const CMatrix& m) {
  Matrix<T> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = from_complex<T>(m(i, j));
  return out;
}

// Product of adjugates adj L_l(-lambda) ... adj L_1(-lambda) applied from the right.
template <class T>
void right_multiply_inverse_numerator(Matrix<T>& m, const ChainSpec& spec, const T& lambda, const std::vector<std::size_t>& dims) {
  for (std::size_t j = spec.sites.size(); j-- > 0;) {
    LegSplit split(dims, {0, j + 1});
    right_multiply_local(m, evaluation_L_adjugate<T>(spec.sites[j].irrep, -lambda + from_complex<T>(spec.sites[j].a)), split);
  }
}

template <class T>
T inverse_denominator(const ChainSpec& spec, const T& lambda) {
  T d = Field<T>::one();
  for (const auto& s : spec.sites) d *= evaluation_L_det_factor<T>(s.irrep, -lambda + from_complex<T>(s.a));
  return d;
}

template <class T>
struct BoundaryMonodromy {
  OperatorMatrix<T> numerator;
  T denominator;
};

// The argument of the transposed monodromy in the SNP construction.
template <class T>
T snp_reflected(int n, const T& lambda) {
  // -lambda + i rho with rho = -N/2
  return -lambda - Field<T>::imag_unit() * (Field<T>::from_int(n) / Field<T>::from_int(2));
}

// Open: T(lambda) K(lambda) T(-lambda)^-1 as (numerator, scalar denominator).
// SNP: T(lambda) Ktilde T^{t_a}(-lambda + i rho), denominator 1.
template <class T = cplx>
BoundaryMonodromy<T> boundary_monodromy(const ChainSpec& spec, const T& lambda) {
  const auto dims = chain_legs(spec);
  const auto un = static_cast<std::size_t>(spec.N);
  if (spec.boundary.kind == Boundary::Kind::open) {
    Matrix<T> m = monodromy<T>(spec, lambda).data;
    right_multiply_local(m, k_matrix<T>(spec.boundary, spec.N, lambda), LegSplit(dims, {0}));
    right_multiply_inverse_numerator(m, spec, lambda, dims);
    return {{m, leg_labels(spec)}, inverse_denominator(spec, lambda)};
  }
  if (spec.boundary.kind == Boundary::Kind::snp) {
    Matrix<T> m = monodromy<T>(spec, lambda).data;
    right_multiply_local(m, to_field<T>(spec.boundary.Ktilde), LegSplit(dims, {0}));
    Matrix<T> tt = transpose_first_leg(monodromy<T>(spec, snp_reflected(spec.N, lambda)).data, un);
    return {{m * tt, leg_labels(spec)}, Field<T>::one()};
  }
  throw Error(ErrorKind::invalid_argument, "boundary_monodromy needs an open or snp boundary");
}

// Open boundary with explicit inversion: fails at poles of T(-lambda)^-1.
inline OperatorMatrix<cplx> boundary_monodromy_inverted(const ChainSpec& spec, cplx lambda, double pole_tol = 1e-12) {
  for (std::size_t j = 0; j < spec.sites.size(); ++j) {
    cplx d = evaluation_L_det_factor<cplx>(spec.sites[j].irrep, -lambda + spec.sites[j].a);
    if (std::abs(d) < pole_tol)
      throw Error(ErrorKind::spectral_pole, "L(-lambda) is singular at site " + std::to_string(j + 1));
  }
  auto bm = boundary_monodromy<cplx>(spec, lambda);
  bm.numerator.data *= (1.0 / bm.denominator);
  return bm.numerator;
}

// Transfer matrix on the quantum space. Open chains are returned in the
// adjugate (numerator) normalization; divide by transfer_denominator for
// the inverted form.
template <class T = cplx>
Matrix<T> transfer(const ChainSpec& spec, const T& lambda) {
  const auto un = static_cast<std::size_t>(spec.N);
  if (spec.boundary.kind == Boundary::Kind::closed) return trace_first_leg(monodromy<T>(spec, lambda).data, un);
  return trace_first_leg(boundary_monodromy<T>(spec, lambda).numerator.data, un);
}

template <class T = cplx>
T transfer_denominator(const ChainSpec& spec, const T& lambda) {
  if (spec.boundary.kind == Boundary::Kind::open) return inverse_denominator(spec, lambda);
  return Field<T>::one();
}

// Delta(e_ij) = sum over sites of pi(e_ij) on the quantum space.
inline CMatrix coproduct_generator(const ChainSpec& spec, int i, int j) {
  const auto dims = spec.site_dims();
  CMatrix out(product_of(dims), product_of(dims));
  for (std::size_t s = 0; s < spec.sites.size(); ++s)
    out += embed(spec.sites[s].irrep.generator<cplx>(i, j), dims, {s});
  return out;
}

struct HamiltonianResult {
  CMatrix H;
  double extrapolation_error = 0.0;  // |D(h2) - D(h1)| / ((h1/h2)^2 - 1), max norm
};

namespace detail {
template <class F>
HamiltonianResult richardson_derivative(F&& f) {
  constexpr double h1 = 1e-3;
  constexpr double h2 = 1e-4;
  CMatrix d1 = (f(cplx(h1)) - f(cplx(-h1))) * cplx(1.0 / (2.0 * h1));
  CMatrix d2 = (f(cplx(h2)) - f(cplx(-h2))) * cplx(1.0 / (2.0 * h2));
  const double ratio = (h1 / h2) * (h1 / h2) - 1.0;
  CMatrix corr = (d2 - d1) * cplx(1.0 / ratio);
  return {d2 + corr, corr.max_norm()};
}
}  // namespace detail

// closed: t'(0) t(0)^-1; open: -(1/2) b'(0) with b in the inverted normalization.
inline HamiltonianResult hamiltonian(const ChainSpec& spec) {
  spec.validate();
  for (std::size_t j = 0; j < spec.sites.size(); ++j) {
    const auto& s = spec.sites[j];
    if (s.irrep.kind().kind != RepKind::Kind::fundamental || std::abs(s.a) != 0.0)
      throw Error(ErrorKind::locality_unavailable, "site " + std::to_string(j + 1) + " is not a homogeneous fundamental site");
  }
  if (spec.boundary.kind == Boundary::Kind::closed) {
    auto t0inv = inverse(transfer<cplx>(spec, cplx(0.0)));
    if (!t0inv) throw Error(ErrorKind::non_convergence, "t(0) is singular");
    auto d = detail::richardson_derivative([&](cplx l) { return transfer<cplx>(spec, l); });
    d.H = d.H * (*t0inv);
    d.extrapolation_error *= t0inv->max_norm();
    return d;
  }
  if (spec.boundary.kind == Boundary::Kind::open) {
    auto d = detail::richardson_derivative([&](cplx l) {
      return transfer<cplx>(spec, l) * (1.0 / transfer_denominator<cplx>(spec, l));
    });
    d.H *= cplx(-0.5);
    d.extrapolation_error *= 0.5;
    return d;
  }
  throw Error(ErrorKind::locality_unavailable, "no local Hamiltonian for the snp boundary");
}

// Sum of nearest-neighbour permutations (periodic).
inline CMatrix periodic_permutation_sum(const ChainSpec& spec) {
  const auto dims = spec.site_dims();
  const std::size_t l = dims.size();
  const std::size_t n = static_cast<std::size_t>(spec.N);
  CMatrix out(product_of(dims), product_of(dims));
  if (l < 2) return out;
  for (std::size_t s = 0; s < l; ++s) {
    std::size_t t = (s + 1) % l;
    if (l == 2 && s == 1) t = 0;
    std::vector<std::size_t> active = s < t ? std::vector<std::size_t>{s, t} : std::vector<std::size_t>{t, s};
    out += embed(permutation<cplx>(n), dims, active);
  }
  return out;
}

// ---- exchange-relation residuals -------------------------------------------

template <class T>
struct IdentityResidual {
  double absolute = 0.0;
  double relative = 0.0;  // absolute / max(1, max-norm of one side)
  bool exact_zero = false;
};

template <class T>
IdentityResidual<T> residual_of(const Matrix<T>& lhs, const Matrix<T>& rhs) {
  IdentityResidual<T> r;
  const Matrix<T> diff = lhs - rhs;
  r.absolute = diff.max_norm();
  r.exact_zero = diff.is_zero();
  r.relative = r.absolute / std::max(1.0, lhs.max_norm());
  return r;
}

// R12(l-m) R13(l) R23(m) = R23(m) R13(l) R12(l-m)
template <class T = cplx>
IdentityResidual<T> yang_baxter_residual(int n, const T& l, const T& m) {
  const auto un = static_cast<std::size_t>(n);
  const std::vector<std::size_t> dims{un, un, un};
  auto r12 = embed(r_matrix<T>(n, l - m).data, dims, {0, 1});
  auto r13 = embed(r_matrix<T>(n, l).data, dims, {0, 2});
  auto r23 = embed(r_matrix<T>(n, m).data, dims, {1, 2});
  return residual_of(r12 * r13 * r23, r23 * r13 * r12);
}

// R12(mu) R21(-mu) + (mu^2 + 1) 1
template <class T = cplx>
IdentityResidual<T> unitarity_residual(int n, const T& mu) {
  const auto un = static_cast<std::size_t>(n);
  auto r = r_matrix<T>(n, mu).data;
  auto p = permutation<T>(un);
  auto r21 = p * r_matrix<T>(n, -mu).data * p;
  Matrix<T> rhs = Matrix<T>::identity(un * un) * (-(mu * mu + Field<T>::one()));
  return residual_of(r * r21, rhs);
}

namespace detail {
// Embed an operator on (aux, quantum) into (aux1, aux2, quantum) on aux slot `slot`.
template <class T>
Matrix<T> two_aux(const Matrix<T>& op, std::size_t n, std::size_t d, std::size_t slot) {
  return embed(op, {n, n, d}, {slot, 2});
}
}  // namespace detail

// R(mu - l) T1(l) T2(mu) = T2(mu) T1(l) R(mu - l)
template <class T = cplx>
IdentityResidual<T> rtt_residual(const ChainSpec& spec, const T& l, const T& mu) {
  const auto n = static_cast<std::size_t>(spec.N);
  const std::size_t d = spec.quantum_dim();
  auto t1 = detail::two_aux(monodromy<T>(spec, l).data, n, d, 0);
  auto t2 = detail::two_aux(monodromy<T>(spec, mu).data, n, d, 1);
  auto r = embed(r_matrix<T>(spec.N, mu - l).data, {n, n, d}, {0, 1});
  return residual_of(r * t1 * t2, t2 * t1 * r);
}

// Rc(l-m) B1(l) Rc(l+m) B2(m) = B2(m) Rc(l+m) B1(l) Rc(l-m)
template <class T = cplx>
IdentityResidual<T> reflection_residual(const ChainSpec& spec, const T& l, const T& m) {
  const auto n = static_cast<std::size_t>(spec.N);
  const std::size_t d = spec.quantum_dim();
  auto b1 = detail::two_aux(boundary_monodromy<T>(spec, l).numerator.data, n, d, 0);
  auto b2 = detail::two_aux(boundary_monodromy<T>(spec, m).numerator.data, n, d, 1);
  auto ra = embed(exchange_r<T>(spec.N, l - m), {n, n, d}, {0, 1});
  auto rb = embed(exchange_r<T>(spec.N, l + m), {n, n, d}, {0, 1});
  return residual_of(ra * b1 * rb * b2, b2 * rb * b1 * ra);
}

// Rc(a-b) S1(a) Rc^{t1}(-a-b+i rho) S2(b) = S2(b) Rc^{t1}(-a-b+i rho) S1(a) Rc(a-b)
template <class T = cplx>
IdentityResidual<T> twisted_residual(const ChainSpec& spec, const T& a, const T& b) {
  const auto n = static_cast<std::size_t>(spec.N);
  const std::size_t d = spec.quantum_dim();
  auto s1 = detail::two_aux(boundary_monodromy<T>(spec, a).numerator.data, n, d, 0);
  auto s2 = detail::two_aux(boundary_monodromy<T>(spec, b).numerator.data, n, d, 1);
  auto ra = embed(exchange_r<T>(spec.N, a - b), {n, n, d}, {0, 1});
  T shift = snp_reflected(spec.N, a) - b;
  auto rt = embed(transpose_first_leg(exchange_r<T>(spec.N, shift), n), {n, n, d}, {0, 1});
  return residual_of(ra * s1 * rt * s2, s2 * rt * s1 * ra);
}

}  // namespace glb
