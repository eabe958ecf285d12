#include "glbethe/checks.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace glb;

namespace {

std::vector<cplx> random_points(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::vector<cplx> out;
  for (int k = 0; k < count; ++k) out.emplace_back(u(rng), u(rng));
  return out;
}

CMatrix random_unitary(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<std::vector<cplx>> cols;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<cplx> v(n);
    for (auto& x : v) x = cplx(g(rng), g(rng));
    for (const auto& q : cols) {
      cplx dot{};
      for (std::size_t k = 0; k < n; ++k) dot += std::conj(q[k]) * v[k];
      for (std::size_t k = 0; k < n; ++k) v[k] -= dot * q[k];
    }
    double nrm = 0.0;
    for (const auto& x : v) nrm += std::norm(x);
    for (auto& x : v) x /= std::sqrt(nrm);
    cols.push_back(v);
  }
  CMatrix u(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) u(i, j) = cols[j][i];
  return u;
}

ChainSpec mixed_chain() {
  ChainSpec spec;
  spec.N = 2;
  spec.sites = {{make_irrep(2, RepKind::fundamental()), cplx(0.1, 0.0)},
                {make_irrep(2, RepKind::gl2(1.0)), cplx(-0.3, 0.2)},
                {make_irrep(2, RepKind::fundamental()), cplx(0.0, 0.0)}};
  return spec;
}

}  // namespace

TEST(RMatrix, AtZeroIsMinusIP) {
  const auto r = r_matrix<cplx>(2, cplx(0.0));
  EXPECT_EQ((r.data - permutation<cplx>(2) * (-I)).max_norm(), 0.0);
  EXPECT_EQ(r.data.rows(), 4u);
}

TEST(RMatrix, Unitarity) {
  for (int n : {2, 3, 4})
    for (const auto& mu : random_points(5, 7)) EXPECT_LT(unitarity_residual<cplx>(n, mu).relative, 1e-13);
}

TEST(RMatrix, UnitarityExact) {
  for (const auto& [l, m] : rational_points(4)) EXPECT_TRUE(unitarity_residual<GaussianRational>(3, l).exact_zero);
}

TEST(RMatrix, YangBaxter) {
  for (int n : {2, 3, 4}) {
    const auto pts = random_points(40, static_cast<unsigned>(n));
    for (std::size_t k = 0; k < 20; ++k) EXPECT_LT(yang_baxter_residual<cplx>(n, pts[2 * k], pts[2 * k + 1]).relative, 1e-12);
  }
}

TEST(Monodromy, SingleSiteEqualsL) {
  ChainSpec spec = homogeneous_chain(3, 1);
  spec.sites[0].a = cplx(0.2, -0.1);
  const cplx l(0.4, 0.3);
  EXPECT_EQ((monodromy<cplx>(spec, l).data - evaluation_L<cplx>(spec.sites[0], l).data).max_norm(), 0.0);
}

TEST(Monodromy, TwoSitesAtZero) {
  // legs (aux, 1, 2): (i P_a1)(i P_a2)
  ChainSpec spec = homogeneous_chain(2, 2);
  const std::vector<std::size_t> dims{2, 2, 2};
  const CMatrix expect = embed(permutation<cplx>(2) * I, dims, {0, 1}) * embed(permutation<cplx>(2) * I, dims, {0, 2});
  const auto t = monodromy<cplx>(spec, cplx(0.0));
  EXPECT_LT((t.data - expect).max_norm(), 1e-15);
  ASSERT_EQ(t.legs.size(), 3u);
  EXPECT_EQ(t.legs[0].label, "aux");
}

TEST(Monodromy, RTTMixedChain) {
  const auto spec = mixed_chain();
  const auto pts = random_points(6, 19);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(rtt_residual<cplx>(spec, pts[2 * k], pts[2 * k + 1]).relative, 1e-10);
}

TEST(Boundary, ReflectionSingleSite) {
  const auto spec = homogeneous_chain(2, 1, RepKind::fundamental(), Boundary::open(1, cplx(1.0)));
  const auto pts = random_points(6, 23);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(reflection_residual<cplx>(spec, pts[2 * k], pts[2 * k + 1]).relative, 1e-10);
}

TEST(Boundary, ReflectionWithNonTrivialU) {
  const auto spec = homogeneous_chain(3, 2, RepKind::fundamental(), Boundary::open(2, cplx(0.6, 0.4), random_unitary(3, 5)));
  const auto pts = random_points(4, 29);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_LT(reflection_residual<cplx>(spec, pts[2 * k], pts[2 * k + 1]).relative, 1e-10);
}

TEST(Boundary, TwistedSingleSite) {
  const auto spec = homogeneous_chain(2, 1, RepKind::fundamental(), Boundary::snp(CMatrix::identity(2)));
  const auto pts = random_points(6, 31);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_LT(twisted_residual<cplx>(spec, pts[2 * k], pts[2 * k + 1]).relative, 1e-10);
}

TEST(Boundary, OpenAtZeroIsXiTimesIdentity) {
  for (const cplx xi : {cplx(1.0), cplx(2.0, 1.0)}) {
    const auto spec = homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::open(1, xi));
    const auto b = boundary_monodromy_inverted(spec, cplx(0.0));
    EXPECT_LT((b.data - CMatrix::identity(b.data.rows()) * xi).max_norm(), 1e-13);
  }
}

TEST(Boundary, InvertedFormReportsPoles) {
  const auto spec = homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::open(1, cplx(1.0)));
  // L(-lambda) = -lambda + iP is singular at lambda = -i and lambda = i
  try {
    boundary_monodromy_inverted(spec, cplx(0.0, 1.0));
    FAIL() << "expected a spectral-parameter pole";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::spectral_pole);
    EXPECT_NE(std::string(e.what()).find("site 1"), std::string::npos);
  }
}

TEST(Transfer, SingleSitePseudoVacuum) {
  for (int n : {2, 3}) {
    const auto spec = homogeneous_chain(n, 1);
    for (const auto& l : random_points(3, 37)) {
      const CMatrix t = transfer<cplx>(spec, l);
      EXPECT_LT(std::abs(t(0, 0) - ((l + I) + static_cast<double>(n - 1) * l)), 1e-14);
      for (std::size_t r = 1; r < t.rows(); ++r) EXPECT_EQ(t(r, 0), cplx{});
    }
  }
}

TEST(Transfer, ClosedCommutativity) {
  const auto pts = random_points(10, 41);
  for (const auto& spec : {homogeneous_chain(2, 3), homogeneous_chain(3, 3), mixed_chain()})
    for (std::size_t k = 0; k < 5; ++k)
      EXPECT_LT(relative_commutator(transfer<cplx>(spec, pts[2 * k]), transfer<cplx>(spec, pts[2 * k + 1])), 1e-10);
}

TEST(Transfer, OpenCommutativity) {
  const auto spec = homogeneous_chain(2, 3, RepKind::fundamental(), Boundary::open(1, cplx(1.0)));
  EXPECT_TRUE(transfer_commutativity("open", spec, commutator_points(), 1e-10).pass);
}

TEST(Transfer, ClosedSymmetry) {
  const auto spec = mixed_chain();
  EXPECT_LT(symmetry_commutator(spec, cplx(0.3, 0.8), symmetry_generators(spec)), 1e-10);
  EXPECT_EQ(symmetry_generators(spec).size(), 4u);
}

TEST(Transfer, OpenSymmetryIsBlockDiagonalOnly) {
  const auto spec = homogeneous_chain(3, 2, RepKind::fundamental(), Boundary::open(1, cplx(0.7, 0.2)));
  const auto gens = symmetry_generators(spec);
  EXPECT_EQ(gens.size(), 5u);  // gl(1) + gl(2)
  EXPECT_LT(symmetry_commutator(spec, cplx(0.3, 0.8), gens), 1e-10);
  EXPECT_GT(symmetry_commutator(spec, cplx(0.3, 0.8), {{0, 1}}), 1e-3);
}

TEST(Transfer, OpenSpectrumIndependentOfU) {
  const auto base = homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::open(1, cplx(2.0, 1.0)));
  const cplx l(0.41, -0.23);
  std::vector<std::vector<cplx>> spectra;
  for (unsigned seed : {3u, 8u}) {
    auto spec = base;
    spec.boundary.U = random_unitary(2, seed);
    auto ev = eigenvalues_dense(transfer<cplx>(spec, l)).values;
    sort_spectrum(ev);
    spectra.push_back(ev);
  }
  ASSERT_EQ(spectra[0].size(), spectra[1].size());
  for (std::size_t k = 0; k < spectra[0].size(); ++k) EXPECT_LT(std::abs(spectra[0][k] - spectra[1][k]), 1e-9);
}

TEST(Hamiltonian, ClosedTwoSitesIsAffineInPermutation) {
  const auto spec = homogeneous_chain(2, 2);
  const auto h = hamiltonian(spec);
  const auto fit = affine_fit(h.H, periodic_permutation_sum(spec));
  EXPECT_LT(fit.residual, 1e-8);
  // H ~ c1 * 2 P12 + c0: spectrum is an affine image of {2, 2, 2, -2}
  auto ev = eigenvalues_dense(h.H).values;
  for (auto& v : ev) v = (v - fit.offset) / fit.slope;
  sort_spectrum(ev);
  EXPECT_LT(std::abs(ev[0] + 2.0), 1e-7);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_LT(std::abs(ev[k] - 2.0), 1e-7);
}

TEST(Hamiltonian, ClosedThreeSitesCommutesWithTransfer) {
  const auto spec = homogeneous_chain(2, 3);
  const auto h = hamiltonian(spec);
  for (const auto& l : random_points(3, 43)) EXPECT_LT(relative_commutator(h.H, transfer<cplx>(spec, l)), 1e-9);
}

TEST(Hamiltonian, OpenCommutesAndIsHermitianUpToPhase) {
  for (const cplx xi : {cplx(1.0), cplx(0.0, 1.0), cplx(2.0, 1.0)}) {
    const auto spec = homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::open(1, xi));
    const auto h = hamiltonian(spec);
    for (const auto& l : random_points(3, 47)) EXPECT_LT(relative_commutator(h.H, normalized_transfer(spec, l)), 1e-8);
  }
  // with the i-normalized generators the Hermitian point is xi on the imaginary axis
  const auto spec = homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::open(1, cplx(0.0, 1.0)));
  const CMatrix h = hamiltonian(spec).H;
  // phase that makes the largest diagonal entry real
  std::size_t big = 0;
  for (std::size_t k = 1; k < h.rows(); ++k)
    if (std::abs(h(k, k)) > std::abs(h(big, big))) big = k;
  const cplx phase = std::abs(h(big, big)) / h(big, big);
  const CMatrix hp = h * phase;
  EXPECT_LT((hp - conj_transpose(hp)).max_norm() / hp.max_norm(), 1e-8);
}

TEST(Hamiltonian, LocalityUnavailable) {
  try {
    hamiltonian(homogeneous_chain(2, 2, RepKind::gl2(1.0)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::locality_unavailable);
  }
  auto spec = homogeneous_chain(2, 2);
  spec.sites[1].a = 0.3;
  EXPECT_THROW(hamiltonian(spec), Error);
}

TEST(ChainSpec, Validation) {
  auto open = homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::open(0, cplx(1.0)));
  try {
    open.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("M out of range 1..N-1"), std::string::npos);
  }
  auto big = homogeneous_chain(2, 13);
  try {
    big.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension_cap);
  }
}

TEST(IdentityTable, FloatingRank3) {
  for (const auto& row : identity_table<cplx>(3, 10, 1e-12)) EXPECT_TRUE(row.pass) << row.name << " " << row.value;
}

TEST(IdentityTable, ExactRank2) {
  for (const auto& row : identity_table<GaussianRational>(2, 10, 0.0)) {
    EXPECT_TRUE(row.pass) << row.name;
    EXPECT_EQ(row.value, 0.0) << row.name;
  }
}
