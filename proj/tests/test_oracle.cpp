#include "glbethe/bethe.hpp"
#include "glbethe/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace glb;

namespace {

std::vector<std::size_t> sector_sizes(const ChainSpec& spec) {
  std::vector<std::size_t> s;
  for (const auto& sec : weight_sectors(spec).sectors) s.push_back(sec.indices.size());
  return s;
}

bool contains(const std::vector<cplx>& v, cplx x, double tol) {
  return std::any_of(v.begin(), v.end(), [&](const cplx& y) { return std::abs(y - x) < tol; });
}

}  // namespace

TEST(Sectors, Gl2TwoSites) {
  EXPECT_EQ(sector_sizes(homogeneous_chain(2, 2)), (std::vector<std::size_t>{1, 2, 1}));
}

TEST(Sectors, Gl3TwoSites) {
  auto sizes = sector_sizes(homogeneous_chain(3, 2));
  EXPECT_EQ(sizes.size(), 6u);
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 1, 1, 2, 2, 2}));
}

TEST(Sectors, Spin1TwoSites) {
  EXPECT_EQ(sector_sizes(homogeneous_chain(2, 2, RepKind::gl2(1.0))), (std::vector<std::size_t>{1, 2, 3, 2, 1}));
}

TEST(Sectors, BlockInvariance) {
  for (const auto& spec : {homogeneous_chain(3, 2), homogeneous_chain(2, 3, RepKind::gl2(1.0)),
                           homogeneous_chain(3, 2, RepKind::fundamental(), Boundary::open(1, cplx(0.7, 0.3)))}) {
    const auto dec = weight_sectors(spec);
    EXPECT_LT(off_sector_residual(transfer<cplx>(spec, cplx(0.3, 0.2)), dec), 1e-12);
  }
}

TEST(Sectors, UnavailableForTwistedBoundaries) {
  auto spec = homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::open(1, cplx(1.0), CMatrix::identity(2) * cplx(0.0, 1.0)));
  try {
    weight_sectors(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::no_sector_reduction);
  }
  EXPECT_FALSE(try_sectors(homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::snp(CMatrix::identity(2)))).has_value());
}

TEST(Spectrum, SingleSiteAtOne) {
  const auto spec = homogeneous_chain(2, 1);
  auto v = spectrum(spec, {cplx(1.0)})[0].all();
  ASSERT_EQ(v.size(), 2u);
  // t = tr_a(lambda + iP) = 2 lambda + i: a doublet at the pseudo-vacuum value (1+i) + 1
  for (const auto& x : v) EXPECT_LT(std::abs(x - cplx(2.0, 1.0)), 1e-13);
}

TEST(Spectrum, SectorUnionEqualsFullSpectrum) {
  for (const auto& spec : {homogeneous_chain(2, 3), homogeneous_chain(3, 2), homogeneous_chain(2, 2, RepKind::gl2(1.0))}) {
    const cplx l(0.31, -0.44);
    auto sectored = spectrum_at(spec, l, weight_sectors(spec)).all();
    auto full = spectrum_at(spec, l, std::nullopt).all();
    ASSERT_EQ(sectored.size(), full.size());
    for (const auto& x : sectored) {
      auto it = std::min_element(full.begin(), full.end(), [&](const cplx& a, const cplx& b) { return std::abs(a - x) < std::abs(b - x); });
      EXPECT_LT(std::abs(*it - x), 1e-9);
      full.erase(it);
    }
  }
}

TEST(Spectrum, PseudoVacuumIsPresent) {
  const std::vector<ChainSpec> specs = {homogeneous_chain(2, 3), homogeneous_chain(3, 2), homogeneous_chain(2, 2, RepKind::gl2(1.0)),
                                        homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::open(1, cplx(1.0))),
                                        homogeneous_chain(3, 2, RepKind::fundamental(), Boundary::open(2, cplx(0.4, -0.6)))};
  const std::vector<cplx> samples = {cplx(0.23, 0.31), cplx(-0.4, 0.5), cplx(1.1, -0.3)};
  for (const auto& spec : specs) {
    const auto f = make_formula(spec);
    const auto sp = spectrum(spec, samples);
    for (const auto& s : sp) {
      const auto v = s.all();
      double scale = 1.0;
      for (const auto& x : v) scale = std::max(scale, std::abs(x));
      EXPECT_TRUE(contains(v, f.pseudo_vacuum(s.lambda), 1e-10 * scale)) << to_string(spec.boundary.kind);
      EXPECT_LT(s.backward_error, 1e-12);
    }
  }
}

TEST(Spectrum, BranchContinuation) {
  const auto spec = homogeneous_chain(2, 3);
  std::vector<std::vector<cplx>> per;
  for (int j = 0; j <= 40; ++j) {
    auto v = spectrum(spec, {cplx(0.2 + 0.02 * j, 0.3)})[0].all();
    sort_spectrum(v);
    per.push_back(v);
  }
  const auto c = continue_branches(per, 0.5);
  EXPECT_TRUE(c.ok);
  EXPECT_EQ(c.collisions, 0);
  EXPECT_LT(c.max_jump, 0.5);
  // a bound below the step size is reported
  EXPECT_FALSE(continue_branches(per, 1e-6).ok);
}

TEST(Commutator, Basics) {
  const auto spec = homogeneous_chain(2, 3);
  const CMatrix t = transfer<cplx>(spec, cplx(0.5, 0.1));
  EXPECT_EQ(commutator_norm(t, t), 0.0);
  EXPECT_LT(commutator_norm(t, transfer<cplx>(spec, cplx(-0.2, 0.7))), 1e-10);
  EXPECT_LT(commutator_norm(t, coproduct_generator(spec, 0, 1)), 1e-10);
  EXPECT_THROW(commutator_norm(t, CMatrix::identity(4)), Error);
}
