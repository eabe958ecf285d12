#include "glbethe/eigen.hpp"
#include "glbethe/polynomial.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace glb;

namespace {

CMatrix random_matrix(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (auto& v : m.data()) v = cplx(g(rng), g(rng));
  return m;
}

// Characteristic polynomial by Faddeev-LeVerrier, coefficients low to high.
std::vector<cplx> characteristic(const CMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<cplx> c(n + 1);
  c[n] = 1.0;
  CMatrix m(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    m = a * m;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
    c[n - k] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  double worst = 0.0;
  for (const auto& x : a) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < b.size(); ++j)
      if (std::abs(b[j] - x) < std::abs(b[best] - x)) best = j;
    worst = std::max(worst, std::abs(b[best] - x));
    b.erase(b.begin() + static_cast<long>(best));
  }
  return worst;
}

}  // namespace

TEST(Polynomial, FactoredEvaluation) {
  FactoredPolynomial p{cplx(2.0), {cplx(1.0), cplx(0.0, -1.0)}};
  EXPECT_EQ(p.degree(), 2u);
  const cplx x(0.3, 0.4);
  EXPECT_LT(std::abs(p(x) - 2.0 * (x - 1.0) * (x + I)), 1e-15);
}

TEST(Polynomial, RootsOfKnownCubic) {
  // (x - 1)(x + 2i)(x - 0.5 + 0.5i)
  const std::vector<cplx> roots = {1.0, cplx(0, -2), cplx(0.5, -0.5)};
  std::vector<cplx> c = {1.0};
  for (const auto& r : roots) {
    std::vector<cplx> next(c.size() + 1);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = next;
  }
  EXPECT_LT(multiset_distance(polynomial_roots(c), roots), 1e-13);
}

TEST(Polynomial, InterpolationAndMultipleRoots) {
  // (x + i)^4 x^2: clustered roots are recovered after merging and refinement
  auto f = [](cplx x) { return std::pow(x + I, 4) * x * x; };
  const cplx center = 0.0;
  const double radius = 3.0;
  const auto coef = interpolate_on_circle(f, 6, center, radius);
  const auto raw = factor_scaled(coef, center, radius);
  const auto refined = refine_multiple_roots(coef, merge_root_clusters(raw, 1e-3), center, radius);
  ASSERT_EQ(refined.degree(), 6u);
  EXPECT_LT(multiset_distance(refined.roots, {-I, -I, -I, -I, 0.0, 0.0}), 1e-12);
  EXPECT_LT(std::abs(refined.leading - 1.0), 1e-12);
  for (const cplx x : {cplx(0.7, 0.2), cplx(-1.1, 0.9)}) EXPECT_LT(std::abs(refined(x) - f(x)) / std::abs(f(x)), 1e-12);
}

TEST(Eigen, Diagonal) {
  CMatrix m(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = cplx(2.0, 1.0);
  auto v = eigenvalues_dense(m).values;
  EXPECT_LT(multiset_distance(v, {1.0, cplx(2.0, 1.0)}), 1e-14);
}

TEST(Eigen, Permutation) {
  auto r = eigenvalues_dense(permutation<cplx>(2));
  EXPECT_LT(multiset_distance(r.values, {1.0, 1.0, 1.0, -1.0}), 1e-13);
  EXPECT_LT(r.backward_error, 1e-12);
}

TEST(Eigen, TraceOfRandom20) {
  const CMatrix m = random_matrix(20, 42);
  const auto r = eigenvalues_dense(m);
  ASSERT_EQ(r.values.size(), 20u);
  cplx s{};
  for (const auto& v : r.values) s += v;
  EXPECT_LT(std::abs(s - m.trace()), 1e-10);
  EXPECT_LT(r.backward_error, 1e-12);
}

TEST(Eigen, CompanionAgreementRandom6) {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const CMatrix m = random_matrix(6, seed);
    const auto ev = eigenvalues_dense(m).values;
    const auto roots = polynomial_roots(characteristic(m));
    EXPECT_LT(multiset_distance(ev, roots), 1e-8) << "seed " << seed;
  }
}

TEST(Eigen, NonSquareAndNonFinite) {
  EXPECT_THROW(eigenvalues_dense(CMatrix(2, 3)), Error);
  CMatrix m(2, 2);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(eigenvalues_dense(m), Error);
}

TEST(Eigen, DefectiveJordanBlock) {
  CMatrix m(3, 3);
  m(0, 1) = 1.0;
  m(1, 2) = 1.0;
  const auto r = eigenvalues_dense(m);
  for (const auto& v : r.values) EXPECT_LT(std::abs(v), 1e-5);
  EXPECT_LT(r.backward_error, 1e-12);
}
