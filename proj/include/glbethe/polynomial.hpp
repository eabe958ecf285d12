#pragma once

#include "glbethe/error.hpp"
#include "glbethe/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace glb {

struct FactoredPolynomial {
  cplx leading{1.0, 0.0};
  std::vector<cplx> roots;

  std::size_t degree() const { return roots.size(); }

  cplx operator()(cplx x) const {
    cplx v = leading;
    for (const auto& r : roots) v *= (x - r);
    return v;
  }
};

// Coefficients c[0] + c[1] x + ... evaluated by Horner.
inline cplx horner(const std::vector<cplx>& c, cplx x) {
  cplx v{};
  for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
  return v;
}

inline std::vector<cplx> derivative(const std::vector<cplx>& c) {
  std::vector<cplx> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
  return d;
}

// All roots of c[0] + ... + c[n] x^n (c[n] != 0), Aberth-Ehrlich iteration.
inline std::vector<cplx> polynomial_roots(std::vector<cplx> c) {
  while (!c.empty() && c.back() == cplx{}) c.pop_back();
  if (c.size() <= 1) return {};
  const std::size_t n = c.size() - 1;
  const cplx lead = c.back();
  for (auto& v : c) v /= lead;
  double bound = 0.0;
  for (std::size_t k = 0; k < n; ++k) bound = std::max(bound, std::pow(std::abs(c[k]), 1.0 / static_cast<double>(n - k)));
  bound = std::max(bound, 1e-3);
  const auto dc = derivative(c);

  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    double ang = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) / static_cast<double>(n) + 0.4;
    z[k] = bound * cplx(std::cos(ang), std::sin(ang));
  }
  for (int it = 0; it < 800; ++it) {
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      cplx p = horner(c, z[k]);
      if (p == cplx{}) continue;
      cplx ratio = p / horner(dc, z[k]);
      cplx s{};
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      cplx w = ratio / (1.0 - ratio * s);
      z[k] -= w;
      worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[k])));
    }
    if (worst < 1e-16) break;
  }
  return z;
}

// Interpolate f on n+1 nodes c0 + R e^{2 pi i j/(n+1)} and return coefficients
// in the scaled variable t = (x - c0)/R.
template <class F>
std::vector<cplx> interpolate_on_circle(F&& f, std::size_t degree, cplx center, double radius) {
  const std::size_t m = degree + 1;
  std::vector<cplx> vals(m);
  for (std::size_t j = 0; j < m; ++j) {
    double ang = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
    vals[j] = f(center + radius * cplx(std::cos(ang), std::sin(ang)));
  }
  std::vector<cplx> coef(m);
  for (std::size_t k = 0; k < m; ++k) {
    cplx s{};
    for (std::size_t j = 0; j < m; ++j) {
      double ang = -2.0 * std::numbers::pi * static_cast<double>(j * k % m) / static_cast<double>(m);
      s += vals[j] * cplx(std::cos(ang), std::sin(ang));
    }
    coef[k] = s / static_cast<double>(m);
  }
  return coef;
}

// Factor a polynomial given in the scaled variable t = (x - c0)/R.
inline FactoredPolynomial factor_scaled(std::vector<cplx> coef, cplx center, double radius, double drop_tol = 1e-12) {
  double cmax = 0.0;
  for (const auto& v : coef) cmax = std::max(cmax, std::abs(v));
  while (coef.size() > 1 && std::abs(coef.back()) <= drop_tol * cmax) coef.pop_back();
  FactoredPolynomial p;
  if (cmax == 0.0) {
    p.leading = 0.0;
    return p;
  }
  const std::size_t n = coef.size() - 1;
  p.leading = coef.back() / std::pow(radius, static_cast<double>(n));
  for (const auto& t : polynomial_roots(coef)) p.roots.push_back(center + radius * t);
  return p;
}

// Replace tight clusters of roots by their centroid (multiple roots are only
// resolved to ~eps^(1/m) individually, their mean is far more accurate).
inline FactoredPolynomial merge_root_clusters(const FactoredPolynomial& p, double rel_radius) {
  FactoredPolynomial out;
  out.leading = p.leading;
  std::vector<bool> used(p.roots.size(), false);
  for (std::size_t k = 0; k < p.roots.size(); ++k) {
    if (used[k]) continue;
    std::vector<std::size_t> group{k};
    used[k] = true;
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t j = 0; j < p.roots.size(); ++j) {
        if (used[j]) continue;
        for (auto g : group) {
          if (std::abs(p.roots[j] - p.roots[g]) <= rel_radius * (1.0 + std::abs(p.roots[g]))) {
            group.push_back(j);
            used[j] = true;
            grew = true;
            break;
          }
        }
      }
    }
    cplx mean{};
    for (auto g : group) mean += p.roots[g];
    mean /= static_cast<double>(group.size());
    for (std::size_t g = 0; g < group.size(); ++g) out.roots.push_back(mean);
  }
  return out;
}

// Newton refinement of each root of multiplicity m as a simple root of the
// (m-1)-th derivative; coef is in the scaled variable t = (x - c0)/R.
inline FactoredPolynomial refine_multiple_roots(const std::vector<cplx>& coef, const FactoredPolynomial& p, cplx center, double radius) {
  FactoredPolynomial out = p;
  std::vector<bool> done(p.roots.size(), false);
  for (std::size_t k = 0; k < p.roots.size(); ++k) {
    if (done[k]) continue;
    std::vector<std::size_t> group;
    for (std::size_t j = k; j < p.roots.size(); ++j)
      if (!done[j] && p.roots[j] == p.roots[k]) group.push_back(j);
    for (auto g : group) done[g] = true;
    std::vector<cplx> d = coef;
    for (std::size_t m = 1; m < group.size(); ++m) d = derivative(d);
    const std::vector<cplx> dd = derivative(d);
    cplx t = (p.roots[k] - center) / radius;
    for (int it = 0; it < 20; ++it) {
      const cplx den = horner(dd, t);
      if (std::abs(den) == 0.0) break;
      const cplx step = horner(d, t) / den;
      t -= step;
      if (std::abs(step) < 1e-17) break;
    }
    for (auto g : group) out.roots[g] = center + radius * t;
  }
  return out;
}

inline void sort_roots(std::vector<cplx>& r) {
  std::sort(r.begin(), r.end(), [](const cplx& a, const cplx& b) {
    if (std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

}  // namespace glb
