#pragma once
// Exact-diagonalization oracle: weight sectors, sampled spectra and branch
// continuation.

#include "glbethe/chain.hpp"
#include "glbethe/eigen.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

namespace glb {

struct Sector {
  std::vector<int> weight;
  std::vector<std::size_t> indices;
};

struct SectorDecomposition {
  std::vector<Sector> sectors;
};

// Partition of the product basis by total Cartan weight. Sectors are in
// decreasing lexicographic weight order.
inline SectorDecomposition weight_sectors(const ChainSpec& spec) {
  if (spec.boundary.kind == Boundary::Kind::snp)
    throw Error(ErrorKind::no_sector_reduction, "the snp transfer matrix does not preserve Cartan weight");
  if (spec.boundary.kind == Boundary::Kind::open && !spec.boundary.has_identity_U())
    throw Error(ErrorKind::no_sector_reduction, "open boundary with non-identity U");
  const auto dims = spec.site_dims();
  const std::size_t total = product_of(dims);
  std::map<std::vector<int>, std::vector<std::size_t>, std::greater<>> groups;
  std::vector<std::size_t> digit(dims.size());
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t k = dims.size(); k-- > 0;) {
      digit[k] = rem % dims[k];
      rem /= dims[k];
    }
    std::vector<int> w(static_cast<std::size_t>(spec.N), 0);
    for (std::size_t s = 0; s < dims.size(); ++s) {
      const auto& b = spec.sites[s].irrep.basis()[digit[s]];
      for (std::size_t k = 0; k < w.size(); ++k) w[k] += b[k];
    }
    groups[w].push_back(idx);
  }
  SectorDecomposition out;
  for (auto& [w, idx] : groups) out.sectors.push_back({w, idx});
  return out;
}

inline CMatrix sector_block(const CMatrix& m, const std::vector<std::size_t>& idx) {
  CMatrix b(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) b(i, j) = m(idx[i], idx[j]);
  return b;
}

// Largest entry of m that couples two different sectors.
inline double off_sector_residual(const CMatrix& m, const SectorDecomposition& dec) {
  std::vector<std::size_t> label(m.rows());
  for (std::size_t s = 0; s < dec.sectors.size(); ++s)
    for (auto i : dec.sectors[s].indices) label[i] = s;
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (label[i] != label[j]) worst = std::max(worst, std::abs(m(i, j)));
  return worst;
}

struct SectorSpectrum {
  std::vector<int> weight;  // empty when no reduction was used
  std::vector<cplx> values;
};

struct SampleSpectrum {
  cplx lambda;
  cplx denominator{1.0, 0.0};  // open chains: divide values by this for the inverted normalization
  std::vector<SectorSpectrum> sectors;
  double backward_error = 0.0;
  double off_sector_residual = 0.0;

  std::vector<cplx> all() const {
    std::vector<cplx> v;
    for (const auto& s : sectors) v.insert(v.end(), s.values.begin(), s.values.end());
    return v;
  }
};

inline std::optional<SectorDecomposition> try_sectors(const ChainSpec& spec) {
  try {
    return weight_sectors(spec);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::no_sector_reduction) return std::nullopt;
    throw;
  }
}

inline SampleSpectrum spectrum_at(const ChainSpec& spec, cplx lambda, const std::optional<SectorDecomposition>& dec) {
  SampleSpectrum out;
  out.lambda = lambda;
  const CMatrix t = transfer<cplx>(spec, lambda);
  out.denominator = transfer_denominator<cplx>(spec, lambda);
  if (dec) {
    out.off_sector_residual = off_sector_residual(t, *dec);
    for (const auto& s : dec->sectors) {
      auto r = eigenvalues_dense(sector_block(t, s.indices));
      out.backward_error = std::max(out.backward_error, r.backward_error);
      out.sectors.push_back({s.weight, r.values});
    }
  } else {
    auto r = eigenvalues_dense(t);
    out.backward_error = r.backward_error;
    out.sectors.push_back({{}, r.values});
  }
  return out;
}

// Transfer-matrix eigenvalues at each sample, per weight sector when the
// boundary preserves the Cartan weight. Open chains use the adjugate
// normalization in which the boundary polynomials are polynomial.
inline std::vector<SampleSpectrum> spectrum(const ChainSpec& spec, const std::vector<cplx>& samples) {
  spec.validate();
  const auto dec = try_sectors(spec);
  std::vector<SampleSpectrum> out;
  for (const auto& l : samples) out.push_back(spectrum_at(spec, l, dec));
  return out;
}

inline double commutator_norm(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw Error(ErrorKind::invalid_argument, "commutator of operators with different shapes");
  return commutator_max(a, b);
}

inline double commutator_norm(const OperatorMatrix<cplx>& a, const OperatorMatrix<cplx>& b) {
  if (a.legs.size() != b.legs.size()) throw Error(ErrorKind::invalid_argument, "commutator of operators with different legs");
  for (std::size_t k = 0; k < a.legs.size(); ++k)
    if (a.legs[k].dim != b.legs[k].dim) throw Error(ErrorKind::invalid_argument, "commutator of operators with different legs");
  return commutator_norm(a.data, b.data);
}

struct Continuation {
  // branches[b][j] = eigenvalue of branch b at sample j
  std::vector<std::vector<cplx>> branches;
  double max_jump = 0.0;
  int collisions = 0;
  bool ok = false;
};

// Greedy nearest-neighbour continuation across consecutive samples. A
// collision is a branch whose nearest candidate was already taken by a
// branch at a clearly different value (degenerate clusters are exempt).
inline Continuation continue_branches(const std::vector<std::vector<cplx>>& per_sample, double max_jump_bound, double cluster_radius = 1e-9) {
  Continuation c;
  if (per_sample.empty()) return c;
  const std::size_t nb = per_sample.front().size();
  for (std::size_t b = 0; b < nb; ++b) c.branches.push_back({per_sample.front()[b]});
  for (std::size_t j = 1; j < per_sample.size(); ++j) {
    const auto& next = per_sample[j];
    if (next.size() != nb) throw Error(ErrorKind::invalid_argument, "samples have different spectrum sizes");
    struct Pair {
      double d;
      std::size_t b, e;
    };
    std::vector<Pair> pairs;
    for (std::size_t b = 0; b < nb; ++b)
      for (std::size_t e = 0; e < nb; ++e) pairs.push_back({std::abs(next[e] - c.branches[b].back()), b, e});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
      if (x.d != y.d) return x.d < y.d;
      if (x.b != y.b) return x.b < y.b;
      return x.e < y.e;
    });
    std::vector<bool> bdone(nb, false), eused(nb, false);
    std::vector<std::size_t> nearest(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      std::size_t best = 0;
      for (std::size_t e = 1; e < nb; ++e)
        if (std::abs(next[e] - c.branches[b].back()) < std::abs(next[best] - c.branches[b].back())) best = e;
      nearest[b] = best;
    }
    std::vector<std::size_t> assign(nb);
    for (const auto& p : pairs) {
      if (bdone[p.b] || eused[p.e]) continue;
      bdone[p.b] = eused[p.e] = true;
      assign[p.b] = p.e;
    }
    double scale = 1.0;
    for (const auto& v : next) scale = std::max(scale, std::abs(v));
    for (std::size_t b = 0; b < nb; ++b) {
      const cplx v = next[assign[b]];
      if (assign[b] != nearest[b] && std::abs(v - next[nearest[b]]) > cluster_radius * scale) ++c.collisions;
      c.max_jump = std::max(c.max_jump, std::abs(v - c.branches[b].back()));
      c.branches[b].push_back(v);
    }
  }
  c.ok = c.collisions == 0 && c.max_jump <= max_jump_bound;
  return c;
}

}  // namespace glb
