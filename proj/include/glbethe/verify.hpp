#pragma once
// Matching of Bethe-ansatz eigenvalues against the oracle, residue checks and
// completeness tallies.

#include "glbethe/bethe.hpp"
#include "glbethe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace glb {

// prod_{i<j} (w_i - w_j + j - i)/(j - i); 0 when w is not dominant.
inline std::size_t weyl_dimension(const std::vector<int>& w) {
  double num = 1.0, den = 1.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      const double f = static_cast<double>(w[i] - w[j]) + static_cast<double>(j - i);
      if (f <= 0.0) return 0;
      num *= f;
      den *= static_cast<double>(j - i);
    }
  return static_cast<std::size_t>(std::llround(num / den));
}

inline bool is_dominant(const std::vector<int>& w) {
  for (std::size_t k = 0; k + 1 < w.size(); ++k)
    if (w[k] < w[k + 1]) return false;
  return true;
}

// w_k = sum_n alpha_k^(n) - M_k + M_{k-1}, M_0 = M_N = 0.
inline std::vector<int> bethe_weight(const ChainSpec& spec, const std::vector<int>& M) {
  std::vector<int> w(static_cast<std::size_t>(spec.N), 0);
  for (const auto& s : spec.sites)
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += s.irrep.weight()[k];
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k < M.size()) w[k] -= M[k];
    if (k >= 1) w[k] += M[k - 1];
  }
  return w;
}

// Dimension of the symmetry multiplet generated by a Bethe state of weight
// w: gl(N) for closed chains, gl(M) + gl(N-M) for open chains, 1 otherwise.
// Returns 0 for a weight that is not (block-)dominant.
inline std::size_t multiplicity(const ChainSpec& spec, const std::vector<int>& w) {
  switch (spec.boundary.kind) {
    case Boundary::Kind::closed:
      return weyl_dimension(w);
    case Boundary::Kind::open: {
      const auto m = static_cast<std::size_t>(spec.boundary.M);
      const std::vector<int> a(w.begin(), w.begin() + static_cast<long>(m)), b(w.begin() + static_cast<long>(m), w.end());
      return weyl_dimension(a) * weyl_dimension(b);
    }
    case Boundary::Kind::snp:
      return 1;
  }
  return 0;
}

// All root-count vectors whose Bethe weight is non-negative and
// (block-)dominant, in lexicographic order.
inline std::vector<std::vector<int>> enumerate_M(const ChainSpec& spec) {
  std::vector<std::vector<int>> out;
  int total = 0;
  for (const auto& s : spec.sites)
    for (int a : s.irrep.weight()) total += a;
  std::vector<int> cur(static_cast<std::size_t>(spec.N - 1), 0);
  auto admissible = [&](const std::vector<int>& m) {
    const auto w = bethe_weight(spec, m);
    for (int v : w)
      if (v < 0) return false;
    return spec.boundary.kind == Boundary::Kind::snp || multiplicity(spec, w) > 0;
  };
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == cur.size()) {
      if (admissible(cur)) out.push_back(cur);
      return;
    }
    for (int v = 0; v <= total; ++v) {
      cur[k] = v;
      rec(k + 1);
    }
    cur[k] = 0;
  };
  rec(0);
  return out;
}

struct ResidueEntry {
  int level = 1;
  std::size_t index = 0;
  cplx pole;
  double magnitude = 0.0;
};

// Residue of Lambda at every pole candidate x - ik/2 (and -x - ik/2 for
// reflected roots). g(r) = r u Lambda(pole + r u) is sampled at
// r = +-1e-2, +-1e-3, +-1e-4 along a fixed direction u and extrapolated to
// r = 0 through the interpolating polynomial.
inline std::vector<ResidueEntry> residue_check(const EigenvalueFormula& f, const BetheRootSet& r) {
  std::vector<ResidueEntry> out;
  const cplx u = std::polar(1.0, 0.7);
  const double radii[] = {1e-2, -1e-2, 1e-3, -1e-3, 1e-4, -1e-4};
  constexpr int nr = 6;
  const bool reflected = f.boundary.kind != Boundary::Kind::closed;
  for (int k = 1; k <= static_cast<int>(r.roots.size()); ++k) {
    const auto& level = r.level(k);
    for (std::size_t n = 0; n < level.size(); ++n) {
      std::vector<cplx> poles = {level[n] - I * static_cast<double>(k) / 2.0};
      if (reflected) poles.push_back(-level[n] - I * static_cast<double>(k) / 2.0);
      for (const auto& p : poles) {
        cplx limit = 0.0;
        for (int j = 0; j < nr; ++j) {
          double w = 1.0;
          for (int m = 0; m < nr; ++m)
            if (m != j) w *= radii[m] / (radii[m] - radii[j]);
          limit += w * radii[j] * u * f.evaluate(r, p + radii[j] * u);
        }
        out.push_back({k, n, p, std::abs(limit)});
      }
    }
  }
  return out;
}

inline std::vector<ResidueEntry> residue_check(const ChainSpec& spec, const BetheRootSet& r) { return residue_check(make_formula(spec), r); }

struct MatchOptions {
  double tol_match = 1e-8;        // relative to max |eigenvalue| per sample
  double cluster_radius = 1e-9;   // relative, for degeneracy counts
  double residue_tol = 1e-8;      // relative to max |Lambda| on samples
  int max_resample = 5;
};

struct SolutionRecord {
  BetheRootSet roots;
  bool singular = false;
  std::vector<cplx> values;        // Lambda at the samples
  std::vector<int> weight;
  bool dominant = true;
  std::size_t multiplicity = 0;
  bool matched = false;
  long branch = -1;                // index into the sorted first-sample spectrum
  double max_mismatch = 0.0;       // relative
  std::size_t degeneracy = 0;      // oracle copies within the cluster radius (min over samples)
  bool in_weight_sector = false;   // Lambda found in the oracle sector of its own weight
  bool oversubscribed = false;     // only already-consumed oracle copies were close
  std::vector<ResidueEntry> residues;
  bool residues_ok = true;
  std::vector<std::string> warnings;
};

struct Tally {
  std::size_t regular = 0;      // multiplicity of matched regular solutions
  std::size_t regularized = 0;  // plus matched singular solutions
  std::size_t total = 0;        // quantum-space dimension
};

struct SpectrumReport {
  std::vector<cplx> samples;
  std::vector<SolutionRecord> records;
  std::vector<std::vector<cplx>> unmatched;  // leftover oracle eigenvalues per sample
  std::size_t unmatched_count = 0;           // max over samples
  Tally tally;
  double oracle_backward_error = 0.0;
  double max_mismatch = 0.0;                 // over matched records
  std::vector<std::string> warnings;

  bool complete_regular() const { return tally.regular == tally.total && unmatched_count == 0; }
  bool complete_regularized() const { return tally.regularized == tally.total && unmatched_count == 0; }
};

inline std::vector<cplx> default_samples(int n) {
  std::vector<cplx> s;
  for (int j = 0; j < n; ++j) s.emplace_back(0.23 + 0.37 * j - 0.05 * j * j, 0.31 - 0.13 * j + 0.02 * j * j);
  return s;
}

// Assign every solution (regular first, then singular) to oracle eigenvalues
// by consuming its multiplicity of copies from each sample's spectrum.
inline SpectrumReport match_spectrum(const ChainSpec& spec, const EigenvalueFormula& f, const std::vector<BetheRootSet>& regular,
                                     const std::vector<BetheRootSet>& singular, std::vector<cplx> samples, const MatchOptions& opt = {}) {
  if (samples.size() < 3) throw Error(ErrorKind::invalid_argument, "match_spectrum needs at least 3 samples");
  SpectrumReport rep;
  std::vector<std::pair<const BetheRootSet*, bool>> all;
  for (const auto& r : regular) all.push_back({&r, false});
  for (const auto& r : singular) all.push_back({&r, true});

  // move samples off poles of any Lambda
  for (auto& s : samples) {
    int tries = 0;
    for (;;) {
      try {
        (void)f.pseudo_vacuum(s);
        for (const auto& [r, sg] : all) (void)f.evaluate(*r, s);
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::pole || ++tries > opt.max_resample) throw;
        s += cplx(0.0137 * tries, 0.0071 * tries);
      }
    }
  }
  rep.samples = samples;
  const auto spectra = spectrum(spec, samples);
  std::vector<std::vector<cplx>> pool;
  std::vector<double> scale;
  for (const auto& sp : spectra) {
    auto v = sp.all();
    sort_spectrum(v);
    double sc = 0.0;
    for (const auto& x : v) sc = std::max(sc, std::abs(x));
    pool.push_back(v);
    scale.push_back(sc == 0.0 ? 1.0 : sc);
    rep.oracle_backward_error = std::max(rep.oracle_backward_error, sp.backward_error);
  }
  const std::vector<cplx> first = pool.front();
  std::vector<std::vector<bool>> used(pool.size());
  for (std::size_t j = 0; j < pool.size(); ++j) used[j].assign(pool[j].size(), false);
  rep.tally.total = spec.quantum_dim();

  for (const auto& [rp, is_singular] : all) {
    SolutionRecord rec;
    rec.roots = *rp;
    rec.singular = is_singular;
    rec.weight = bethe_weight(spec, rp->M);
    rec.multiplicity = multiplicity(spec, rec.weight);
    rec.dominant = rec.multiplicity > 0;
    double lam_scale = 0.0;
    for (const auto& s : samples) {
      rec.values.push_back(f.evaluate(*rp, s));
      lam_scale = std::max(lam_scale, std::abs(rec.values.back()));
    }
    const std::size_t want = std::max<std::size_t>(rec.multiplicity, 1);
    rec.degeneracy = static_cast<std::size_t>(-1);
    std::vector<std::vector<std::size_t>> picks(samples.size());
    bool ok = true;
    double mismatch = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      std::vector<std::pair<double, std::size_t>> near;
      std::size_t deg = 0;
      bool consumed_close = false;
      for (std::size_t e = 0; e < pool[j].size(); ++e) {
        const double d = std::abs(pool[j][e] - rec.values[j]) / scale[j];
        if (d <= opt.cluster_radius) ++deg;
        if (d <= opt.tol_match) {
          if (used[j][e])
            consumed_close = true;
          else
            near.push_back({d, e});
        }
      }
      rec.degeneracy = std::min(rec.degeneracy, deg);
      std::sort(near.begin(), near.end());
      if (near.size() < want) {
        ok = false;
        if (consumed_close) rec.oversubscribed = true;
        continue;
      }
      for (std::size_t c = 0; c < want; ++c) {
        picks[j].push_back(near[c].second);
        mismatch = std::max(mismatch, near[c].first);
      }
    }
    if (rec.degeneracy == static_cast<std::size_t>(-1)) rec.degeneracy = 0;
    if (ok) {
      rec.matched = true;
      rec.max_mismatch = mismatch;
      for (std::size_t j = 0; j < samples.size(); ++j)
        for (auto e : picks[j]) used[j][e] = true;
      rec.branch = static_cast<long>(picks[0].front());
      rep.max_mismatch = std::max(rep.max_mismatch, mismatch);
      if (rec.degeneracy > want) rec.warnings.push_back("degenerate parameters: oracle degeneracy exceeds multiplicity");
    } else {
      // best available distance, for diagnostics
      double best = 0.0;
      for (std::size_t j = 0; j < samples.size(); ++j) {
        double b = 1e300;
        for (const auto& v : pool[j]) b = std::min(b, std::abs(v - rec.values[j]) / scale[j]);
        best = std::max(best, b);
      }
      rec.max_mismatch = best;
    }
    if (rec.oversubscribed) rec.warnings.push_back("two solutions map to the same oracle branch");
    if (!rec.dominant) rec.warnings.push_back("non-highest-weight candidate");
    // sector check against the first sample
    for (const auto& sec : spectra.front().sectors) {
      if (sec.weight != rec.weight) continue;
      for (const auto& v : sec.values)
        if (std::abs(v - rec.values[0]) / scale[0] <= opt.tol_match) rec.in_weight_sector = true;
    }
    rec.residues = residue_check(f, *rp);
    for (const auto& e : rec.residues)
      if (!(e.magnitude < opt.residue_tol * std::max(lam_scale, 1.0))) rec.residues_ok = false;
    if (rec.matched && rec.dominant) {
      if (!is_singular) rep.tally.regular += rec.multiplicity;
      rep.tally.regularized += rec.multiplicity;
    }
    rep.records.push_back(std::move(rec));
  }
  for (std::size_t j = 0; j < pool.size(); ++j) {
    std::vector<cplx> left;
    for (std::size_t e = 0; e < pool[j].size(); ++e)
      if (!used[j][e]) left.push_back(pool[j][e]);
    rep.unmatched_count = std::max(rep.unmatched_count, left.size());
    rep.unmatched.push_back(std::move(left));
  }
  if (rep.unmatched_count > 0) rep.warnings.push_back(std::to_string(rep.unmatched_count) + " oracle eigenvalues not matched");
  (void)first;
  return rep;
}

inline SpectrumReport match_spectrum(const ChainSpec& spec, const std::vector<BetheRootSet>& solutions, const std::vector<cplx>& samples,
                                     const MatchOptions& opt = {}) {
  return match_spectrum(spec, make_formula(spec), solutions, {}, samples, opt);
}

struct CompletenessReport {
  Tally tally;
  std::vector<std::vector<int>> excluded;  // weights of non-dominant matched candidates
};

inline CompletenessReport completeness_report(const ChainSpec& spec, const SpectrumReport& rep) {
  CompletenessReport c;
  c.tally = rep.tally;
  for (const auto& r : rep.records)
    if (r.matched && !r.dominant) c.excluded.push_back(r.weight);
  return c;
}

// Solve every admissible M vector and match the union against the oracle.
struct SweepResult {
  std::vector<std::vector<int>> M_vectors;
  std::vector<SolveResult> solves;
  SpectrumReport report;
};

inline SweepResult sweep_and_match(const ChainSpec& spec, const SolverStrategy& st, const std::vector<cplx>& samples, const MatchOptions& opt = {}) {
  SweepResult out;
  const auto f = make_formula(spec);
  std::vector<BetheRootSet> reg, sing;
  for (const auto& m : enumerate_M(spec)) {
    std::size_t roots = 0;
    for (int v : m) roots += static_cast<std::size_t>(v);
    if (roots > st.max_roots) continue;
    out.M_vectors.push_back(m);
    out.solves.push_back(solve_bae(f, spec, m, st));
    for (const auto& s : out.solves.back().solutions) reg.push_back(s);
    for (const auto& s : out.solves.back().singular) sing.push_back(s);
  }
  out.report = match_spectrum(spec, f, reg, sing, samples, opt);
  return out;
}

}  // namespace glb
