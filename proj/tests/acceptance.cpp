// Acceptance run: one PASS/FAIL line per criterion, followed by its
// sub-checks. Usage:
//
//   acceptance [--expect-documented-failures ID ...]
//
// Exit status 0 when every criterion passes, or when the only failing
// sub-checks are marked documented and belong to the listed criteria.

#include "glbethe/checks.hpp"
#include "glbethe/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace glb;

namespace {

struct SubCheck {
  std::string name;
  bool pass = false;
  std::string detail;
  bool documented = false;  // known, ledgered failure
};

struct Criterion {
  int id = 0;
  std::string title;
  double budget = 0.0;  // seconds
  double seconds = 0.0;
  std::vector<SubCheck> subs;

  void add(std::string name, bool pass, std::string detail, bool documented = false) {
    subs.push_back({std::move(name), pass, std::move(detail), documented});
  }
  bool pass() const {
    for (const auto& s : subs)
      if (!s.pass) return false;
    return seconds < budget;
  }
  bool only_documented_failures() const {
    if (seconds >= budget) return false;
    for (const auto& s : subs)
      if (!s.pass && !s.documented) return false;
    return true;
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::vector<cplx> sample_points(int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  std::vector<cplx> out;
  for (int k = 0; k < count; ++k) out.emplace_back(u(rng), u(rng));
  return out;
}

CMatrix random_unitary(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix u(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<cplx> v(n);
    for (auto& x : v) x = cplx(g(rng), g(rng));
    for (std::size_t p = 0; p < c; ++p) {
      cplx dot{};
      for (std::size_t k = 0; k < n; ++k) dot += std::conj(u(k, p)) * v[k];
      for (std::size_t k = 0; k < n; ++k) v[k] -= dot * u(k, p);
    }
    double nrm = 0.0;
    for (const auto& x : v) nrm += std::norm(x);
    for (std::size_t k = 0; k < n; ++k) u(k, c) = v[k] / std::sqrt(nrm);
  }
  return u;
}

CMatrix antidiagonal(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t a = 0; a < n; ++a) m(a, n - 1 - a) = 1.0;
  return m;
}

ChainSpec mixed_chain(int length) {
  ChainSpec spec;
  spec.N = 2;
  const Irrep fund = make_irrep(2, RepKind::fundamental());
  const Irrep spin1 = make_irrep(2, RepKind::gl2(1.0));
  for (int j = 0; j < length; ++j) spec.sites.push_back({j % 2 == 0 ? fund : spin1, cplx(0.1 * j, -0.05 * j)});
  return spec;
}

std::string describe(const ChainSpec& spec) {
  std::string s = std::string(to_string(spec.boundary.kind)) + " N=" + std::to_string(spec.N) + " l=" + std::to_string(spec.length());
  if (spec.boundary.kind == Boundary::Kind::open) {
    s += " M=" + std::to_string(spec.boundary.M);
    char buf[48];
    std::snprintf(buf, sizeof buf, " xi=%g%+gi", spec.boundary.xi.real(), spec.boundary.xi.imag());
    s += buf;
  }
  for (const auto& site : spec.sites)
    if (site.irrep.kind().kind != RepKind::Kind::fundamental) return s + " mixed";
  return s;
}

template <class F>
void timed(Criterion& c, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.add("unexpected exception", false, e.what());
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Sweeps of criteria 4-7, kept for the residue criterion.
struct SweepCase {
  std::string label;
  ChainSpec spec;
  SweepResult sweep;
};
std::vector<SweepCase> g_sweeps;

const SweepResult& run_sweep(const std::string& label, const ChainSpec& spec) {
  g_sweeps.push_back({label, spec, sweep_and_match(spec, SolverStrategy{}, default_samples(5))});
  return g_sweeps.back().sweep;
}

void report_sweep(Criterion& c, const std::string& label, const SweepResult& sw, std::size_t expect_total) {
  const auto& r = sw.report;
  std::size_t singular = 0;
  for (const auto& rec : r.records)
    if (rec.singular) ++singular;
  bool residues = true;
  for (const auto& rec : r.records)
    if (rec.matched && !rec.residues_ok) residues = false;
  const bool pass = r.complete_regularized() && r.tally.total == expect_total && r.max_mismatch < 1e-8;
  c.add(label + " tally", pass,
        "regularized " + std::to_string(r.tally.regularized) + "/" + std::to_string(r.tally.total) + " (regular " + std::to_string(r.tally.regular) +
            ", singular solutions " + std::to_string(singular) + "), unmatched " + std::to_string(r.unmatched_count) + ", max mismatch " +
            sci(r.max_mismatch) + (residues ? "" : ", residue failures"));
}

// ---- criteria --------------------------------------------------------------

void criterion1(Criterion& c) {
  for (int n : {2, 3}) {
    for (const auto& row : identity_table<GaussianRational>(n, 10, 0.0)) c.add("exact " + row.name, row.pass, row.pass ? "exactly zero" : "residual " + sci(row.value));
    for (const auto& row : identity_table<cplx>(n, 10, 1e-12)) c.add("float " + row.name, row.pass, "residual " + sci(row.value));
  }
}

void criterion2(Criterion& c) {
  const auto pts = commutator_points();
  std::vector<ChainSpec> closed;
  for (int l = 1; l <= 3; ++l) {
    closed.push_back(homogeneous_chain(2, l));
    closed.push_back(homogeneous_chain(3, l));
    if (l >= 2) closed.push_back(mixed_chain(l));
  }
  for (const auto& spec : closed) {
    const auto row = transfer_commutativity("[t,t]", spec, pts, 1e-10);
    double sym = 0.0;
    for (const auto& [l, m] : pts) sym = std::max(sym, symmetry_commutator(spec, l, symmetry_generators(spec)));
    c.add("[t(l),t(m)] " + describe(spec), row.pass, sci(row.value));
    c.add("[t(l),D(e_ij)] all i,j " + describe(spec), sym < 1e-10, sci(sym));
  }
  for (int n : {2, 3})
    for (int m = 1; m < n; ++m)
      for (int l = 1; l <= 3; ++l) {
        const auto spec = homogeneous_chain(n, l, RepKind::fundamental(), Boundary::open(m, cplx(0.8, 0.3)));
        const auto row = transfer_commutativity("[b,b]", spec, pts, 1e-10);
        c.add("[b(l),b(m)] " + describe(spec), row.pass, sci(row.value));
        double sym = 0.0;
        for (const auto& [x, y] : pts) sym = std::max(sym, symmetry_commutator(spec, x, symmetry_generators(spec)));
        c.add("[b(l),D(e_ij)] gl(M)+gl(N-M) " + describe(spec), sym < 1e-10, sci(sym));
        if (l == 2) {
          std::vector<std::pair<int, int>> all;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) all.push_back({i, j});
          double full = 0.0;
          for (const auto& [x, y] : pts) full = std::max(full, symmetry_commutator(spec, x, all));
          c.add("negative control: full gl(N) fails " + describe(spec), full > 1e-10, sci(full));
        }
      }
  for (int n : {2, 3})
    for (int l = 1; l <= 3; ++l)
      for (const auto& [label, k] : {std::pair<std::string, CMatrix>{"K=identity", CMatrix::identity(static_cast<std::size_t>(n))},
                                     {"K=antidiagonal", antidiagonal(static_cast<std::size_t>(n))}}) {
        const auto spec = homogeneous_chain(n, l, RepKind::fundamental(), Boundary::snp(k));
        const auto row = transfer_commutativity("[s,s]", spec, pts, 1e-10);
        c.add("[s(l),s(m)] " + label + " " + describe(spec), row.pass, sci(row.value));
      }
}

void criterion3(Criterion& c) {
  const auto lams = sample_points(10, 101);
  for (const auto& [n, lmax] : {std::pair{2, 4}, std::pair{3, 3}})
    for (int l = 1; l <= lmax; ++l) {
      const auto spec = homogeneous_chain(n, l);
      const auto f = make_formula(spec);
      double worst = 0.0;
      for (const auto& x : lams) {
        const cplx expect = std::pow(x + I, l) + static_cast<double>(n - 1) * std::pow(x, l);
        const CMatrix t = transfer<cplx>(spec, x);
        const double scale = std::max(1.0, std::abs(expect));
        worst = std::max({worst, std::abs(f.pseudo_vacuum(x) - expect) / scale, std::abs(t(0, 0) - expect) / scale});
        for (std::size_t r = 1; r < t.rows(); ++r) worst = std::max(worst, std::abs(t(r, 0)) / scale);
      }
      c.add("(l+i)^l + (N-1)l^l " + describe(spec), worst < 1e-12, sci(worst));
    }
  std::vector<ChainSpec> general = {mixed_chain(3)};
  {
    ChainSpec s;
    s.N = 3;
    s.sites = {{make_irrep(3, RepKind::sym(2)), cplx(0.2, 0.1)}, {make_irrep(3, RepKind::fundamental()), cplx(-0.3, 0.0)}};
    general.push_back(s);
  }
  for (const auto& spec : general) {
    const auto f = make_formula(spec);
    double worst = 0.0;
    for (const auto& x : lams) {
      const CMatrix t = transfer<cplx>(spec, x);
      cplx sum = 0.0;
      for (const auto& p : drinfeld_polynomials(spec.sites)) sum += p(x);
      const double scale = std::max(1.0, std::abs(sum));
      worst = std::max({worst, std::abs(t(0, 0) - sum) / scale, std::abs(f.pseudo_vacuum(x) - sum) / scale});
      for (std::size_t r = 1; r < t.rows(); ++r) worst = std::max(worst, std::abs(t(r, 0)) / scale);
    }
    c.add("sum P_k " + describe(spec) + (spec.N == 3 ? " sym2+fund" : ""), worst < 1e-12, sci(worst));
  }
  std::vector<ChainSpec> open;
  for (const cplx xi : {cplx(1.0), cplx(2.0, 1.0)})
    for (int l = 1; l <= 3; ++l) open.push_back(homogeneous_chain(2, l, RepKind::fundamental(), Boundary::open(1, xi)));
  for (int m : {1, 2}) {
    auto spec = homogeneous_chain(3, 2, RepKind::fundamental(), Boundary::open(m, cplx(0.6, -0.4)));
    spec.sites[1].a = cplx(0.25, 0.1);
    open.push_back(spec);
  }
  for (const auto& spec : open) {
    const auto f = make_formula(spec);
    double worst = 0.0;
    for (const auto& x : lams) {
      const CMatrix t = transfer<cplx>(spec, x);
      const double scale = std::max(1.0, std::abs(t(0, 0)));
      worst = std::max(worst, std::abs(t(0, 0) - f.pseudo_vacuum(x)) / scale);
      for (std::size_t r = 1; r < t.rows(); ++r) worst = std::max(worst, std::abs(t(r, 0)) / scale);
    }
    c.add("sum g_k beta_k " + describe(spec), worst < 1e-10 && f.extraction_residual < 1e-10,
          "oracle " + sci(worst) + ", held-out " + sci(f.extraction_residual));
  }
}

void criterion4(Criterion& c) {
  for (int l = 2; l <= 4; ++l) {
    const auto spec = homogeneous_chain(2, l);
    report_sweep(c, describe(spec), run_sweep(describe(spec), spec), std::size_t{1} << l);
  }
}

void criterion5(Criterion& c) {
  const auto spec = homogeneous_chain(3, 2);
  report_sweep(c, describe(spec), run_sweep(describe(spec), spec), 9);
}

void criterion6(Criterion& c) {
  const auto spec = homogeneous_chain(2, 2, RepKind::gl2(1.0));
  const auto& sw = run_sweep("spin-1 " + describe(spec), spec);
  const auto f = make_formula(spec);
  const int l = static_cast<int>(spec.length());
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& solve : sw.solves)
    for (const auto& r : solve.solutions) {
      if (r.total() == 0) continue;
      const auto sys = bae_system(f, r.M);
      const auto sides = bae_sides(sys, flatten(r));
      for (std::size_t e = 0; e < sys.size(); ++e) {
        const int k = sys.equations[e].level;
        const auto& w = spec.sites[0].irrep.weight();
        const double bm = w[static_cast<std::size_t>(k - 1)] - w[static_cast<std::size_t>(k)];
        const double bp = w[static_cast<std::size_t>(k - 1)] + w[static_cast<std::size_t>(k)];
        const cplx x = r.level(k)[sys.equations[e].index];
        const cplx rhs = sides[e].rhs_num / sides[e].rhs_den;
        const cplx expect = std::pow(e_fn(bm, x - I * (static_cast<double>(k) - bp) / 2.0), l);
        worst = std::max(worst, std::abs(rhs - expect) / std::max(1.0, std::abs(expect)));
        ++checked;
      }
    }
  c.add("RHS = e_{b-}(x - i(k-b+)/2)^l at solver roots", checked > 0 && worst < 1e-10, std::to_string(checked) + " equations, worst " + sci(worst));
  report_sweep(c, describe(spec) + " spin-1", sw, 9);
}

void criterion7(Criterion& c) {
  for (const cplx xi : {cplx(1.0), cplx(2.0, 1.0)}) {
    const auto spec = homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::open(1, xi));
    report_sweep(c, describe(spec), run_sweep(describe(spec), spec), 4);
    // boundary factor sensitivity of the matched solutions
    const auto& sw = g_sweeps.back().sweep;
    auto moved = spec;
    moved.boundary.xi += cplx(0.25, -0.15);
    const auto fm = make_formula(moved);
    double smallest = 1e300;
    for (const auto& s : sw.solves)
      for (const auto& r : s.solutions) {
        if (r.total() == 0) continue;
        for (const auto& v : bae_residual(fm, r)) smallest = std::min(smallest, std::abs(v));
      }
    c.add("perturbed xi breaks level-M equations " + describe(spec), smallest > 1e-6, "smallest residual " + sci(smallest));
    // spectrum depends on K only through D_xi
    const cplx lam(0.41, -0.23);
    auto ref = eigenvalues_dense(transfer<cplx>(spec, lam)).values;
    sort_spectrum(ref);
    double worst = 0.0;
    for (unsigned seed : {3u, 8u, 21u}) {
      auto rotated = spec;
      rotated.boundary.U = random_unitary(2, seed);
      auto ev = eigenvalues_dense(transfer<cplx>(rotated, lam)).values;
      sort_spectrum(ev);
      for (std::size_t k = 0; k < ev.size(); ++k) worst = std::max(worst, std::abs(ev[k] - ref[k]));
    }
    c.add("spectrum invariant under random unitary U " + describe(spec), worst < 1e-9, sci(worst));
  }
  // level structure on a rank-3 chain: only level-M residuals move with xi
  for (int m : {1, 2}) {
    auto spec = homogeneous_chain(3, 2, RepKind::fundamental(), Boundary::open(m, cplx(0.7, 0.3)));
    BetheRootSet r;
    r.M = {2, 1};
    r.roots = {{cplx(0.31, 0.12), cplx(0.52, -0.44)}, {cplx(0.27, -0.36)}};
    const auto base = bae_residual(make_formula(spec), r);
    spec.boundary.xi += cplx(0.25, -0.15);
    const auto moved = bae_residual(make_formula(spec), r);
    const auto sys = bae_lhs_structure(3, r.M, true);
    double other = 0.0, level = 1e300;
    for (std::size_t e = 0; e < sys.size(); ++e) {
      const double d = std::abs(moved[e] - base[e]);
      if (sys.equations[e].level == m)
        level = std::min(level, d);
      else
        other = std::max(other, d / std::max(1.0, std::abs(base[e])));
    }
    c.add("xi enters only level k=M (N=3, M=" + std::to_string(m) + ")", level > 1e-6 && other < 1e-13,
          "level-M change " + sci(level) + ", other levels " + sci(other));
  }
}

void criterion8(Criterion& c) {
  for (int l : {2, 3}) {
    const auto spec = homogeneous_chain(2, l);
    const auto h = hamiltonian(spec);
    const auto fit = affine_fit(h.H, periodic_permutation_sum(spec));
    char buf[96];
    std::snprintf(buf, sizeof buf, "residual %.2e, c1=%.6f%+.6fi, c0=%.6f%+.6fi", fit.residual, fit.slope.real(), fit.slope.imag(), fit.offset.real(),
                  fit.offset.imag());
    c.add("H = c1 sum P + c0 " + describe(spec), fit.residual < 1e-8, buf);
  }
  for (const cplx xi : {cplx(1.0), cplx(2.0, 1.0)}) {
    const auto spec = homogeneous_chain(2, 2, RepKind::fundamental(), Boundary::open(1, xi));
    const auto h = hamiltonian(spec);
    double worst = 0.0;
    for (const auto& x : sample_points(5, 7)) worst = std::max(worst, relative_commutator(h.H, normalized_transfer(spec, x)));
    c.add("[-b'(0)/2, b(l)] " + describe(spec), worst < 1e-8, sci(worst));
  }
}

void criterion9(Criterion& c) {
  std::size_t accepted = 0, controls = 0;
  double worst_ratio = 0.0, weakest_control = 1e300;
  bool all_ok = true, controls_fail = true;
  for (const auto& sc : g_sweeps) {
    const auto f = make_formula(sc.spec);
    for (const auto& rec : sc.sweep.report.records) {
      if (!rec.matched) continue;
      double scale = 0.0;
      for (const auto& v : rec.values) scale = std::max(scale, std::abs(v));
      ++accepted;
      for (const auto& e : rec.residues) worst_ratio = std::max(worst_ratio, e.magnitude / scale);
      all_ok = all_ok && rec.residues_ok;
      if (rec.singular || rec.roots.total() == 0) continue;
      // corrupted control: shift the first root by 0.1
      auto bad = rec.roots;
      for (auto& level : bad.roots)
        if (!level.empty()) {
          level[0] += 0.1;
          break;
        }
      double worst = 0.0;
      for (const auto& e : residue_check(f, bad)) worst = std::max(worst, e.magnitude / scale);
      ++controls;
      weakest_control = std::min(weakest_control, worst);
      controls_fail = controls_fail && worst > 1e-8;
    }
  }
  c.add("accepted solutions pass residue_check", accepted > 0 && all_ok && worst_ratio < 1e-8,
        std::to_string(accepted) + " solutions, worst |res|/scale " + sci(worst_ratio));
  c.add("corrupted-root controls fail residue_check", controls > 0 && controls_fail,
        std::to_string(controls) + " controls, weakest |res|/scale " + sci(weakest_control));
}

void criterion10(Criterion& c) {
  const auto pts = commutator_points();
  const auto samples = default_samples(5);
  for (int l = 1; l <= 2; ++l)
    for (const auto& [label, k] : {std::pair<std::string, CMatrix>{"K=identity", CMatrix::identity(2)}, {"K=antidiagonal", antidiagonal(2)}}) {
      ChainSpec spec = homogeneous_chain(2, l, RepKind::fundamental(), Boundary::snp(k));
      for (std::size_t j = 0; j < spec.sites.size(); ++j) spec.sites[j].a = cplx(0.3 - 0.5 * static_cast<double>(j), 0.0);
      const std::string tag = label + " " + describe(spec);
      const auto row = transfer_commutativity("[s,s]", spec, pts, 1e-10);
      c.add("[s(l),s(m)] " + tag, row.pass, sci(row.value));
      const bool antidiag = label == "K=antidiagonal";
      try {
        const auto f = make_formula(spec);
        double worst = 0.0;
        for (const auto& sp : spectrum(spec, samples)) {
          const auto v = sp.all();
          double scale = 1.0;
          for (const auto& x : v) scale = std::max(scale, std::abs(x));
          double best = 1e300;
          for (const auto& x : v) best = std::min(best, std::abs(x - f.pseudo_vacuum(sp.lambda)));
          worst = std::max(worst, best / scale);
        }
        c.add("pseudo-vacuum sum g_k sigma_k " + tag, worst < 1e-10 && f.extraction_residual < 1e-10,
              "spectrum " + sci(worst) + ", held-out " + sci(f.extraction_residual), antidiag);
        std::size_t evaluated = 0;
        for (const auto& m : enumerate_M(spec)) {
          if (m[0] == 0 || m[0] > 2) continue;
          BetheRootSet r;
          r.M = m;
          r.roots = {std::vector<cplx>(static_cast<std::size_t>(m[0]))};
          for (int n = 0; n < m[0]; ++n) r.roots[0][static_cast<std::size_t>(n)] = cplx(0.31 + 0.4 * n, 0.17 - 0.3 * n);
          evaluated += bae_residual(f, r).size();
          const auto solved = solve_bae(f, spec, m);
          for (const auto& s : solved.solutions) evaluated += bae_residual(f, s).size();
        }
        c.add("generic-term BAE residuals evaluate " + tag, evaluated > 0, std::to_string(evaluated) + " residual entries", antidiag);
      } catch (const Error& e) {
        const double r = snp_plain_reference_residual(spec, cplx(0.37, 0.21));
        c.add("pseudo-vacuum sum g_k sigma_k " + tag, false, std::string(e.what()) + "; plain-frame column residual " + sci(r), antidiag);
        c.add("generic-term BAE residuals evaluate " + tag, false, "no boundary polynomials without a reference state", antidiag);
      }
    }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria 1-10"};
  std::vector<int> documented;
  app.add_option("--expect-documented-failures", documented, "criteria whose ledgered sub-check failures are tolerated");
  CLI11_PARSE(app, argc, argv);

  struct Entry {
    int id;
    const char* title;
    double budget;
    std::function<void(Criterion&)> run;
  };
  const std::vector<Entry> entries = {
      {1, "structural identities (exact and floating)", 10.0, criterion1},
      {2, "commutativity and symmetry", 60.0, criterion2},
      {3, "pseudo-vacuum eigenvalues", 60.0, criterion3},
      {4, "completeness, closed gl(2), l = 2..4", 300.0, criterion4},
      {5, "completeness, closed gl(3), l = 2", 120.0, criterion5},
      {6, "higher spin: gl(2) spin-1, l = 2", 120.0, criterion6},
      {7, "open chain, N = 2, M = 1", 300.0, criterion7},
      {8, "Hamiltonians", 60.0, criterion8},
      {9, "residues and corrupted controls", 60.0, criterion9},
      {10, "soliton non-preserving boundary", 60.0, criterion10},
  };
  const std::set<int> tolerated(documented.begin(), documented.end());
  bool ok = true;
  for (const auto& e : entries) {
    Criterion c;
    c.id = e.id;
    c.title = e.title;
    c.budget = e.budget;
    timed(c, e.run);
    std::printf("%s criterion %d: %s (%.2f s, budget %.0f s)\n", c.pass() ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds, c.budget);
    for (const auto& s : c.subs)
      std::printf("    %s%s %s: %s\n", s.pass ? "ok  " : "FAIL", (!s.pass && s.documented) ? " [documented]" : "", s.name.c_str(), s.detail.c_str());
    if (!c.pass() && !(tolerated.count(c.id) && c.only_documented_failures())) ok = false;
    std::fflush(stdout);
  }
  std::printf("%s\n", ok ? "acceptance: OK" : "acceptance: FAILED");
  return ok ? 0 : 1;
}
