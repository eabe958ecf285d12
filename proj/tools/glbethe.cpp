// glbethe: command-line front end.
//
//   glbethe <spectrum|solve-bae|verify|hamiltonian|identities> --config run.json [options]
//
// Exit status: 0 success, 1 computation failure or failed hard check,
// 2 configuration error.

#include "glbethe/checks.hpp"
#include "glbethe/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace glb;

struct Options {
  std::string command;
  std::string config;
  std::string out;
  std::string csv;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol;
  bool exact = false;
  bool sweep = false;
};

struct Outcome {
  json result;
  bool ok = true;
  std::string csv;
};

std::string csv_complex(cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << z.real() << ',' << z.imag();
  return os.str();
}

json check_rows(const std::vector<CheckRow>& rows, bool& ok) {
  json a = json::array();
  for (const auto& r : rows) {
    a.push_back({{"name", r.name}, {"value", r.value}, {"tol", r.tol}, {"exact", r.exact}, {"pass", r.pass}});
    ok = ok && r.pass;
  }
  return a;
}

Outcome run_spectrum(const RunConfig& cfg) {
  Outcome o;
  const auto spectra = spectrum(cfg.spec, cfg.samples);
  json samples = json::array();
  std::ostringstream csv;
  csv << "sample,lambda_re,lambda_im,sector,eigen_re,eigen_im\n";
  double backward = 0.0;
  for (std::size_t j = 0; j < spectra.size(); ++j) {
    const auto& sp = spectra[j];
    json sectors = json::array();
    for (const auto& s : sp.sectors) {
      auto v = s.values;
      sort_spectrum(v);
      sectors.push_back({{"weight", s.weight}, {"eigenvalues", to_json(v)}});
      std::ostringstream w;
      for (std::size_t k = 0; k < s.weight.size(); ++k) w << (k ? " " : "") << s.weight[k];
      for (const auto& z : v) csv << j << ',' << csv_complex(sp.lambda) << ',' << w.str() << ',' << csv_complex(z) << '\n';
    }
    samples.push_back({{"lambda", to_json(sp.lambda)},
                       {"denominator", to_json(sp.denominator)},
                       {"sectors", sectors},
                       {"backward_error", sp.backward_error},
                       {"off_sector_residual", sp.off_sector_residual}});
    backward = std::max(backward, sp.backward_error);
  }
  o.ok = backward < 1e-12;
  o.result = {{"samples", samples}, {"max_backward_error", backward}};
  o.csv = csv.str();
  return o;
}

std::vector<std::vector<int>> requested_M(const RunConfig& cfg) {
  if (cfg.sweep || cfg.M.empty()) return enumerate_M(cfg.spec);
  return cfg.M;
}

Outcome run_solve(const RunConfig& cfg) {
  Outcome o;
  const auto f = make_formula(cfg.spec);
  json runs = json::array();
  for (const auto& m : requested_M(cfg)) {
    std::size_t roots = 0;
    for (int v : m) roots += static_cast<std::size_t>(v);
    if (roots > cfg.solver.max_roots) {
      runs.push_back({{"M", m}, {"skipped", "root count exceeds solver.max_roots"}});
      continue;
    }
    json r = to_json(solve_bae(f, cfg.spec, m, cfg.solver));
    r["M"] = m;
    runs.push_back(r);
  }
  o.result = {{"runs", runs}, {"extraction_residual", f.extraction_residual}};
  return o;
}

Outcome run_verify(const RunConfig& cfg) {
  Outcome o;
  const auto f = make_formula(cfg.spec);
  std::vector<BetheRootSet> reg, sing;
  json runs = json::array();
  for (const auto& m : requested_M(cfg)) {
    std::size_t roots = 0;
    for (int v : m) roots += static_cast<std::size_t>(v);
    if (roots > cfg.solver.max_roots) continue;
    const auto s = solve_bae(f, cfg.spec, m, cfg.solver);
    runs.push_back({{"M", m}, {"regular", s.solutions.size()}, {"singular", s.singular.size()}, {"rejected", s.rejected.size()}, {"log", s.log}});
    reg.insert(reg.end(), s.solutions.begin(), s.solutions.end());
    sing.insert(sing.end(), s.singular.begin(), s.singular.end());
  }
  const auto rep = match_spectrum(cfg.spec, f, reg, sing, cfg.samples, cfg.match);
  o.result = {{"solves", runs}, {"report", to_json(rep)}};
  if (cfg.spec.boundary.kind == Boundary::Kind::snp) {
    // only the pseudo-vacuum is asserted for snp boundaries
    o.ok = false;
    for (const auto& r : rep.records)
      if (r.roots.total() == 0 && r.matched) o.ok = true;
  } else {
    o.ok = rep.complete_regularized();
    for (const auto& r : rep.records)
      if (!r.singular && (!r.matched || !r.residues_ok)) o.ok = false;
  }
  std::ostringstream csv;
  csv << "sample,lambda_re,lambda_im,record,value_re,value_im,matched\n";
  for (std::size_t k = 0; k < rep.records.size(); ++k)
    for (std::size_t j = 0; j < rep.samples.size(); ++j)
      csv << j << ',' << csv_complex(rep.samples[j]) << ',' << k << ',' << csv_complex(rep.records[k].values[j]) << ',' << rep.records[k].matched << '\n';
  o.csv = csv.str();
  return o;
}

Outcome run_hamiltonian(const RunConfig& cfg) {
  Outcome o;
  const auto h = hamiltonian(cfg.spec);
  auto ev = eigenvalues_dense(h.H).values;
  sort_spectrum(ev);
  o.result = {{"matrix", to_json(h.H)}, {"spectrum", to_json(ev)}, {"extrapolation_error", h.extrapolation_error}};
  if (cfg.spec.boundary.kind == Boundary::Kind::closed) {
    const auto fit = affine_fit(h.H, periodic_permutation_sum(cfg.spec));
    o.result["affine_fit"] = {{"slope", to_json(fit.slope)}, {"offset", to_json(fit.offset)}, {"residual", fit.residual}};
    o.ok = fit.residual < 1e-8;
  } else {
    double worst = 0.0;
    for (const auto& l : cfg.samples) worst = std::max(worst, relative_commutator(h.H, normalized_transfer(cfg.spec, l)));
    o.result["commutator_with_transfer"] = worst;
    o.ok = worst < 1e-8;
  }
  return o;
}

Outcome run_identities(const RunConfig& cfg, bool exact) {
  Outcome o;
  bool ok = true;
  const int n = cfg.spec.N;
  json rows = exact ? check_rows(identity_table<GaussianRational>(n, 10, 0.0), ok) : check_rows(identity_table<cplx>(n, 10, cfg.tol_identity), ok);
  std::vector<CheckRow> chain_rows;
  chain_rows.push_back(transfer_commutativity("transfer commutativity (configured chain)", cfg.spec, commutator_points(), cfg.tol_identity));
  if (cfg.spec.boundary.kind != Boundary::Kind::snp) {
    double worst = 0.0;
    for (const auto& [l, m] : commutator_points()) worst = std::max(worst, symmetry_commutator(cfg.spec, l, symmetry_generators(cfg.spec)));
    chain_rows.push_back({"symmetry generators (configured chain)", worst, cfg.tol_identity, false, worst < cfg.tol_identity});
  }
  json crow = check_rows(chain_rows, ok);
  o.result = {{"mode", exact ? "exact" : "floating"}, {"identities", rows}, {"chain", crow}};
  o.ok = ok;
  return o;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::config, "cannot write '" + path + "'");
  out << text;
}

int emit(const Options& opt, json doc, int code) {
  const std::string text = doc.dump(2) + "\n";
  try {
    if (opt.out.empty())
      std::cout << text;
    else
      write_text(opt.out, text);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gl(N) spin-chain transfer matrices, Bethe equations and exact-diagonalization checks"};
  app.require_subcommand(1);
  Options opt;
  for (const char* name : {"spectrum", "solve-bae", "verify", "hamiltonian", "identities"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "run configuration (JSON)")->required();
    sub->add_option("--out", opt.out, "result document path (default: stdout)");
    sub->add_option("--csv", opt.csv, "optional CSV table of sample/eigenvalue pairs");
    sub->add_option("--seed", opt.seed, "solver RNG seed");
    sub->add_option("--samples", opt.samples, "number of spectral-parameter samples");
    sub->add_option("--tol", opt.tol, "solver tolerance (identities: floating-point tolerance)");
    sub->add_flag("--exact", opt.exact, "exact rational arithmetic (identities only)");
    sub->add_flag("--sweep-M", opt.sweep, "enumerate all admissible root-count vectors");
    sub->callback([&opt, sub] { opt.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  json doc = {{"schema", kResultSchema}, {"command", opt.command}};
  RunConfig cfg;
  try {
    cfg = load_config(opt.config);
    if (opt.seed) cfg.solver.seed = *opt.seed;
    if (opt.samples) cfg.samples = default_samples(*opt.samples);
    if (opt.tol) {
      cfg.solver.tol = *opt.tol;
      cfg.tol_identity = *opt.tol;
    }
    if (opt.sweep) cfg.sweep = true;
    if (opt.exact && opt.command != "identities") throw Error(ErrorKind::config, "--exact applies to the identities command only");
    cfg.validate();
  } catch (const Error& e) {
    doc["ok"] = false;
    doc["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    std::cerr << e.what() << '\n';
    return emit(opt, doc, 2);
  }
  doc["config"] = spec_to_json(cfg.spec);
  doc["seed"] = cfg.solver.seed;
  doc["samples"] = to_json(cfg.samples);
  try {
    Outcome o;
    if (opt.command == "spectrum")
      o = run_spectrum(cfg);
    else if (opt.command == "solve-bae")
      o = run_solve(cfg);
    else if (opt.command == "verify")
      o = run_verify(cfg);
    else if (opt.command == "hamiltonian")
      o = run_hamiltonian(cfg);
    else
      o = run_identities(cfg, opt.exact);
    doc["ok"] = o.ok;
    doc["result"] = o.result;
    if (!opt.csv.empty() && !o.csv.empty()) write_text(opt.csv, o.csv);
    return emit(opt, doc, o.ok ? 0 : 1);
  } catch (const Error& e) {
    doc["ok"] = false;
    doc["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    std::cerr << e.what() << '\n';
    return emit(opt, doc, e.kind() == ErrorKind::config ? 2 : 1);
  }
}
