#pragma once
// JSON run configuration and result documents.

#include "glbethe/verify.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace glb {

using json = nlohmann::ordered_json;

inline constexpr const char* kConfigSchema = "glbethe-config/1";
inline constexpr const char* kResultSchema = "glbethe-result/1";

struct RunConfig {
  ChainSpec spec;
  std::vector<cplx> samples;
  std::vector<std::vector<int>> M;  // root counts for solve-bae / verify
  bool sweep = false;
  SolverStrategy solver;
  MatchOptions match;
  double tol_identity = 1e-10;
  bool exact = false;

  void validate() const {
    spec.validate();
    if (samples.size() < 3) throw Error(ErrorKind::config, "need at least 3 samples");
    for (double t : {solver.tol, solver.tol_dup, match.tol_match, match.cluster_radius, match.residue_tol, tol_identity})
      if (!(t > 0.0)) throw Error(ErrorKind::config, "tolerances must be positive");
    for (const auto& m : M) {
      if (static_cast<int>(m.size()) != spec.N - 1) throw Error(ErrorKind::config, "each M vector needs N-1 entries");
      for (int v : m)
        if (v < 0) throw Error(ErrorKind::config, "root counts must be non-negative");
    }
  }
};

// ---- JSON helpers -----------------------------------------------------------

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(to_json(z));
  return a;
}

inline json to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(to_json(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

namespace detail {

inline const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::config, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline cplx complex_from(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(ErrorKind::config, what + " must be a number or a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline CMatrix matrix_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::config, what + " must be a non-empty array of rows");
  const std::size_t n = j.size();
  CMatrix m(n, j[0].size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != m.cols()) throw Error(ErrorKind::config, what + " rows must have equal length");
    for (std::size_t k = 0; k < m.cols(); ++k) m(i, k) = complex_from(j[i][k], what);
  }
  return m;
}

inline RepKind rep_from(const json& j) {
  const auto kind = require(j, "kind").get<std::string>();
  if (kind == "fundamental") return RepKind::fundamental();
  if (kind == "gl2_spin") return RepKind::gl2(require(j, "spin").get<double>());
  if (kind == "symmetric_power") return RepKind::sym(require(j, "power").get<int>());
  throw Error(ErrorKind::config, "unknown representation kind '" + kind + "'");
}

inline json rep_to_json(const RepKind& r) {
  switch (r.kind) {
    case RepKind::Kind::fundamental: return {{"kind", "fundamental"}};
    case RepKind::Kind::gl2_spin: return {{"kind", "gl2_spin"}, {"spin", r.spin}};
    case RepKind::Kind::symmetric_power: return {{"kind", "symmetric_power"}, {"power", r.power}};
  }
  return {};
}

inline Boundary boundary_from(const json& j, int n) {
  const auto kind = require(j, "kind").get<std::string>();
  if (kind == "closed") return Boundary::closed();
  if (kind == "open") {
    const int m = require(j, "M").get<int>();
    const cplx xi = j.contains("xi") ? complex_from(j.at("xi"), "xi") : cplx(1.0, 0.0);
    std::optional<CMatrix> u;
    if (j.contains("U") && !j.at("U").is_null()) {
      if (j.at("U").is_string()) {
        if (j.at("U").get<std::string>() != "identity") throw Error(ErrorKind::config, "U must be 'identity' or a matrix");
      } else {
        u = matrix_from(j.at("U"), "U");
      }
    }
    return Boundary::open(m, xi, u);
  }
  if (kind == "snp") {
    if (!j.contains("K")) return Boundary::snp(CMatrix::identity(static_cast<std::size_t>(n)));
    const auto& k = j.at("K");
    if (k.is_string()) {
      const auto name = k.get<std::string>();
      CMatrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
      if (name == "identity") return Boundary::snp(CMatrix::identity(static_cast<std::size_t>(n)));
      if (name == "antidiagonal") {
        for (std::size_t a = 0; a < m.rows(); ++a) m(a, m.rows() - 1 - a) = 1.0;
        return Boundary::snp(m);
      }
      throw Error(ErrorKind::config, "K must be 'identity', 'antidiagonal' or a matrix");
    }
    return Boundary::snp(matrix_from(k, "K"));
  }
  throw Error(ErrorKind::config, "unknown boundary kind '" + kind + "'");
}

}  // namespace detail

inline RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::config, "config must be an object");
  if (j.contains("schema") && j.at("schema") != kConfigSchema)
    throw Error(ErrorKind::config, "unsupported schema " + j.at("schema").dump());
  RunConfig c;
  try {
    c.spec.N = detail::require(j, "rank").get<int>();
    if (c.spec.N < 2) throw Error(ErrorKind::config, "rank must be at least 2");
    for (const auto& s : detail::require(j, "sites")) {
      const RepKind kind = detail::rep_from(detail::require(s, "rep"));
      Irrep rep = make_irrep(c.spec.N, kind);
      const int count = s.contains("count") ? s.at("count").get<int>() : 1;
      if (count < 1) throw Error(ErrorKind::config, "site count must be positive");
      if (s.contains("a") && s.at("a").is_array() && !s.at("a").empty() && s.at("a")[0].is_array()) {
        if (static_cast<int>(s.at("a").size()) != count) throw Error(ErrorKind::config, "inhomogeneity list length differs from count");
        for (const auto& a : s.at("a")) c.spec.sites.push_back({rep, detail::complex_from(a, "a")});
      } else {
        const cplx a = s.contains("a") ? detail::complex_from(s.at("a"), "a") : cplx{};
        for (int k = 0; k < count; ++k) c.spec.sites.push_back({rep, a});
      }
    }
    c.spec.boundary = j.contains("boundary") ? detail::boundary_from(j.at("boundary"), c.spec.N) : Boundary::closed();
    if (j.contains("max_dim")) c.spec.max_dim = j.at("max_dim").get<std::size_t>();
    if (j.contains("samples")) {
      const auto& s = j.at("samples");
      if (s.is_number_integer()) {
        c.samples = default_samples(s.get<int>());
      } else {
        for (const auto& v : s) c.samples.push_back(detail::complex_from(v, "samples"));
      }
    } else {
      c.samples = default_samples(5);
    }
    if (j.contains("M")) {
      for (const auto& m : j.at("M")) {
        if (m.is_number_integer())
          c.M.push_back({m.get<int>()});
        else
          c.M.push_back(m.get<std::vector<int>>());
      }
    }
    if (j.contains("sweep_M")) c.sweep = j.at("sweep_M").get<bool>();
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      c.solver.grid_starts = s.value("grid_starts", c.solver.grid_starts);
      c.solver.random_starts = s.value("random_starts", c.solver.random_starts);
      c.solver.seed = s.value("seed", c.solver.seed);
      c.solver.max_iterations = s.value("max_iterations", c.solver.max_iterations);
      c.solver.max_roots = s.value("max_roots", c.solver.max_roots);
      c.solver.deflation = s.value("deflation", c.solver.deflation);
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      c.solver.tol = t.value("solve", c.solver.tol);
      c.solver.tol_dup = t.value("dup", c.solver.tol_dup);
      c.solver.singular_tol = t.value("singular", c.solver.singular_tol);
      c.match.tol_match = t.value("match", c.match.tol_match);
      c.match.cluster_radius = t.value("cluster", c.match.cluster_radius);
      c.match.residue_tol = t.value("residue", c.match.residue_tol);
      c.tol_identity = t.value("identity", c.tol_identity);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::unsupported_representation) throw Error(ErrorKind::config, e.what());
    throw;
  }
  try {
    c.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    throw Error(ErrorKind::config, e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("parse error: ") + e.what());
  }
  return parse_config(j);
}

inline json spec_to_json(const ChainSpec& spec) {
  json sites = json::array();
  for (const auto& s : spec.sites) sites.push_back({{"rep", detail::rep_to_json(s.irrep.kind())}, {"a", to_json(s.a)}});
  json b = {{"kind", to_string(spec.boundary.kind)}};
  if (spec.boundary.kind == Boundary::Kind::open) {
    b["M"] = spec.boundary.M;
    b["xi"] = to_json(spec.boundary.xi);
    b["U"] = spec.boundary.U ? to_json(*spec.boundary.U) : json("identity");
  }
  if (spec.boundary.kind == Boundary::Kind::snp) b["K"] = to_json(spec.boundary.Ktilde);
  return {{"schema", kConfigSchema}, {"rank", spec.N}, {"sites", sites}, {"boundary", b}, {"max_dim", spec.max_dim}};
}

inline json to_json(const BetheRootSet& r) {
  json levels = json::array();
  for (const auto& l : r.roots) levels.push_back(to_json(l));
  json out = {{"M", r.M}, {"roots", levels}, {"residual", r.residual}, {"iterations", r.iterations},
              {"seed", r.seed}, {"start", r.start}, {"singular", r.singular}};
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

inline BetheRootSet rootset_from_json(const json& j) {
  BetheRootSet r;
  r.M = j.at("M").get<std::vector<int>>();
  for (const auto& l : j.at("roots")) {
    std::vector<cplx> level;
    for (const auto& z : l) level.push_back(detail::complex_from(z, "root"));
    r.roots.push_back(level);
  }
  r.residual = j.value("residual", 0.0);
  r.singular = j.value("singular", false);
  return r;
}

inline json to_json(const SolveResult& s) {
  json sol = json::array(), sing = json::array(), rej = json::array();
  for (const auto& r : s.solutions) sol.push_back(to_json(r));
  for (const auto& r : s.singular) sing.push_back(to_json(r));
  for (const auto& r : s.rejected) rej.push_back(to_json(r));
  return {{"solutions", sol}, {"singular", sing}, {"rejected", rej}, {"starts", s.starts},
          {"jacobian_failures", s.jacobian_failures}, {"log", s.log}};
}

inline json to_json(const SpectrumReport& rep) {
  json recs = json::array();
  for (const auto& r : rep.records) {
    json res = json::array();
    for (const auto& e : r.residues) res.push_back({{"level", e.level}, {"index", e.index}, {"pole", to_json(e.pole)}, {"magnitude", e.magnitude}});
    recs.push_back({{"rootset", to_json(r.roots)},
                    {"singular", r.singular},
                    {"values", to_json(r.values)},
                    {"weight", r.weight},
                    {"dominant", r.dominant},
                    {"multiplicity", r.multiplicity},
                    {"matched", r.matched},
                    {"branch", r.branch},
                    {"max_mismatch", r.max_mismatch},
                    {"degeneracy", r.degeneracy},
                    {"in_weight_sector", r.in_weight_sector},
                    {"oversubscribed", r.oversubscribed},
                    {"residues", res},
                    {"residues_ok", r.residues_ok},
                    {"warnings", r.warnings}});
  }
  json unmatched = json::array();
  for (const auto& u : rep.unmatched) unmatched.push_back(to_json(u));
  return {{"samples", to_json(rep.samples)},
          {"records", recs},
          {"unmatched", unmatched},
          {"unmatched_count", rep.unmatched_count},
          {"tally", {{"regular", rep.tally.regular}, {"regularized", rep.tally.regularized}, {"total", rep.tally.total}}},
          {"complete_regular", rep.complete_regular()},
          {"complete_regularized", rep.complete_regularized()},
          {"max_mismatch", rep.max_mismatch},
          {"oracle_backward_error", rep.oracle_backward_error},
          {"warnings", rep.warnings}};
}

}  // namespace glb
