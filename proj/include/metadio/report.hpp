#pragma once

// JSON reports (format v1). Everything except the "timing" object is a pure
// function of the input and the budget.

#include <string>

#include "json.hpp"
#include "metadio/decide.hpp"
#include "metadio/frontend.hpp"

#ifndef METADIO_VERSION
#define METADIO_VERSION "0.1.0"
#endif

namespace metadio {

using Json = nlohmann::ordered_json;

class ReportError : public std::runtime_error {
 public:
  explicit ReportError(const std::string& what) : std::runtime_error("report: " + what) {}
};

inline Json to_json(const ModulusLevel& lv) {
  return Json{{"index", lv.index},   {"component", lv.component}, {"modulus", lv.modulus},
              {"poly", lv.poly},     {"period", lv.period},       {"lattice", lv.lattice},
              {"nodes", lv.nodes},   {"survivors", lv.survivors}};
}

inline Json chain_json(const std::vector<ModulusLevel>& chain) {
  Json a = Json::array();
  for (const auto& lv : chain) a.push_back(to_json(lv));
  return a;
}

inline Json to_json(const Certificate& c) {
  Json j{{"version", c.version}, {"system_hash", c.system_hash}};
  if (c.kind == Certificate::Kind::LinearInfeasible) {
    j["kind"] = "linear_infeasible";
    j["row"] = {{"row", c.row.row}, {"divisor", c.row.divisor.get_str()}, {"value", c.row.value.get_str()}};
    return j;
  }
  j["kind"] = "branches";
  Json bs = Json::array();
  for (const auto& b : c.branches) {
    Json jb;
    switch (b.kind) {
      case BranchCert::Kind::EmptyDisjunction:
        jb = {{"kind", "empty_disjunction"}, {"stage", b.stage}};
        break;
      case BranchCert::Kind::Modulus:
        jb = {{"kind", "modulus"}, {"chain", chain_json(b.chain)}};
        break;
      case BranchCert::Kind::Leaves: {
        Json ls = Json::array();
        for (const auto& l : b.leaves) {
          if (l.kind == LeafCert::Kind::Degenerate) ls.push_back({{"kind", "degenerate"}});
          else ls.push_back({{"kind", "modulus"}, {"chain", chain_json(l.chain)}});
        }
        jb = {{"kind", "leaves"}, {"leaves", ls}};
        break;
      }
    }
    bs.push_back(jb);
  }
  j["branches"] = bs;
  return j;
}

namespace detail {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ReportError(std::string("missing field `") + key + "`");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ReportError(std::string("bad field `") + key + "`");
  }
}

inline void only_keys(const Json& j, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : keys) ok = ok || k == a;
    if (!ok) throw ReportError("unexpected field `" + k + "`");
  }
}

inline Int big(const Json& j, const char* key) {
  std::string s = field<std::string>(j, key);
  Int v;
  if (v.set_str(s, 10) != 0) throw ReportError(std::string("bad integer in `") + key + "`");
  return v;
}

inline std::vector<ModulusLevel> chain_from_json(const Json& a) {
  if (!a.is_array()) throw ReportError("chain must be an array");
  std::vector<ModulusLevel> out;
  for (const auto& j : a) {
    only_keys(j, {"index", "component", "modulus", "poly", "period", "lattice", "nodes", "survivors"});
    out.push_back({field<std::size_t>(j, "index"), field<std::size_t>(j, "component"), field<std::int64_t>(j, "modulus"),
                   field<DensePoly>(j, "poly"), field<std::int64_t>(j, "period"), field<std::int64_t>(j, "lattice"),
                   field<std::size_t>(j, "nodes"), field<std::size_t>(j, "survivors")});
  }
  return out;
}

}  // namespace detail

inline Certificate certificate_from_json(const Json& j) {
  using detail::field;
  Certificate c;
  c.version = field<std::string>(j, "version");
  c.system_hash = field<std::string>(j, "system_hash");
  std::string kind = field<std::string>(j, "kind");
  if (kind == "linear_infeasible") {
    detail::only_keys(j, {"version", "system_hash", "kind", "row"});
    c.kind = Certificate::Kind::LinearInfeasible;
    const Json& r = j.at("row");
    detail::only_keys(r, {"row", "divisor", "value"});
    c.row = {field<std::size_t>(r, "row"), detail::big(r, "divisor"), detail::big(r, "value")};
    return c;
  }
  if (kind != "branches") throw ReportError("unknown certificate kind `" + kind + "`");
  detail::only_keys(j, {"version", "system_hash", "kind", "branches"});
  c.kind = Certificate::Kind::Branches;
  const Json& bs = j.at("branches");
  if (!bs.is_array()) throw ReportError("branches must be an array");
  for (const auto& jb : bs) {
    BranchCert b;
    std::string bk = field<std::string>(jb, "kind");
    if (bk == "empty_disjunction") {
      detail::only_keys(jb, {"kind", "stage"});
      b.kind = BranchCert::Kind::EmptyDisjunction;
      b.stage = field<std::string>(jb, "stage");
    } else if (bk == "modulus") {
      detail::only_keys(jb, {"kind", "chain"});
      b.kind = BranchCert::Kind::Modulus;
      b.chain = detail::chain_from_json(jb.at("chain"));
    } else if (bk == "leaves") {
      detail::only_keys(jb, {"kind", "leaves"});
      b.kind = BranchCert::Kind::Leaves;
      const Json& ls = jb.at("leaves");
      if (!ls.is_array()) throw ReportError("leaves must be an array");
      for (const auto& jl : ls) {
        LeafCert l;
        std::string lk = field<std::string>(jl, "kind");
        if (lk == "degenerate") {
          detail::only_keys(jl, {"kind"});
          l.kind = LeafCert::Kind::Degenerate;
        } else if (lk == "modulus") {
          detail::only_keys(jl, {"kind", "chain"});
          l.kind = LeafCert::Kind::Modulus;
          l.chain = detail::chain_from_json(jl.at("chain"));
        } else {
          throw ReportError("unknown leaf kind `" + lk + "`");
        }
        b.leaves.push_back(std::move(l));
      }
    } else {
      throw ReportError("unknown branch kind `" + bk + "`");
    }
    c.branches.push_back(std::move(b));
  }
  return c;
}

inline Json to_json(const Budget& b) {
  return Json{{"steps", b.steps},   {"max_prime_power", b.max_prime_power}, {"max_monic_degree", b.max_monic_degree},
              {"radius", b.radius}, {"time_limit", b.time_limit},           {"node_cap", b.node_cap}};
}

inline Json report_json(const EquationSystem& system, const Verdict& v, const Budget& budget, double seconds) {
  Json j;
  j["format"] = "metadio-report";
  j["version"] = "v1";
  j["tool"] = "metadio " METADIO_VERSION;
  j["system_hash"] = system_hash(system);
  j["system"] = render_system(system);
  j["verdict"] = verdict_name(v.kind);
  if (v.kind == Verdict::Kind::Sat) {
    Json w = Json::object();
    for (const auto& x : system.variables) w[x] = render_element(v.witness.at(x));
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  j["certificate"] = v.certificate ? to_json(*v.certificate) : Json(nullptr);
  j["reason"] = v.reason;
  j["budget"] = to_json(budget);
  j["stats"] = {{"steps", v.stats.steps},
                {"refutation_steps", v.stats.refutation_steps},
                {"witness_steps", v.stats.witness_steps},
                {"branches", v.stats.branches},
                {"leaves", v.stats.leaves},
                {"witness_candidates", v.stats.witness_candidates},
                {"residue_tests", v.stats.residue_tests}};
  j["timing"] = {{"seconds", seconds}};
  return j;
}

// Outcome of re-checking a report without re-running the search.
struct ReportCheck {
  bool ok = false;
  std::string verdict;
  std::string message;
};

inline ReportCheck check_report(const Json& j) {
  ReportCheck r;
  try {
    if (detail::field<std::string>(j, "version") != "v1") throw ReportError("unsupported version");
    EquationSystem sys = parse_input(detail::field<std::string>(j, "system"));
    if (detail::field<std::string>(j, "system_hash") != system_hash(sys)) throw ReportError("system hash mismatch");
    r.verdict = detail::field<std::string>(j, "verdict");
    if (r.verdict == "sat") {
      const Json& w = j.at("witness");
      if (!w.is_object()) throw ReportError("witness must be an object");
      Assignment a;
      for (const auto& [x, e] : w.items()) {
        if (!e.is_string()) throw ReportError("witness entries must be strings");
        a[x] = parse_element(e.get<std::string>(), sys.spec);
      }
      for (const auto& x : sys.variables)
        if (!a.count(x)) throw ReportError("witness misses variable " + x);
      if (a.size() != sys.variables.size()) throw ReportError("witness names unknown variables");
      r.ok = verify_witness(sys, a);
      r.message = r.ok ? "witness verified" : "witness does not satisfy the system";
    } else if (r.verdict == "unsat") {
      Certificate c = certificate_from_json(j.at("certificate"));
      std::string why;
      r.ok = verify_certificate(c, sys, &why);
      r.message = r.ok ? "certificate verified" : "certificate rejected: " + why;
    } else if (r.verdict == "unknown") {
      r.ok = true;
      r.message = "nothing to verify for an unknown verdict";
    } else {
      throw ReportError("unknown verdict `" + r.verdict + "`");
    }
  } catch (const std::exception& e) {
    r.ok = false;
    r.message = e.what();
  }
  return r;
}

}  // namespace metadio
