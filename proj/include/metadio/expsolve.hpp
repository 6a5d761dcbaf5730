#pragma once

// Exact solvers for pure exponential constraints.
//
//  * semenov_solve:  sum_j beta_j k^{tau_j(y)} + C = 0  over Z[1/k]
//  * grouping_solve: sum_i a_i t^{sigma_i(x)} = 0        over Z[t^+-1] or Z_n[t^+-1]
//
// Both return a finite disjunction of linear systems (lists of affine forms
// set to zero) whose union of integer solutions is the solution set.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "metadio/expsum.hpp"
#include "metadio/intlinalg.hpp"
#include "metadio/reduce.hpp"

namespace metadio {

using LinearSystem = std::vector<AffineForm>;
using Disjunction = std::vector<LinearSystem>;

class SearchLimit : public std::runtime_error {
 public:
  explicit SearchLimit(const std::string& what) : std::runtime_error(what) {}
};

// Normalized, sorted, duplicate-free; trivial equations removed. Returns
// nullopt when an equation is a nonzero constant.
inline std::optional<LinearSystem> canonical_system(const LinearSystem& sys) {
  std::set<AffineForm> eqs;
  for (const auto& f : sys) {
    AffineForm g = f.normalized_equation();
    if (g.is_zero()) continue;
    if (g.is_constant()) return std::nullopt;
    eqs.insert(std::move(g));
  }
  return LinearSystem(eqs.begin(), eqs.end());
}

inline bool feasible(const LinearSystem& sys) { return !parametrize(sys, "_").empty(); }

// Canonicalize, drop infeasible systems, deduplicate, sort.
inline Disjunction canonical_disjunction(const Disjunction& d) {
  std::set<LinearSystem> out;
  for (const auto& s : d) {
    auto c = canonical_system(s);
    if (c && feasible(*c)) out.insert(std::move(*c));
  }
  return Disjunction(out.begin(), out.end());
}

inline std::string render_linear_system(const LinearSystem& s) {
  if (s.empty()) return "{}";
  std::string r = "{";
  for (std::size_t i = 0; i < s.size(); ++i) r += (i ? ", " : "") + s[i].render() + " = 0";
  return r + "}";
}

// ---------------------------------------------------------------------------
// Delta bound: if one exponent exceeds all others by more than Delta, the
// dominant term outweighs the rest.

inline Int floor_log(const Int& x, std::int64_t k) {
  Int e = 0, p = k;
  while (p <= x) {
    p *= k;
    e += 1;
  }
  return e;
}

// Delta = floor(log_k(sum |c| + 1)) + 1 over the given coefficients (the
// constant C included).
inline std::int64_t delta_bound(const std::vector<Int>& coefficients, std::int64_t k) {
  if (k < 2) throw std::invalid_argument("delta_bound: k must be >= 2");
  Int s = 1;
  for (const auto& c : coefficients) s += int_abs(c);
  return to_i64(floor_log(s, k)) + 1;
}

// For an equation in N-exponent form; a term beta k^{L + c} counts as beta k^c.
inline std::int64_t delta_bound(const ExpSum& eq) {
  std::vector<Int> cs;
  for (const auto& t : eq.terms()) {
    Int c = t.exponent.constant();
    cs.push_back(c > 0 ? t.coef * int_pow(Int(static_cast<long>(eq.domain().k)), c.get_ui()) : t.coef);
  }
  return delta_bound(cs, eq.domain().k);
}

// ---------------------------------------------------------------------------
// Semenov elimination.

namespace detail {

// One sign branch, after clearing: equations over atoms y^_a = L_a(y) >= 0,
// atom 0 being the constant 0.
struct AtomState {
  std::vector<std::map<std::size_t, Int>> eqs;
  std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> relations;  // y^_v = y^_u + d
  std::optional<std::size_t> known_top;                                       // max atom of eqs[0]
};

struct SemenovSearch {
  std::int64_t k;
  std::vector<AffineForm> atoms;
  std::size_t steps = 0;
  std::size_t max_steps;
  std::vector<std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>>> emitted;

  void run(AtomState s) {
    if (++steps > max_steps) throw SearchLimit("semenov_solve: step limit reached");
    for (auto& e : s.eqs)
      for (auto it = e.begin(); it != e.end();) it = it->second == 0 ? e.erase(it) : std::next(it);
    while (!s.eqs.empty() && s.eqs.front().empty()) {
      s.eqs.erase(s.eqs.begin());
      s.known_top.reset();
    }
    s.eqs.erase(std::remove_if(s.eqs.begin(), s.eqs.end(), [](const auto& e) { return e.empty(); }), s.eqs.end());
    if (s.eqs.empty()) {
      emitted.push_back(s.relations);
      return;
    }
    const auto& e = s.eqs.front();
    if (e.size() == 1) return;  // a single nonzero term
    std::vector<Int> coefs;
    for (const auto& [a, c] : e) coefs.push_back(c);
    const std::int64_t delta = delta_bound(coefs, k);
    Int total = 0;
    for (const auto& c : coefs) total += int_abs(c);
    std::vector<std::size_t> tops;
    if (s.known_top && e.count(*s.known_top)) tops.push_back(*s.known_top);
    else
      for (const auto& [a, c] : e) tops.push_back(a);
    const Int kk(static_cast<long>(k));
    for (std::size_t v : tops) {
      const Int bv = int_abs(e.at(v));
      const Int rest = total - bv;
      for (const auto& [u, cu] : e) {
        if (u == v) continue;
        Int kd = 1;
        for (std::int64_t d = 0; d <= delta; ++d, kd *= kk) {
          if (bv * kd > rest) break;
          if (v == 0 && d > 0) break;  // the constant atom is 0 and others are >= 0
          AtomState n = s;
          for (auto& eq : n.eqs) {
            auto it = eq.find(v);
            if (it == eq.end()) continue;
            Int moved = it->second * kd;
            eq.erase(it);
            eq[u] += moved;
          }
          n.relations.emplace_back(v, u, d);
          n.known_top.reset();
          if (n.eqs.front().count(u) && n.eqs.front().at(u) != 0) n.known_top = u;
          run(std::move(n));
        }
      }
    }
  }
};

}  // namespace detail

// The union of the returned systems' integer solutions is exactly the
// solution set in Z^v. Variables flagged natural are not sign-split, and the
// returned systems are equalities only: their solutions intersected with
// N for those variables are the solutions.
inline Disjunction semenov_solve(const SemenovSystem& sys, std::size_t max_steps = 2000000) {
  if (sys.k < 2) throw std::invalid_argument("semenov_solve: k must be >= 2");
  std::set<std::string> integer_vars;
  for (const auto& v : sys.variables())
    if (!sys.natural.count(v)) integer_vars.insert(v);
  Disjunction out;
  std::size_t steps = 0;
  for (const auto& branch : sign_split(sys.equations, integer_vars)) {
    detail::SemenovSearch search{sys.k, {AffineForm()}, 0, max_steps > steps ? max_steps - steps : 0, {}};
    std::map<AffineForm, std::size_t> index{{AffineForm(), 0}};
    detail::AtomState init;
    for (const auto& eq : branch.equations) {
      std::map<std::size_t, Int> row;
      for (const auto& t : eq.terms()) {
        AffineForm lin = t.exponent.linear_part();
        auto [it, inserted] = index.try_emplace(lin, search.atoms.size());
        if (inserted) search.atoms.push_back(lin);
        row[it->second] += t.coef * int_pow(Int(static_cast<long>(sys.k)), t.exponent.constant().get_ui());
      }
      init.eqs.push_back(std::move(row));
    }
    search.run(std::move(init));
    steps += search.steps;
    Substitution back = negation(branch.negated);
    for (const auto& rels : search.emitted) {
      LinearSystem ls;
      for (const auto& [v, u, d] : rels) {
        AffineForm f = search.atoms[v] - search.atoms[u];
        f.add_constant(Int(static_cast<long>(-d)));
        ls.push_back(f.substitute(back));
      }
      out.push_back(std::move(ls));
    }
  }
  return canonical_disjunction(out);
}

// ---------------------------------------------------------------------------
// Grouping.

struct GroupedEquation {
  std::vector<std::vector<std::size_t>> blocks;  // term indices
  LinearSystem equalities;                       // exponent equalities inside blocks
};

// Every partition of the terms into blocks whose coefficients sum to zero
// (mod n), with the induced exponent equalities.
inline std::vector<GroupedEquation> groupings(const ExpSum& eq, std::size_t max_steps = 5000000) {
  if (eq.domain().is_kadic()) throw std::invalid_argument("groupings: needs a Laurent domain");
  const Domain& d = eq.domain();
  const auto terms = eq.terms();
  std::vector<GroupedEquation> out;
  std::vector<std::vector<std::size_t>> blocks;
  std::vector<Int> sums;
  std::size_t steps = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (++steps > max_steps) throw SearchLimit("grouping_solve: step limit reached");
    std::size_t open = 0;
    for (const auto& s : sums)
      if (s != 0) ++open;
    if (open > terms.size() - i) return;
    if (i == terms.size()) {
      GroupedEquation g;
      g.blocks = blocks;
      for (const auto& b : blocks)
        for (std::size_t j = 1; j < b.size(); ++j) g.equalities.push_back(terms[b[j]].exponent - terms[b[0]].exponent);
      out.push_back(std::move(g));
      return;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      AffineForm diff = terms[i].exponent - terms[blocks[b][0]].exponent;
      if (diff.is_constant() && !diff.is_zero()) continue;
      blocks[b].push_back(i);
      Int old = sums[b];
      sums[b] = d.normalize(sums[b] + terms[i].coef);
      rec(i + 1);
      sums[b] = old;
      blocks[b].pop_back();
    }
    blocks.push_back({i});
    sums.push_back(d.normalize(terms[i].coef));
    rec(i + 1);
    blocks.pop_back();
    sums.pop_back();
  };
  rec(0);
  return out;
}

inline Disjunction grouping_solve(const std::vector<ExpSum>& eqs, std::size_t max_steps = 5000000) {
  Disjunction acc{LinearSystem{}};
  for (const auto& eq : eqs) {
    Disjunction next;
    auto gs = groupings(eq, max_steps);
    for (const auto& base : acc)
      for (const auto& g : gs) {
        LinearSystem s = base;
        s.insert(s.end(), g.equalities.begin(), g.equalities.end());
        next.push_back(std::move(s));
        if (next.size() > max_steps) throw SearchLimit("grouping_solve: too many branches");
      }
    acc = canonical_disjunction(next);
    if (acc.empty()) break;
  }
  return canonical_disjunction(acc);
}

}  // namespace metadio
