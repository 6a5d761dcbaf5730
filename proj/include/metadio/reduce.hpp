#pragma once

// Projection of a group equation system onto its two coordinates.
//
// For a word w = g_1 ... g_N with g_j = (u_j, r_j) the first coordinate of w
// is  sum_j u_j * B^{-S_j}  (BS, B = k)  or  sum_j t^{S_j} u_j  (wreath), with
// S_j = r_1 + ... + r_{j-1}. A variable X contributes an atomic unknown
// (Z.X in Z[1/k], or P.X in A[t,t^-1]) and an exponent variable (r.X, x.X).
// The second coordinate gives one linear equation per group equation.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metadio/affine.hpp"
#include "metadio/expsum.hpp"
#include "metadio/groups.hpp"
#include "metadio/system.hpp"

namespace metadio {

inline std::string exp_var(const GroupSpec& spec, const std::string& x) { return (spec.is_bs() ? "r." : "x.") + x; }
inline std::string unknown_var(const GroupSpec& spec, const std::string& x) { return (spec.is_bs() ? "Z." : "P.") + x; }

// sum_U coeffs[U] * U + constant = 0
struct LinRow {
  std::map<std::string, ExpSum> coeffs;
  ExpSum constant;

  void add(const std::string& unknown, const ExpSum& c) {
    auto it = coeffs.find(unknown);
    if (it == coeffs.end()) {
      if (!c.is_zero()) coeffs.emplace(unknown, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) coeffs.erase(it);
  }
  bool has_unknowns() const { return !coeffs.empty(); }

  LinRow substitute(const Substitution& sub) const {
    LinRow r;
    r.constant = constant.substitute(sub);
    for (const auto& [u, c] : coeffs) r.add(u, c.substitute(sub));
    return r;
  }
  // multiply through by an ExpSum
  LinRow times(const ExpSum& f) const {
    LinRow r;
    r.constant = constant * f;
    for (const auto& [u, c] : coeffs) r.add(u, c * f);
    return r;
  }
  LinRow minus(const LinRow& o) const {
    LinRow r = *this;
    r.constant -= o.constant;
    for (const auto& [u, c] : o.coeffs) r.add(u, -c);
    return r;
  }
  std::set<std::string> exponent_variables() const {
    std::set<std::string> s = constant.variables();
    for (const auto& [u, c] : coeffs) {
      auto v = c.variables();
      s.insert(v.begin(), v.end());
    }
    return s;
  }

  friend bool operator==(const LinRow& a, const LinRow& b) { return a.coeffs == b.coeffs && a.constant == b.constant; }
  friend bool operator<(const LinRow& a, const LinRow& b) {
    if (!(a.constant == b.constant)) return a.constant < b.constant;
    if (a.coeffs.size() != b.coeffs.size()) return a.coeffs.size() < b.coeffs.size();
    for (auto ia = a.coeffs.begin(), ib = b.coeffs.begin(); ia != a.coeffs.end(); ++ia, ++ib) {
      if (ia->first != ib->first) return ia->first < ib->first;
      if (!(ia->second == ib->second)) return ia->second < ib->second;
    }
    return false;
  }

  std::string render() const {
    std::string s;
    for (const auto& [u, c] : coeffs) {
      if (!s.empty()) s += " + ";
      s += "(" + c.render() + ")*" + u;
    }
    if (!constant.is_zero() || s.empty()) s += (s.empty() ? "" : " + ") + std::string("(") + constant.render() + ")";
    return s + " = 0";
  }
};

// Rows over one coefficient domain: Z[1/k] for BS, one component of A for wreath.
struct ComponentSystem {
  Domain domain;
  std::size_t component = 0;
  std::vector<LinRow> rows;
};
using ExpLinSystem = ComponentSystem;
using WreathCompSystem = ComponentSystem;

struct ReducedSystem {
  GroupSpec spec;
  std::vector<std::string> group_vars;
  std::vector<AffineForm> linear;           // each = 0, over exponent variables (and Z.* when k = 1)
  std::vector<ComponentSystem> components;  // one for BS with k >= 2, one per component of A
};

namespace detail {

// A word letter expanded into unit steps: coefficient contribution and shift.
struct Step {
  bool variable = false;
  std::string name;
  int sign = 1;        // +1 for X, -1 for X^-1
  Int constant;        // constant first-coordinate for a^e (BS) / a_i^e (wreath)
  int component = -1;  // wreath component of the constant, -1 if none
  AffineForm shift;    // second coordinate of the step
};

inline std::vector<Step> expand_word(const Word& w, const GroupSpec& spec) {
  std::vector<Step> steps;
  for (const auto& l : w) {
    if (l.is_var()) {
      AffineForm r = AffineForm::variable(exp_var(spec, l.name));
      int sign = l.exponent > 0 ? 1 : -1;
      std::int64_t count = l.exponent > 0 ? l.exponent : -l.exponent;
      for (std::int64_t i = 0; i < count; ++i) {
        AffineForm s = r;
        s *= Int(sign);
        steps.push_back({true, l.name, sign, 0, -1, s});
      }
      continue;
    }
    if (spec.is_bs()) {
      if (l.name == "a") steps.push_back({false, "", 1, Int(static_cast<long>(l.exponent)), -1, AffineForm()});
      else steps.push_back({false, "", 1, 0, -1, AffineForm(Int(static_cast<long>(l.exponent)))});
      continue;
    }
    int c = spec.component_of(l.name);
    if (c < 0) steps.push_back({false, "", 1, 0, -1, AffineForm(Int(static_cast<long>(l.exponent)))});
    else steps.push_back({false, "", 1, Int(static_cast<long>(l.exponent)), c, AffineForm()});
  }
  return steps;
}

}  // namespace detail

// Shared implementation of reduce_bs / reduce_wreath.
inline ReducedSystem reduce(const EquationSystem& system) {
  const GroupSpec& spec = system.spec;
  ReducedSystem out;
  out.spec = spec;
  out.group_vars = system.variables;
  const bool bs = spec.is_bs();
  const bool flat = bs && spec.k == 1;  // BS(1,1) = Z^2: the first coordinate is linear too
  std::vector<Domain> domains;
  if (bs) {
    if (!flat) domains.push_back(Domain::kadic(spec.k));
  } else {
    ComponentRing ring = spec.ring();
    for (std::size_t c = 0; c < ring.size(); ++c) domains.push_back(Domain::laurent(ring.component(c).n));
  }
  for (std::size_t c = 0; c < domains.size(); ++c) out.components.push_back({domains[c], c, {}});

  for (const auto& eq : system.equations) {
    auto steps = detail::expand_word(eq.as_relator(), spec);
    std::vector<LinRow> rows(domains.size());
    for (std::size_t c = 0; c < domains.size(); ++c) rows[c].constant = ExpSum(domains[c]);
    AffineForm prefix;  // S_j
    AffineForm flat_row;
    for (const auto& st : steps) {
      // BS: u_j k^{-S_j}; for X^-1 the step's u is -Z k^{r}, so the term is -Z k^{r - S_j}.
      // wreath: t^{S_j} u_j; for X^-1 the step's u is -t^{-x} P.
      AffineForm e = bs ? AffineForm() - prefix : prefix;
      if (st.variable && st.sign < 0) e += bs ? AffineForm::variable(exp_var(spec, st.name)) : AffineForm() - AffineForm::variable(exp_var(spec, st.name));
      if (flat) {
        if (st.variable) flat_row.add(unknown_var(spec, st.name), Int(st.sign));
        else flat_row.add_constant(st.constant);
      } else if (st.variable) {
        for (std::size_t c = 0; c < domains.size(); ++c)
          rows[c].add(unknown_var(spec, st.name), ExpSum::monomial(domains[c], Int(st.sign), e));
      } else if (st.constant != 0) {
        std::size_t c = bs ? 0 : static_cast<std::size_t>(st.component);
        rows[c].constant.add_term(st.constant, e);
      }
      prefix += st.shift;
    }
    if (flat && !flat_row.is_zero()) out.linear.push_back(flat_row);
    if (!prefix.is_zero()) out.linear.push_back(prefix);
    for (std::size_t c = 0; c < domains.size(); ++c)
      if (rows[c].has_unknowns() || !rows[c].constant.is_zero()) out.components[c].rows.push_back(std::move(rows[c]));
  }
  return out;
}

inline ReducedSystem reduce_bs(const EquationSystem& system) {
  if (!system.spec.is_bs()) throw std::invalid_argument("reduce_bs: not a BS(1,k) system");
  return reduce(system);
}

inline ReducedSystem reduce_wreath(const EquationSystem& system) {
  if (system.spec.is_bs()) throw std::invalid_argument("reduce_wreath: not a wreath product system");
  return reduce(system);
}

// ---------------------------------------------------------------------------
// Coordinates of a group assignment and satisfaction of the reduced system.

struct Coordinates {
  std::map<std::string, Int> ints;       // exponent variables, and Z.* when k = 1
  std::map<std::string, ZkFrac> zk;      // Z.* for BS(1,k), k >= 2
  std::map<std::string, RLaurent> poly;  // P.* for wreath products
};

inline Coordinates coordinates(const ReducedSystem& red, const Assignment& assignment) {
  Coordinates c;
  for (const auto& x : red.group_vars) {
    auto it = assignment.find(x);
    if (it == assignment.end()) throw UnboundVariable(x);
    check_spec(it->second, red.spec);
    if (red.spec.is_bs()) {
      const auto& g = std::get<BsElement>(it->second);
      c.ints[exp_var(red.spec, x)] = Int(static_cast<long>(g.r));
      if (red.spec.k == 1) c.ints[unknown_var(red.spec, x)] = g.u.z;
      else c.zk[unknown_var(red.spec, x)] = g.u;
    } else {
      const auto& g = std::get<WreathElement>(it->second);
      c.ints[exp_var(red.spec, x)] = Int(static_cast<long>(g.x));
      c.poly[unknown_var(red.spec, x)] = g.p;
    }
  }
  return c;
}

// Component c of an A-valued Laurent polynomial.
inline ScalarLaurent project(const RLaurent& p, std::size_t c) {
  ScalarLaurent out(p.ring().component(c));
  for (const auto& [d, v] : p.terms()) out.add_term(d, v.coords[c]);
  return out;
}

inline bool row_satisfied(const LinRow& row, const Domain& domain, std::size_t component, const Coordinates& c) {
  if (domain.is_kadic()) {
    ZkFrac acc = row.constant.evaluate_kadic(c.ints);
    for (const auto& [u, coef] : row.coeffs) acc = acc + coef.evaluate_kadic(c.ints) * c.zk.at(u);
    return zk_is_zero(acc);
  }
  ScalarLaurent acc = row.constant.evaluate_laurent(c.ints);
  for (const auto& [u, coef] : row.coeffs) acc = acc + coef.evaluate_laurent(c.ints) * project(c.poly.at(u), component);
  return acc.is_zero();
}

inline bool reduced_satisfied(const ReducedSystem& red, const Coordinates& c) {
  for (const auto& f : red.linear)
    if (f.evaluate(c.ints) != 0) return false;
  for (const auto& comp : red.components)
    for (const auto& row : comp.rows)
      if (!row_satisfied(row, comp.domain, comp.component, c)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Triangularization with zero / nonzero case splits on pivot coefficients.

struct PivotRow {
  std::string unknown;
  LinRow row;  // references `unknown` and only unknowns pivoted later
  friend bool operator==(const PivotRow&, const PivotRow&) = default;
};

struct TriSystem {
  Domain domain;
  std::size_t component = 0;
  std::vector<PivotRow> pivots;
  std::vector<ExpSum> residuals;  // each = 0
  std::vector<ExpSum> nonzero;    // each != 0
  // false when a non-unit pivot over Z_n (n composite) was cleared
  // fraction-free: the branch then over-approximates its solution set
  bool exact = true;
  std::set<std::string> natural;  // exponent variables restricted to N (after sign_split)
  std::set<std::string> negated;  // variables replaced by their negatives (after sign_split)
};

namespace detail {

// Inverse of a unit monomial u * B^tau, if u is a unit of the domain.
inline std::optional<ExpSum> unit_inverse(const ExpSum& c) {
  if (!c.is_monomial()) return std::nullopt;
  const Domain& d = c.domain();
  ExpTerm t = c.terms()[0];
  AffineForm e = -t.exponent;
  if (d.is_kadic()) {
    ZkFrac u = zk_integer(t.coef, d.k);
    if (!zk_is_unit(u)) return std::nullopt;
    auto inv = zk_divide(zk_integer(1, d.k), u);
    e.add_constant(Int(static_cast<long>(-inv->i)));
    return ExpSum::monomial(d, inv->z, e);
  }
  if (d.n == 0) {
    if (int_abs(t.coef) != 1) return std::nullopt;
    return ExpSum::monomial(d, t.coef, e);
  }
  auto inv = invmod(mod_i64(t.coef, to_i64(d.n)), to_i64(d.n));
  if (!inv) return std::nullopt;
  return ExpSum::monomial(d, Int(static_cast<long>(*inv)), e);
}

inline int pivot_rank(const ExpSum& c) {
  if (unit_inverse(c)) return 0;
  if (c.is_monomial()) return 1;
  return 1 + static_cast<int>(c.term_count());
}

inline std::string tri_key(const TriSystem& t);

struct TriState {
  std::vector<LinRow> rows;
  TriSystem tri;
};

// false if the branch is dead
inline bool settle(TriState& s) {
  std::vector<LinRow> keep;
  for (auto& r : s.rows) {
    if (r.has_unknowns()) {
      keep.push_back(std::move(r));
    } else if (!r.constant.is_zero()) {
      // a nonzero monomial never vanishes
      if (r.constant.is_constant() || r.constant.is_monomial()) return false;
      s.tri.residuals.push_back(r.constant);
    }
  }
  s.rows = std::move(keep);
  std::vector<ExpSum> nz;
  for (auto& c : s.tri.nonzero) {
    if (c.is_zero()) return false;
    if (c.is_constant() || c.is_monomial()) continue;
    nz.push_back(std::move(c));
  }
  s.tri.nonzero = std::move(nz);
  for (const auto& r : s.tri.residuals)
    if (!r.is_zero() && (r.is_constant() || r.is_monomial())) return false;
  return true;
}

inline void eliminate(TriState& s, std::size_t i, const std::string& u, const LinRow& pivot, bool fraction_free) {
  const ExpSum c = pivot.coeffs.at(u);
  std::vector<LinRow> rest;
  for (std::size_t j = 0; j < s.rows.size(); ++j) {
    if (j == i) continue;
    auto it = s.rows[j].coeffs.find(u);
    if (it == s.rows[j].coeffs.end()) {
      rest.push_back(s.rows[j]);
      continue;
    }
    ExpSum cj = it->second;
    if (fraction_free) rest.push_back(s.rows[j].times(c).minus(pivot.times(cj)));
    else rest.push_back(s.rows[j].minus(pivot.times(cj)));
  }
  s.tri.pivots.push_back({u, pivot});
  s.rows = std::move(rest);
}

}  // namespace detail

inline std::vector<TriSystem> triangularize(const ComponentSystem& sys) {
  std::vector<TriSystem> out;
  std::vector<detail::TriState> stack;
  detail::TriState init;
  init.rows = sys.rows;
  init.tri.domain = sys.domain;
  init.tri.component = sys.component;
  stack.push_back(std::move(init));
  while (!stack.empty()) {
    detail::TriState s = std::move(stack.back());
    stack.pop_back();
    if (!detail::settle(s)) continue;
    if (s.rows.empty()) {
      out.push_back(std::move(s.tri));
      continue;
    }
    std::size_t bi = 0;
    std::string bu;
    int best = -1;
    for (std::size_t i = 0; i < s.rows.size(); ++i)
      for (const auto& [u, c] : s.rows[i].coeffs) {
        int r = detail::pivot_rank(c);
        if (best < 0 || r < best) {
          best = r;
          bi = i;
          bu = u;
        }
      }
    const ExpSum c = s.rows[bi].coeffs.at(bu);
    if (best == 0) {
      LinRow pivot = s.rows[bi].times(*detail::unit_inverse(c));
      detail::eliminate(s, bi, bu, pivot, false);
      stack.push_back(std::move(s));
      continue;
    }
    if (best == 1) {
      LinRow pivot = s.rows[bi];
      if (!sys.domain.integral()) s.tri.exact = false;
      detail::eliminate(s, bi, bu, pivot, true);
      stack.push_back(std::move(s));
      continue;
    }
    detail::TriState nonzero = s;
    nonzero.tri.nonzero.push_back(c);
    if (!sys.domain.integral()) nonzero.tri.exact = false;
    LinRow pivot = nonzero.rows[bi];
    detail::eliminate(nonzero, bi, bu, pivot, true);
    detail::TriState zero = std::move(s);
    zero.tri.residuals.push_back(c);
    zero.rows[bi].coeffs.erase(bu);
    // explore the zero branch first
    stack.push_back(std::move(nonzero));
    stack.push_back(std::move(zero));
  }
  std::map<std::string, TriSystem> unique;
  for (auto& t : out) {
    std::sort(t.residuals.begin(), t.residuals.end());
    t.residuals.erase(std::unique(t.residuals.begin(), t.residuals.end()), t.residuals.end());
    std::sort(t.nonzero.begin(), t.nonzero.end());
    t.nonzero.erase(std::unique(t.nonzero.begin(), t.nonzero.end()), t.nonzero.end());
    unique.emplace(detail::tri_key(t), std::move(t));
  }
  std::vector<TriSystem> result;
  for (auto& [k, t] : unique) result.push_back(std::move(t));
  return result;
}

// Each pivot row mentions its own unknown and no unknown pivoted before it.
inline bool is_triangular(const TriSystem& t) {
  std::set<std::string> earlier;
  for (const auto& p : t.pivots) {
    if (!p.row.coeffs.count(p.unknown)) return false;
    for (const auto& [u, c] : p.row.coeffs)
      if (earlier.count(u)) return false;
    earlier.insert(p.unknown);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Sign split: every integer exponent variable becomes y or -y with y in N,
// and each equation is multiplied by B^{m} so all exponents have
// nonnegative coefficients and constants.

inline AffineForm clearing_exponent(const std::vector<const ExpSum*>& sums) {
  std::map<std::string, Int> need;
  Int c0 = 0;
  for (const ExpSum* s : sums)
    for (const auto& t : s->terms()) {
      for (const auto& [v, a] : t.exponent.coeffs())
        if (a < 0 && -a > need[v]) need[v] = -a;
      if (t.exponent.constant() < 0 && -t.exponent.constant() > c0) c0 = -t.exponent.constant();
    }
  AffineForm m(c0);
  for (const auto& [v, a] : need) m.add(v, a);
  return m;
}

inline ExpSum clear_denominators(const ExpSum& e) { return e.shifted(clearing_exponent({&e})); }

inline LinRow clear_denominators(const LinRow& r) {
  std::vector<const ExpSum*> sums{&r.constant};
  for (const auto& [u, c] : r.coeffs) sums.push_back(&c);
  AffineForm m = clearing_exponent(sums);
  LinRow out;
  out.constant = r.constant.shifted(m);
  for (const auto& [u, c] : r.coeffs) out.add(u, c.shifted(m));
  return out;
}

inline Substitution negation(const std::set<std::string>& vars) {
  Substitution s;
  for (const auto& v : vars) s[v] = AffineForm::variable(v, -1);
  return s;
}

struct SignBranch {
  std::set<std::string> negated;
  std::vector<ExpSum> equations;
};

// Variables not listed in `integer_vars` are taken to be in N already.
inline std::vector<SignBranch> sign_split(const std::vector<ExpSum>& equations, const std::set<std::string>& integer_vars) {
  std::vector<std::string> vars(integer_vars.begin(), integer_vars.end());
  if (vars.size() > 20) throw std::length_error("sign_split: too many variables");
  std::vector<SignBranch> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << vars.size()); ++mask) {
    SignBranch b;
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (mask >> i & 1) b.negated.insert(vars[i]);
    Substitution sub = negation(b.negated);
    for (const auto& e : equations) b.equations.push_back(clear_denominators(e.substitute(sub)));
    out.push_back(std::move(b));
  }
  return out;
}

inline std::set<std::string> exponent_variables(const TriSystem& t) {
  std::set<std::string> s;
  auto add = [&](const std::set<std::string>& v) { s.insert(v.begin(), v.end()); };
  for (const auto& p : t.pivots) add(p.row.exponent_variables());
  for (const auto& r : t.residuals) add(r.variables());
  for (const auto& r : t.nonzero) add(r.variables());
  return s;
}

inline std::vector<TriSystem> sign_split(const TriSystem& tri) {
  std::vector<std::string> vars;
  for (const auto& v : exponent_variables(tri))
    if (!tri.natural.count(v)) vars.push_back(v);
  if (vars.size() > 20) throw std::length_error("sign_split: too many variables");
  std::vector<TriSystem> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << vars.size()); ++mask) {
    std::set<std::string> neg;
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (mask >> i & 1) neg.insert(vars[i]);
    Substitution sub = negation(neg);
    TriSystem t = tri;
    for (auto& p : t.pivots) p.row = clear_denominators(p.row.substitute(sub));
    for (auto& r : t.residuals) r = clear_denominators(r.substitute(sub));
    for (auto& r : t.nonzero) r = clear_denominators(r.substitute(sub));
    t.natural.insert(vars.begin(), vars.end());
    for (const auto& v : neg) {
      // negating twice restores the original variable
      if (t.negated.count(v)) t.negated.erase(v);
      else t.negated.insert(v);
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stable text rendering for --debug-stage.

inline std::string render_reduced(const ReducedSystem& red) {
  std::string s = red.spec.render() + "\n";
  s += "linear:\n";
  for (const auto& f : red.linear) s += "  " + f.render() + " = 0\n";
  for (const auto& c : red.components) {
    s += "component " + std::to_string(c.component) + " over " + c.domain.render() + ":\n";
    for (const auto& r : c.rows) s += "  " + r.render() + "\n";
  }
  return s;
}

inline std::string render_tri(const TriSystem& t) {
  std::string s = "triangular over " + t.domain.render() + (t.exact ? "" : " (relaxed)") + "\n";
  for (const auto& p : t.pivots) s += "  pivot " + p.unknown + ": " + p.row.render() + "\n";
  for (const auto& r : t.residuals) s += "  residual: " + r.render() + " = 0\n";
  for (const auto& r : t.nonzero) s += "  nonzero: " + r.render() + " != 0\n";
  if (!t.negated.empty()) {
    s += "  negated:";
    for (const auto& v : t.negated) s += " " + v;
    s += "\n";
  }
  return s;
}

namespace detail {
inline std::string tri_key(const TriSystem& t) { return render_tri(t); }
}  // namespace detail

}  // namespace metadio
