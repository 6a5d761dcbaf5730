#pragma once

// Decision driver: reduction, linear stage, triangular branches, exponential
// residuals, then a witness search and a modular refutation search run side
// by side until one of them settles the system or the budget runs out.

#include <algorithm>
#include <chrono>
#include <climits>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "metadio/expsolve.hpp"
#include "metadio/groups.hpp"
#include "metadio/intlinalg.hpp"
#include "metadio/oracle.hpp"
#include "metadio/reduce.hpp"
#include "metadio/system.hpp"

namespace metadio {

struct Budget {
  std::uint64_t steps = 200000;
  std::int64_t max_prime_power = 1000;  // largest modulus q for BS, largest prime for Z components
  std::size_t max_monic_degree = 3;
  std::int64_t radius = 6;              // witness search radius
  double time_limit = 60.0;             // seconds
  std::size_t node_cap = 20000;         // residue classes alive at once in a refinement
};

// ---------------------------------------------------------------------------
// Certificates

struct ModulusLevel {
  std::size_t index = 0;      // position in the modulus schedule
  std::size_t component = 0;  // wreath component, 0 for BS
  std::int64_t modulus = 0;   // q (BS) or d (wreath)
  DensePoly poly;             // monic h over Z_d (wreath only)
  std::int64_t period = 0;    // period of k mod q, or of t mod (d, h)
  std::int64_t lattice = 1;   // lcm of the periods so far
  std::size_t nodes = 0;      // residue classes tested at this level
  std::size_t survivors = 0;  // classes with a residue solution
  friend bool operator==(const ModulusLevel&, const ModulusLevel&) = default;
};

struct LeafCert {
  enum class Kind { Modulus, Degenerate };
  Kind kind = Kind::Modulus;
  std::vector<ModulusLevel> chain;
  friend bool operator==(const LeafCert&, const LeafCert&) = default;
};

struct BranchCert {
  enum class Kind { EmptyDisjunction, Modulus, Leaves };
  Kind kind = Kind::EmptyDisjunction;
  std::string stage;  // "semenov" or "grouping" for EmptyDisjunction
  std::vector<ModulusLevel> chain;
  std::vector<LeafCert> leaves;
  friend bool operator==(const BranchCert&, const BranchCert&) = default;
};

struct Certificate {
  enum class Kind { LinearInfeasible, Branches };
  std::string version = "v1";
  std::string system_hash;
  Kind kind = Kind::Branches;
  InfeasibleRow row;  // LinearInfeasible
  std::vector<BranchCert> branches;
  friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct Stats {
  std::uint64_t steps = 0;
  std::uint64_t refutation_steps = 0;  // modulus refinement share of `steps`
  std::uint64_t witness_steps = 0;     // witness search share
  std::size_t branches = 0;
  std::size_t leaves = 0;
  std::uint64_t witness_candidates = 0;
  std::uint64_t residue_tests = 0;
};

struct Verdict {
  enum class Kind { Sat, Unsat, Unknown };
  Kind kind = Kind::Unknown;
  Assignment witness;                    // Sat
  std::optional<Certificate> certificate;  // Unsat
  std::string reason;                    // Unknown: what ran out
  Stats stats;
};

inline const char* verdict_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Sat: return "sat";
    case Verdict::Kind::Unsat: return "unsat";
    default: return "unknown";
  }
}

// ---------------------------------------------------------------------------
// Pipeline: everything up to the refutation / witness searches. Deterministic,
// so the certificate verifier can rebuild it.

struct Leaf {
  std::vector<std::string> params;
  Substitution values;          // exponent variables (and Z.* for k = 1) -> forms over params
  std::vector<TriSystem> tris;  // one per component, substituted
  bool degenerate = false;      // a nonzero assumption became 0, or a row became 0 != 0
};

struct Branch {
  std::vector<TriSystem> tris;  // one per component, over the linear-stage parameters
  Disjunction disjunction;      // solutions of the residual exponential equations
  std::string stage;            // "semenov" / "grouping"
  std::vector<Leaf> leaves;
};

struct Pipeline {
  ReducedSystem red;
  bool linear_empty = false;
  InfeasibleRow infeasible;
  Substitution linear_values;  // from the linear stage
  std::vector<Branch> branches;
};

namespace detail {

inline std::set<std::string> tri_variables(const std::vector<TriSystem>& tris) {
  std::set<std::string> s;
  for (const auto& t : tris) {
    auto v = exponent_variables(t);
    s.insert(v.begin(), v.end());
  }
  return s;
}

inline TriSystem substitute_tri(const TriSystem& t, const Substitution& sub) {
  TriSystem r = t;
  for (auto& p : r.pivots) p.row = p.row.substitute(sub);
  for (auto& e : r.residuals) e = e.substitute(sub);
  for (auto& e : r.nonzero) e = e.substitute(sub);
  return r;
}

inline bool leaf_degenerate(const std::vector<TriSystem>& tris) {
  for (const auto& t : tris) {
    for (const auto& c : t.nonzero)
      if (c.is_zero()) return true;
    for (const auto& r : t.residuals)
      if (!r.is_zero() && (r.is_constant() || r.is_monomial())) return true;
  }
  return false;
}

// Exponent variables of the group variables (plus Z.* when k = 1).
inline std::vector<std::string> group_coordinates(const ReducedSystem& red) {
  std::vector<std::string> out;
  for (const auto& x : red.group_vars) {
    out.push_back(exp_var(red.spec, x));
    if (red.spec.is_bs() && red.spec.k == 1) out.push_back(unknown_var(red.spec, x));
  }
  return out;
}

inline Substitution compose(const std::vector<std::string>& coords, const Substitution& first, const Substitution& second) {
  Substitution out;
  for (const auto& c : coords) {
    auto it = first.find(c);
    AffineForm f = it == first.end() ? AffineForm::variable(c) : it->second;
    out[c] = f.substitute(second);
  }
  return out;
}

}  // namespace detail

inline Pipeline build_pipeline(const EquationSystem& system, std::size_t solver_steps = 2000000) {
  Pipeline pl;
  pl.red = reduce(system);
  Parametrization lin = parametrize(pl.red.linear, "p");
  if (lin.empty()) {
    pl.linear_empty = true;
    pl.infeasible = *lin.solution.certificate;
    return pl;
  }
  pl.linear_values = lin.values;
  const auto coords = detail::group_coordinates(pl.red);

  // per-component triangular branches, combined by cartesian product
  std::vector<std::vector<TriSystem>> combos{{}};
  for (const auto& comp : pl.red.components) {
    ComponentSystem sub = comp;
    for (auto& r : sub.rows) r = r.substitute(lin.values);
    auto tris = triangularize(sub);
    std::vector<std::vector<TriSystem>> next;
    for (const auto& base : combos)
      for (const auto& t : tris) {
        auto b = base;
        b.push_back(t);
        next.push_back(std::move(b));
      }
    combos = std::move(next);
  }

  const bool bs = pl.red.spec.is_bs();
  for (auto& tris : combos) {
    Branch br;
    br.tris = std::move(tris);
    br.stage = bs ? "semenov" : "grouping";
    std::vector<ExpSum> residuals;
    for (const auto& t : br.tris) residuals.insert(residuals.end(), t.residuals.begin(), t.residuals.end());
    if (residuals.empty()) br.disjunction = {LinearSystem{}};
    else if (bs) br.disjunction = semenov_solve(SemenovSystem{pl.red.spec.k, residuals, {}}, solver_steps);
    else br.disjunction = grouping_solve(residuals, solver_steps);

    Substitution base = detail::compose(coords, lin.values, {});
    for (const auto& ls : br.disjunction) {
      Leaf leaf;
      Parametrization p = parametrize(ls, "q");
      if (p.empty()) continue;  // canonical_disjunction already drops these
      for (const auto& t : br.tris) leaf.tris.push_back(detail::substitute_tri(t, p.values));
      leaf.values = detail::compose(coords, base, p.values);
      std::set<std::string> params = detail::tri_variables(leaf.tris);
      for (const auto& [c, f] : leaf.values) {
        auto v = f.variables();
        params.insert(v.begin(), v.end());
      }
      leaf.params.assign(params.begin(), params.end());
      leaf.degenerate = detail::leaf_degenerate(leaf.tris);
      br.leaves.push_back(std::move(leaf));
    }
    pl.branches.push_back(std::move(br));
  }
  return pl;
}

// ---------------------------------------------------------------------------
// Modulus schedule. Fixed and budget independent so that a level can be named
// by its index:
//   BS(1,k):  prime powers q coprime to k, increasing
//   A wr Z:   by degree D = 1, 2, ...: component c, then d (divisors >= 2 of
//             n_c, increasing; primes <= 13 for a Z component), then monic h
//             of degree D over Z_d with unit constant term, in monic_enum order

struct ModulusDescriptor {
  std::size_t component = 0;
  std::int64_t modulus = 0;
  DensePoly poly;
  friend bool operator==(const ModulusDescriptor&, const ModulusDescriptor&) = default;
};

class ModulusSchedule {
 public:
  explicit ModulusSchedule(const GroupSpec& spec) : spec_(spec) {}

  // nullopt past the end of what `degree_cap` / `q_cap` allow
  std::optional<ModulusDescriptor> at(std::size_t index, std::int64_t q_cap, std::size_t degree_cap) {
    while (cache_.size() <= index) {
      if (!extend(q_cap, degree_cap)) return std::nullopt;
    }
    const auto& d = cache_[index];
    if (spec_.is_bs() ? d.modulus > q_cap : d.poly.size() - 1 > degree_cap) return std::nullopt;
    return d;
  }

 private:
  bool extend(std::int64_t q_cap, std::size_t degree_cap) {
    if (spec_.is_bs()) {
      std::int64_t q = cache_.empty() ? 1 : cache_.back().modulus;
      for (++q; q <= q_cap; ++q)
        if (prime_power_base(q) && gcd_i64(q, spec_.k) == 1) {
          cache_.push_back({0, q, {}});
          return true;
        }
      return false;
    }
    // wreath: build one whole degree at a time
    std::size_t deg = built_degree_ + 1;
    if (deg > degree_cap) return false;
    built_degree_ = deg;
    ComponentRing ring = spec_.ring();
    std::size_t before = cache_.size();
    for (std::size_t c = 0; c < ring.size(); ++c) {
      std::int64_t n = to_i64(ring.component(c).n);
      std::vector<std::int64_t> ds;
      if (n == 0) {
        for (std::int64_t p : {2, 3, 5, 7, 11, 13}) ds.push_back(p);
      } else {
        auto desc = divisors_desc(n);
        for (auto it = desc.rbegin(); it != desc.rend(); ++it)
          if (*it >= 2) ds.push_back(*it);
      }
      for (std::int64_t d : ds)
        for (auto& h : monic_enum(d, deg))
          if (gcd_i64(h[0], d) == 1) cache_.push_back({c, d, std::move(h)});
    }
    return cache_.size() > before || extend(q_cap, degree_cap);
  }

  GroupSpec spec_;
  std::vector<ModulusDescriptor> cache_;
  std::size_t built_degree_ = 0;
};

namespace detail {

// Rows (pivot rows and residual equations) of the target that live in the
// descriptor's component.
inline std::vector<LinRow> target_rows(const std::vector<TriSystem>& tris, std::size_t component, bool bs) {
  std::vector<LinRow> rows;
  for (const auto& t : tris) {
    if (!bs && t.component != component) continue;
    for (const auto& p : t.pivots) rows.push_back(p.row);
    for (const auto& r : t.residuals) {
      LinRow row;
      row.constant = r;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// Residue test of one class of parameter values against one modulus.
class ResidueTester {
 public:
  ResidueTester(const GroupSpec& spec, const ModulusDescriptor& m, std::vector<LinRow> rows)
      : bs_(spec.is_bs()), m_(m), rows_(std::move(rows)) {
    if (bs_) {
      period_ = mult_order(mod_i64(spec.k, m.modulus), m.modulus);
      std::int64_t p = 1 % m.modulus;
      for (std::int64_t e = 0; e < period_; ++e) {
        kpow_.push_back(p);
        p = mulmod(p, mod_i64(spec.k, m.modulus), m.modulus);
      }
    } else {
      period_ = t_period(m.poly, m.modulus);
      deg_ = m.poly.size() - 1;
      DensePoly cur = dense_rem(DensePoly{1}, m.poly, m.modulus);
      const DensePoly t = dense_rem(DensePoly{0, 1}, m.poly, m.modulus);
      for (std::int64_t e = 0; e < period_; ++e) {
        tpow_.push_back(padded(cur));
        cur = dense_mulmod(cur, t, m.poly, m.modulus);
      }
    }
    std::set<std::string> us;
    for (const auto& r : rows_)
      for (const auto& [u, c] : r.coeffs) us.insert(u);
    unknowns_.assign(us.begin(), us.end());
  }

  std::int64_t period() const { return period_; }
  bool has_rows() const { return !rows_.empty(); }

  bool solvable(const std::map<std::string, Int>& values) const {
    const std::int64_t q = m_.modulus;
    if (bs_) {
      IntMatrix A(rows_.size(), unknowns_.size());
      std::vector<Int> b(rows_.size());
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (std::size_t j = 0; j < unknowns_.size(); ++j) {
          auto it = rows_[i].coeffs.find(unknowns_[j]);
          if (it != rows_[i].coeffs.end()) A(i, j) = Int(static_cast<long>(eval_k(it->second, values)));
        }
        b[i] = Int(static_cast<long>(mod_i64(-eval_k(rows_[i].constant, values), q)));
      }
      return solvable_mod(A, b, Int(static_cast<long>(q)));
    }
    const std::size_t D = deg_;
    IntMatrix A(rows_.size() * D, unknowns_.size() * D);
    std::vector<Int> b(rows_.size() * D);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      for (std::size_t j = 0; j < unknowns_.size(); ++j) {
        auto it = rows_[i].coeffs.find(unknowns_[j]);
        if (it == rows_[i].coeffs.end()) continue;
        DensePoly a = eval_t(it->second, values);
        // column c of the multiplication matrix is a * t^c
        for (std::size_t c = 0; c < D; ++c) {
          DensePoly col = padded(dense_mulmod(a, basis(c), m_.poly, q));
          for (std::size_t r = 0; r < D; ++r) A(i * D + r, j * D + c) = Int(static_cast<long>(col[r]));
        }
      }
      DensePoly cst = eval_t(rows_[i].constant, values);
      for (std::size_t r = 0; r < D; ++r) b[i * D + r] = Int(static_cast<long>(mod_i64(-cst[r], q)));
    }
    return solvable_mod(A, b, Int(static_cast<long>(q)));
  }

 private:
  std::int64_t exponent_residue(const AffineForm& f, const std::map<std::string, Int>& values) const {
    return mod_i64(f.evaluate(values), period_);
  }
  std::int64_t eval_k(const ExpSum& e, const std::map<std::string, Int>& values) const {
    const std::int64_t q = m_.modulus;
    std::int64_t acc = 0;
    for (const auto& t : e.terms())
      acc = (acc + mulmod(mod_i64(t.coef, q), kpow_[static_cast<std::size_t>(exponent_residue(t.exponent, values))], q)) % q;
    return acc;
  }
  DensePoly eval_t(const ExpSum& e, const std::map<std::string, Int>& values) const {
    const std::int64_t q = m_.modulus;
    DensePoly acc(deg_, 0);
    for (const auto& t : e.terms()) {
      const DensePoly& p = tpow_[static_cast<std::size_t>(exponent_residue(t.exponent, values))];
      std::int64_t c = mod_i64(t.coef, q);
      for (std::size_t r = 0; r < deg_; ++r) acc[r] = (acc[r] + mulmod(c, p[r], q)) % q;
    }
    return acc;
  }
  DensePoly padded(DensePoly f) const {
    f.resize(deg_, 0);
    return f;
  }
  DensePoly basis(std::size_t c) const {
    DensePoly e(c + 1, 0);
    e[c] = 1;
    return e;
  }

  bool bs_;
  ModulusDescriptor m_;
  std::vector<LinRow> rows_;
  std::vector<std::string> unknowns_;
  std::int64_t period_ = 1;
  std::size_t deg_ = 0;
  std::vector<std::int64_t> kpow_;
  std::vector<DensePoly> tpow_;
};

using Residues = std::vector<std::int64_t>;

// Classes modulo `lattice` refining the classes `parents` modulo `prev`.
inline std::vector<Residues> refine(const std::vector<Residues>& parents, std::int64_t prev, std::int64_t lattice,
                                    std::size_t nparams) {
  const std::int64_t f = lattice / prev;
  std::vector<Residues> out;
  for (const auto& p : parents) {
    std::vector<std::int64_t> digit(nparams, 0);
    for (;;) {
      Residues r(nparams);
      for (std::size_t i = 0; i < nparams; ++i) r[i] = p[i] + prev * digit[i];
      out.push_back(std::move(r));
      std::size_t i = 0;
      while (i < nparams && ++digit[i] == f) digit[i++] = 0;
      if (i == nparams) break;
    }
  }
  return out;
}

inline std::map<std::string, Int> residue_values(const std::vector<std::string>& params, const Residues& r) {
  std::map<std::string, Int> v;
  for (std::size_t i = 0; i < params.size(); ++i) v[params[i]] = Int(static_cast<long>(r[i]));
  return v;
}

inline bool child_count_ok(std::size_t parents, std::int64_t factor, std::size_t nparams, std::size_t cap) {
  double c = static_cast<double>(parents);
  for (std::size_t i = 0; i < nparams; ++i) c *= static_cast<double>(factor);
  return c <= static_cast<double>(cap);
}

constexpr std::int64_t kLatticeCap = 1000000000000LL;

}  // namespace detail

// Incremental search for a chain of moduli leaving no residue class alive.
class ModulusSearch {
 public:
  enum class State { Running, Refuted, Exhausted };

  ModulusSearch(const GroupSpec& spec, std::vector<TriSystem> target, std::vector<std::string> params, const Budget& budget,
                std::size_t max_levels_tried = SIZE_MAX)
      : spec_(spec),
        schedule_(spec),
        target_(std::move(target)),
        params_(std::move(params)),
        budget_(budget),
        max_tried_(max_levels_tried) {
    nodes_.push_back(detail::Residues(params_.size(), 0));
  }

  State state() const { return state_; }
  const std::vector<ModulusLevel>& chain() const { return chain_; }

  // Performs at most `quantum` units of work; returns the units used.
  std::uint64_t step(std::uint64_t quantum) {
    std::uint64_t used = 0;
    while (state_ == State::Running && used < quantum) {
      ++used;
      if (!pending_) {
        open_next_level();
        continue;
      }
      auto& p = *pending_;
      if (p.pos < p.children.size()) {
        const auto& child = p.children[p.pos++];
        ++tests_;
        if (p.tester.solvable(detail::residue_values(params_, child))) p.survivors.push_back(child);
        continue;
      }
      if (p.survivors.size() < p.children.size()) {
        ModulusLevel lv{p.index, p.desc.component, p.desc.modulus, p.desc.poly, p.tester.period(), p.lattice,
                        p.children.size(), p.survivors.size()};
        chain_.push_back(std::move(lv));
        nodes_ = std::move(p.survivors);
        lattice_ = p.lattice;
        if (nodes_.empty()) state_ = State::Refuted;
      }
      pending_.reset();
    }
    return used;
  }

  std::uint64_t residue_tests() const { return tests_; }

 private:
  struct Pending {
    std::size_t index;
    ModulusDescriptor desc;
    detail::ResidueTester tester;
    std::int64_t lattice;
    std::vector<detail::Residues> children;
    std::size_t pos = 0;
    std::vector<detail::Residues> survivors;
  };

  void open_next_level() {
    if (tried_ >= max_tried_) {
      state_ = State::Exhausted;
      return;
    }
    auto desc = schedule_.at(next_index_, budget_.max_prime_power, budget_.max_monic_degree);
    if (!desc) {
      state_ = State::Exhausted;
      return;
    }
    std::size_t index = next_index_++;
    auto rows = detail::target_rows(target_, desc->component, spec_.is_bs());
    if (rows.empty()) return;
    ++tried_;
    detail::ResidueTester tester(spec_, *desc, std::move(rows));
    std::int64_t lattice = std::lcm(lattice_, tester.period());
    if (lattice > detail::kLatticeCap) return;
    if (!detail::child_count_ok(nodes_.size(), lattice / lattice_, params_.size(), budget_.node_cap)) return;
    auto children = detail::refine(nodes_, lattice_, lattice, params_.size());
    pending_.emplace(Pending{index, *desc, std::move(tester), lattice, std::move(children), 0, {}});
  }

  GroupSpec spec_;
  ModulusSchedule schedule_;
  std::vector<TriSystem> target_;
  std::vector<std::string> params_;
  Budget budget_;
  std::size_t max_tried_;
  std::size_t tried_ = 0;
  std::size_t next_index_ = 0;
  std::int64_t lattice_ = 1;
  std::vector<detail::Residues> nodes_;
  std::optional<Pending> pending_;
  std::vector<ModulusLevel> chain_;
  State state_ = State::Running;
  std::uint64_t tests_ = 0;
};

// Replays a chain: every recorded field must match the recomputation and no
// class may survive the last level.
inline bool replay_chain(const std::vector<ModulusLevel>& chain, const GroupSpec& spec, const std::vector<TriSystem>& target,
                         const std::vector<std::string>& params) {
  if (chain.empty()) return false;
  ModulusSchedule schedule(spec);
  std::vector<detail::Residues> nodes{detail::Residues(params.size(), 0)};
  std::int64_t lattice = 1;
  std::size_t last_index = 0;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& lv = chain[i];
    if (i > 0 && lv.index <= last_index) return false;
    last_index = lv.index;
    if (lv.index > 1000000) return false;
    auto desc = schedule.at(lv.index, INT64_MAX / 4, 64);
    if (!desc || desc->component != lv.component || desc->modulus != lv.modulus || desc->poly != lv.poly) return false;
    auto rows = detail::target_rows(target, desc->component, spec.is_bs());
    if (rows.empty()) return false;
    detail::ResidueTester tester(spec, *desc, std::move(rows));
    if (tester.period() != lv.period) return false;
    std::int64_t next = std::lcm(lattice, tester.period());
    if (next != lv.lattice || next > detail::kLatticeCap) return false;
    if (!detail::child_count_ok(nodes.size(), next / lattice, params.size(), 10000000)) return false;
    auto children = detail::refine(nodes, lattice, next, params.size());
    if (children.size() != lv.nodes) return false;
    std::vector<detail::Residues> survivors;
    for (const auto& c : children)
      if (tester.solvable(detail::residue_values(params, c))) survivors.push_back(c);
    if (survivors.size() != lv.survivors || survivors.size() == children.size()) return false;
    nodes = std::move(survivors);
    lattice = next;
  }
  return nodes.empty();
}

// ---------------------------------------------------------------------------
// Witness search.

// Tuples of indices into graded lists, shell by shell: shell s holds the tuples
// whose largest level is exactly s. `count(i, s)` is the number of items of
// coordinate i with level <= s.
class GradedProduct {
 public:
  using Count = std::function<std::size_t(std::size_t, std::int64_t)>;

  GradedProduct(std::size_t dims, Count count, std::int64_t max_shell)
      : dims_(dims), count_(std::move(count)), max_shell_(max_shell) {}

  std::int64_t shell() const { return shell_; }

  bool next(std::vector<std::size_t>& out) {
    if (dims_ == 0) {
      if (done_) return false;
      done_ = true;
      out.clear();
      return true;
    }
    for (;;) {
      if (!started_) {
        if (shell_ > max_shell_) return false;
        lim_.assign(dims_, 0);
        prev_.assign(dims_, 0);
        for (std::size_t i = 0; i < dims_; ++i) {
          lim_[i] = count_(i, shell_);
          prev_[i] = shell_ > 0 ? count_(i, shell_ - 1) : 0;
        }
        started_ = true;
        pivot_ = 0;
        if (!open_pivot()) {
          ++shell_;
          started_ = false;
          continue;
        }
        out = idx_;
        return true;
      }
      if (advance() || (++pivot_, open_pivot())) {
        out = idx_;
        return true;
      }
      ++shell_;
      started_ = false;
    }
  }

 private:
  // Tuples whose first new coordinate is `pivot_`: earlier coordinates old,
  // the pivot new, later ones anything up to the current level.
  bool open_pivot() {
    for (; pivot_ < dims_; ++pivot_) {
      lo_.assign(dims_, 0);
      hi_.assign(dims_, 0);
      bool empty = false;
      for (std::size_t i = 0; i < dims_; ++i) {
        if (i < pivot_) hi_[i] = prev_[i];
        else if (i == pivot_) lo_[i] = prev_[i], hi_[i] = lim_[i];
        else hi_[i] = lim_[i];
        empty = empty || lo_[i] >= hi_[i];
      }
      if (empty) continue;
      idx_ = lo_;
      return true;
    }
    return false;
  }
  bool advance() {
    std::size_t i = 0;
    while (i < dims_ && ++idx_[i] == hi_[i]) idx_[i] = lo_[i], ++i;
    return i < dims_;
  }

  std::size_t dims_;
  Count count_;
  std::int64_t max_shell_;
  std::int64_t shell_ = 0;
  bool started_ = false;
  bool done_ = false;
  std::size_t pivot_ = 0;
  std::vector<std::size_t> idx_, lim_, prev_, lo_, hi_;
};

namespace detail {

// 0, 1, -1, 2, -2, ...
inline std::int64_t zigzag(std::size_t j) {
  return j == 0 ? 0 : (j % 2 ? static_cast<std::int64_t>((j + 1) / 2) : -static_cast<std::int64_t>(j / 2));
}

// Small ring elements graded by size, built on demand.
class CandidateList {
 public:
  CandidateList(const GroupSpec& spec, std::size_t component) : spec_(spec), component_(component) {}

  std::size_t count(std::int64_t level) {
    while (built_ <= level) build(built_++);
    return ends_[static_cast<std::size_t>(level)];
  }
  const ZkFrac& zk(std::size_t j) const { return zk_[j]; }
  const ScalarLaurent& poly(std::size_t j) const { return poly_[j]; }

 private:
  void build(std::int64_t L) {
    if (spec_.is_bs()) {
      for (std::int64_t i = 0; i <= L; ++i)
        for (std::int64_t z = -L; z <= L; ++z) {
          if (std::max(i, z < 0 ? -z : z) != L || (z == 0 && i > 0)) continue;
          zk_.push_back(zk_normalize(Int(static_cast<long>(z)), i, spec_.k));
        }
      ends_.push_back(zk_.size());
      return;
    }
    ScalarRing ring = spec_.ring().component(component_);
    if (L == 0) poly_.push_back(ScalarLaurent(ring));
    std::int64_t cmax = L;
    if (!ring.is_integers()) cmax = std::min<std::int64_t>(L, to_i64(ring.n) / 2);
    for (std::int64_t d = -L; d <= L; ++d)
      for (std::int64_t c = -cmax; c <= cmax; ++c) {
        std::int64_t ac = c < 0 ? -c : c, ad = d < 0 ? -d : d;
        if (c == 0 || std::max(ac, ad) != L) continue;
        poly_.push_back(ScalarLaurent::monomial(ring, Int(static_cast<long>(c)), d));
      }
    ends_.push_back(poly_.size());
  }

  GroupSpec spec_;
  std::size_t component_;
  std::int64_t built_ = 0;
  std::vector<std::size_t> ends_;
  std::vector<ZkFrac> zk_;
  std::vector<ScalarLaurent> poly_;
};

using UnknownKey = std::pair<std::size_t, std::string>;  // (component, unknown)

}  // namespace detail

// Candidate witnesses read off one leaf: parameters run through integer
// shells, unknowns without a pivot take small values, pivots are solved by
// exact division from the back.
class LeafWitnessSearch {
 public:
  LeafWitnessSearch(const EquationSystem& system, const ReducedSystem& red, const Leaf& leaf, std::int64_t max_shell)
      : system_(system), red_(red), leaf_(leaf), enumerator_(0, {}, 0) {
    std::set<detail::UnknownKey> all, pivots;
    for (const auto& t : leaf_.tris) {
      for (const auto& p : t.pivots) {
        pivots.insert({t.component, p.unknown});
        for (const auto& [u, c] : p.row.coeffs) all.insert({t.component, u});
      }
    }
    for (const auto& k : all)
      if (!pivots.count(k)) free_.push_back(k);
    for (const auto& k : free_) lists_.emplace_back(red_.spec, k.first);
    const std::size_t np = leaf_.params.size();
    enumerator_ = GradedProduct(
        np + free_.size(),
        [this, np](std::size_t i, std::int64_t s) -> std::size_t {
          if (i < np) return static_cast<std::size_t>(2 * s + 1);
          return lists_[i - np].count(s);
        },
        max_shell);
  }

  // Tries the next candidate. True when it is a solution, stored in `found`.
  // False with exhausted() set when nothing is left.
  bool step(Assignment& found) {
    std::vector<std::size_t> idx;
    if (!enumerator_.next(idx)) {
      exhausted_ = true;
      return false;
    }
    ++candidates_;
    auto a = assemble(idx);
    if (a && verify_witness(system_, *a)) {
      found = std::move(*a);
      return true;
    }
    return false;
  }

  bool exhausted() const { return exhausted_; }
  std::uint64_t candidates() const { return candidates_; }

 private:
  std::optional<Assignment> assemble(const std::vector<std::size_t>& idx) {
    const std::size_t np = leaf_.params.size();
    std::map<std::string, Int> pv;
    for (std::size_t i = 0; i < np; ++i) pv[leaf_.params[i]] = Int(static_cast<long>(detail::zigzag(idx[i])));
    const bool bs = red_.spec.is_bs();
    std::map<detail::UnknownKey, ZkFrac> zk;
    std::map<detail::UnknownKey, ScalarLaurent> lp;
    for (std::size_t j = 0; j < free_.size(); ++j) {
      if (bs) zk.emplace(free_[j], lists_[j].zk(idx[np + j]));
      else lp.emplace(free_[j], lists_[j].poly(idx[np + j]));
    }
    try {
      for (const auto& t : leaf_.tris) {
        // solve pivots once all other unknowns in their rows are known
        std::vector<bool> done(t.pivots.size(), false);
        for (bool progress = true; progress;) {
          progress = false;
          for (std::size_t i = t.pivots.size(); i-- > 0;) {
            if (done[i]) continue;
            const auto& p = t.pivots[i];
            bool ready = true;
            for (const auto& [u, c] : p.row.coeffs)
              if (u != p.unknown && !(bs ? zk.count({t.component, u}) : lp.count({t.component, u}))) ready = false;
            if (!ready) continue;
            if (bs) {
              ZkFrac rest = p.row.constant.evaluate_kadic(pv);
              for (const auto& [u, c] : p.row.coeffs)
                if (u != p.unknown) rest = rest + c.evaluate_kadic(pv) * zk.at({t.component, u});
              auto q = zk_divide(-rest, p.row.coeffs.at(p.unknown).evaluate_kadic(pv));
              if (!q) return std::nullopt;
              zk[{t.component, p.unknown}] = *q;
            } else {
              ScalarLaurent rest = p.row.constant.evaluate_laurent(pv);
              for (const auto& [u, c] : p.row.coeffs)
                if (u != p.unknown) rest = rest + c.evaluate_laurent(pv) * lp.at({t.component, u});
              auto q = laurent_divide(-rest, p.row.coeffs.at(p.unknown).evaluate_laurent(pv));
              if (!q) return std::nullopt;
              lp[{t.component, p.unknown}] = *q;
            }
            done[i] = progress = true;
          }
        }
        for (bool d : done)
          if (!d) return std::nullopt;
      }
      Assignment a;
      ComponentRing ring = red_.spec.ring();
      for (const auto& x : red_.group_vars) {
        std::int64_t e = to_i64(leaf_.values.at(exp_var(red_.spec, x)).evaluate(pv));
        if (bs) {
          ZkFrac u = zk_integer(0, red_.spec.k);
          if (red_.spec.k == 1) u = zk_integer(leaf_.values.at(unknown_var(red_.spec, x)).evaluate(pv), 1);
          else if (auto it = zk.find({0, unknown_var(red_.spec, x)}); it != zk.end()) u = it->second;
          a[x] = BsElement{u, e};
        } else {
          RLaurent P(ring);
          for (std::size_t c = 0; c < ring.size(); ++c) {
            auto it = lp.find({c, unknown_var(red_.spec, x)});
            if (it == lp.end()) continue;
            for (const auto& [d, v] : it->second.terms()) P.add_term(d, ring.unit_vector(c, v));
          }
          a[x] = WreathElement{P, e};
        }
      }
      return a;
    } catch (const std::exception&) {
      return std::nullopt;  // exponents out of range
    }
  }

  const EquationSystem& system_;
  const ReducedSystem& red_;
  const Leaf& leaf_;
  std::vector<detail::UnknownKey> free_;
  std::vector<detail::CandidateList> lists_;
  GradedProduct enumerator_;
  bool exhausted_ = false;
  std::uint64_t candidates_ = 0;
};

// Plain search through balls of growing radius.
class BallWitnessSearch {
 public:
  BallWitnessSearch(const EquationSystem& system, std::int64_t radius)
      : system_(system), enumerator_(system.variables.size(), {}, radius) {
    enumerator_ = GradedProduct(
        system.variables.size(),
        [this](std::size_t, std::int64_t s) -> std::size_t {
          while (static_cast<std::int64_t>(ends_.size()) <= s) grow();
          return ends_[static_cast<std::size_t>(s)];
        },
        radius);
  }

  bool step(Assignment& found) {
    std::vector<std::size_t> idx;
    if (!enumerator_.next(idx)) {
      exhausted_ = true;
      return false;
    }
    ++candidates_;
    Assignment a;
    for (std::size_t i = 0; i < idx.size(); ++i) a[system_.variables[i]] = elements_[idx[i]];
    if (verify_witness(system_, a)) {
      found = std::move(a);
      return true;
    }
    return false;
  }

  bool exhausted() const { return exhausted_; }
  std::uint64_t candidates() const { return candidates_; }

 private:
  void grow() {
    const std::int64_t s = static_cast<std::int64_t>(ends_.size());
    auto ball = ball_elements(system_.spec, Ball{s});
    for (auto& e : ball) {
      std::string key = render_element(e);
      if (seen_.insert(key).second) elements_.push_back(std::move(e));
    }
    ends_.push_back(elements_.size());
  }

  const EquationSystem& system_;
  GradedProduct enumerator_;
  std::vector<Element> elements_;
  std::set<std::string> seen_;
  std::vector<std::size_t> ends_;
  bool exhausted_ = false;
  std::uint64_t candidates_ = 0;
};

// ---------------------------------------------------------------------------
// Driver.

namespace detail {

constexpr std::size_t kEmptyBranchLevels = 64;  // schedule prefix tried on a branch with no exponent solutions
constexpr std::uint64_t kQuantum = 32;

inline std::vector<std::string> branch_params(const Branch& br) {
  auto v = tri_variables(br.tris);
  return {v.begin(), v.end()};
}

}  // namespace detail

inline Verdict decide(const EquationSystem& system, const Budget& budget = {}) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto out_of_time = [&] { return std::chrono::duration<double>(Clock::now() - start).count() > budget.time_limit; };

  Verdict v;
  Certificate cert;
  cert.system_hash = system_hash(system);

  Pipeline pl;
  try {
    pl = build_pipeline(system);
  } catch (const SearchLimit& e) {
    v.reason = e.what();
    return v;
  }
  if (pl.linear_empty) {
    v.kind = Verdict::Kind::Unsat;
    cert.kind = Certificate::Kind::LinearInfeasible;
    cert.row = pl.infeasible;
    v.certificate = cert;
    return v;
  }
  v.stats.branches = pl.branches.size();

  struct LeafTask {
    std::size_t branch, leaf;
    std::unique_ptr<ModulusSearch> refute;
    std::unique_ptr<LeafWitnessSearch> witness;
  };
  std::vector<LeafTask> tasks;
  cert.branches.resize(pl.branches.size());
  for (std::size_t b = 0; b < pl.branches.size(); ++b) {
    const Branch& br = pl.branches[b];
    BranchCert& bc = cert.branches[b];
    v.stats.leaves += br.leaves.size();
    if (br.disjunction.empty()) {
      ModulusSearch ms(system.spec, br.tris, detail::branch_params(br), budget, detail::kEmptyBranchLevels);
      while (ms.state() == ModulusSearch::State::Running) {
        std::uint64_t used = ms.step(detail::kQuantum);
        v.stats.steps += used;
        v.stats.refutation_steps += used;
      }
      v.stats.residue_tests += ms.residue_tests();
      if (ms.state() == ModulusSearch::State::Refuted) {
        bc.kind = BranchCert::Kind::Modulus;
        bc.chain = ms.chain();
      } else {
        bc.kind = BranchCert::Kind::EmptyDisjunction;
        bc.stage = br.stage;
      }
      continue;
    }
    bc.kind = BranchCert::Kind::Leaves;
    bc.leaves.resize(br.leaves.size());
    for (std::size_t l = 0; l < br.leaves.size(); ++l) {
      const Leaf& leaf = br.leaves[l];
      if (leaf.degenerate) {
        bc.leaves[l].kind = LeafCert::Kind::Degenerate;
        continue;
      }
      tasks.push_back({b, l, std::make_unique<ModulusSearch>(system.spec, leaf.tris, leaf.params, budget),
                       std::make_unique<LeafWitnessSearch>(system, pl.red, leaf, std::int64_t{1} << 20)});
    }
  }

  BallWitnessSearch ball(system, budget.radius);
  auto finish_stats = [&] {
    v.stats.witness_candidates = ball.candidates();
    for (const auto& t : tasks) {
      v.stats.witness_candidates += t.witness->candidates();
      v.stats.residue_tests += t.refute->residue_tests();
    }
  };
  auto unsat = [&] {
    for (const auto& t : tasks) {
      if (t.refute->state() != ModulusSearch::State::Refuted) return false;
    }
    return true;
  };
  auto place_chains = [&] {
    for (const auto& t : tasks) {
      auto& lc = cert.branches[t.branch].leaves[t.leaf];
      lc.kind = LeafCert::Kind::Modulus;
      lc.chain = t.refute->chain();
    }
  };

  for (;;) {
    if (unsat()) {
      place_chains();
      finish_stats();
      v.kind = Verdict::Kind::Unsat;
      v.certificate = std::move(cert);
      return v;
    }
    if (v.stats.steps >= budget.steps) {
      v.reason = "step budget exhausted";
      break;
    }
    if (out_of_time()) {
      v.reason = "time limit reached";
      break;
    }
    bool active = false;
    // shrink the slices near the end of the budget so every task still gets a turn
    const std::uint64_t slots = 2 * tasks.size() + 1;
    const std::uint64_t quantum = std::clamp<std::uint64_t>((budget.steps - v.stats.steps) / slots, 1, detail::kQuantum);
    for (auto& t : tasks) {
      if (t.refute->state() == ModulusSearch::State::Running) {
        active = true;
        std::uint64_t used = t.refute->step(quantum);
        v.stats.steps += used;
        v.stats.refutation_steps += used;
      }
      if (!t.witness->exhausted()) {
        active = true;
        for (std::uint64_t i = 0; i < quantum && !t.witness->exhausted(); ++i) {
          ++v.stats.steps;
          ++v.stats.witness_steps;
          if (t.witness->step(v.witness)) {
            finish_stats();
            v.kind = Verdict::Kind::Sat;
            return v;
          }
        }
      }
    }
    if (!ball.exhausted()) {
      active = true;
      for (std::uint64_t i = 0; i < quantum && !ball.exhausted(); ++i) {
        ++v.stats.steps;
        ++v.stats.witness_steps;
        if (ball.step(v.witness)) {
          finish_stats();
          v.kind = Verdict::Kind::Sat;
          return v;
        }
      }
    }
    if (!active) {
      v.reason = "search space exhausted within the modulus and radius limits";
      break;
    }
  }
  finish_stats();
  v.witness.clear();
  return v;
}

// Rebuilds the pipeline and re-derives every recorded field.
inline bool verify_certificate(const Certificate& cert, const EquationSystem& system, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  if (cert.version != "v1") return fail("unsupported certificate version");
  if (cert.system_hash != system_hash(system)) return fail("system hash mismatch");
  Pipeline pl;
  try {
    pl = build_pipeline(system);
  } catch (const SearchLimit&) {
    return fail("pipeline exceeded its step limit");
  }
  if (cert.kind == Certificate::Kind::LinearInfeasible) {
    if (!pl.linear_empty) return fail("linear stage is feasible");
    if (!(cert.row == pl.infeasible)) return fail("infeasible row does not match");
    return cert.branches.empty() ? true : fail("unexpected branches");
  }
  if (pl.linear_empty) return fail("linear stage is infeasible but a branch certificate was given");
  if (cert.branches.size() != pl.branches.size()) return fail("branch count mismatch");
  for (std::size_t b = 0; b < pl.branches.size(); ++b) {
    const Branch& br = pl.branches[b];
    const BranchCert& bc = cert.branches[b];
    const std::string where = "branch " + std::to_string(b) + ": ";
    switch (bc.kind) {
      case BranchCert::Kind::EmptyDisjunction:
        if (!br.disjunction.empty()) return fail(where + "exponential equations have solutions");
        if (bc.stage != br.stage) return fail(where + "stage mismatch");
        if (!bc.chain.empty() || !bc.leaves.empty()) return fail(where + "unexpected payload");
        break;
      case BranchCert::Kind::Modulus:
        if (!bc.stage.empty() || !bc.leaves.empty()) return fail(where + "unexpected payload");
        if (!replay_chain(bc.chain, system.spec, br.tris, detail::branch_params(br)))
          return fail(where + "modulus chain does not replay");
        break;
      case BranchCert::Kind::Leaves:
        if (!bc.stage.empty() || !bc.chain.empty()) return fail(where + "unexpected payload");
        if (bc.leaves.size() != br.leaves.size()) return fail(where + "leaf count mismatch");
        for (std::size_t l = 0; l < br.leaves.size(); ++l) {
          const LeafCert& lc = bc.leaves[l];
          const Leaf& leaf = br.leaves[l];
          const std::string lw = where + "leaf " + std::to_string(l) + ": ";
          if (lc.kind == LeafCert::Kind::Degenerate) {
            if (!leaf.degenerate) return fail(lw + "leaf is not degenerate");
            if (!lc.chain.empty()) return fail(lw + "unexpected chain");
          } else if (!replay_chain(lc.chain, system.spec, leaf.tris, leaf.params)) {
            return fail(lw + "modulus chain does not replay");
          }
        }
        break;
    }
  }
  return true;
}

}  // namespace metadio
