#pragma once

// Brute-force reference searches. Deliberately built only on the group
// arithmetic and on direct evaluation, never on the reduction or solver code.

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "metadio/expsum.hpp"
#include "metadio/groups.hpp"
#include "metadio/system.hpp"

namespace metadio {

// BS(1,k): (z k^-i, r) with |z| <= R, 0 <= i <= R, |r| <= R.
// A wr Z: (P, x) with support in [-R, R], sum of |coefficient| <= R
// (torsion coordinates measured by their least absolute representative), |x| <= R.
struct Ball {
  std::int64_t radius = 3;
};

inline std::vector<Element> ball_elements(const GroupSpec& spec, const Ball& ball) {
  const std::int64_t R = ball.radius;
  std::vector<Element> out;
  if (spec.is_bs()) {
    std::set<std::pair<std::pair<std::string, std::int64_t>, std::int64_t>> seen;
    for (std::int64_t r = -R; r <= R; ++r)
      for (std::int64_t i = 0; i <= (spec.k == 1 ? 0 : R); ++i)
        for (std::int64_t z = -R; z <= R; ++z) {
          ZkFrac u = zk_normalize(Int(static_cast<long>(z)), i, spec.k);
          if (!seen.insert({{u.z.get_str(), u.i}, r}).second) continue;
          out.push_back(BsElement{u, r});
        }
    return out;
  }
  ComponentRing ring = spec.ring();
  const std::size_t m = ring.size();
  // coordinate slots: (position, component)
  std::vector<std::pair<std::int64_t, std::size_t>> slots;
  for (std::int64_t d = -R; d <= R; ++d)
    for (std::size_t c = 0; c < m; ++c) slots.push_back({d, c});
  std::vector<RLaurent> polys;
  std::function<void(std::size_t, std::int64_t, RLaurent&)> rec = [&](std::size_t s, std::int64_t budget, RLaurent& p) {
    if (s == slots.size()) {
      polys.push_back(p);
      return;
    }
    rec(s + 1, budget, p);
    auto [d, c] = slots[s];
    std::int64_t n = to_i64(ring.component(c).n);
    std::int64_t lo = -budget, hi = budget;
    if (n > 0) {
      lo = std::max(lo, -(n - 1) / 2);
      hi = std::min(hi, n / 2);
    }
    for (std::int64_t v = lo; v <= hi; ++v) {
      if (v == 0) continue;
      RLaurent q = p;
      q.add_term(d, ring.unit_vector(c, Int(static_cast<long>(v))));
      rec(s + 1, budget - (v < 0 ? -v : v), q);
    }
  };
  RLaurent zero(ring);
  rec(0, R, zero);
  for (std::int64_t x = -R; x <= R; ++x)
    for (const auto& p : polys) out.push_back(WreathElement{p, x});
  return out;
}

// Every assignment from the ball satisfying the system, up to `limit` of them
// (0 = no limit). Variables are enumerated in system order.
inline std::vector<Assignment> brute_force_group(const EquationSystem& system, const Ball& ball, std::size_t limit = 0) {
  std::vector<Assignment> found;
  const auto elems = ball_elements(system.spec, ball);
  const auto& vars = system.variables;
  Assignment a;
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == vars.size()) {
      if (verify_witness(system, a)) {
        found.push_back(a);
        if (limit && found.size() >= limit) return true;
      }
      return false;
    }
    for (const auto& e : elems) {
      a[vars[i]] = e;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  rec(0);
  return found;
}

inline bool group_has_solution_in_ball(const EquationSystem& system, const Ball& ball) {
  return !brute_force_group(system, ball, 1).empty();
}

struct Box {
  std::int64_t lo = -8;
  std::int64_t hi = 20;
};

using IntAssignment = std::map<std::string, Int>;

inline void for_each_point(const std::vector<std::string>& vars, const Box& box, const std::set<std::string>& natural,
                           const std::function<void(const IntAssignment&)>& f) {
  IntAssignment v;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == vars.size()) {
      f(v);
      return;
    }
    std::int64_t lo = natural.count(vars[i]) ? std::max<std::int64_t>(box.lo, 0) : box.lo;
    for (std::int64_t x = lo; x <= box.hi; ++x) {
      v[vars[i]] = Int(static_cast<long>(x));
      rec(i + 1);
    }
  };
  rec(0);
}

// All points of the box (intersected with N for natural variables) solving
// every equation exactly in Z[1/k].
inline std::vector<IntAssignment> brute_force_exp(const SemenovSystem& sys, const Box& box) {
  auto vs = sys.variables();
  std::vector<std::string> vars(vs.begin(), vs.end());
  std::vector<IntAssignment> out;
  for_each_point(vars, box, sys.natural, [&](const IntAssignment& v) {
    for (const auto& e : sys.equations)
      if (!zk_is_zero(e.evaluate_kadic(v))) return;
    out.push_back(v);
  });
  return out;
}

// Same for sums over Z[t^+-1] or Z_n[t^+-1].
inline std::vector<IntAssignment> brute_force_laurent(const std::vector<ExpSum>& equations, const Box& box) {
  std::set<std::string> vs;
  for (const auto& e : equations) {
    auto v = e.variables();
    vs.insert(v.begin(), v.end());
  }
  std::vector<std::string> vars(vs.begin(), vs.end());
  std::vector<IntAssignment> out;
  for_each_point(vars, box, {}, [&](const IntAssignment& v) {
    for (const auto& e : equations)
      if (!e.evaluate_laurent(v).is_zero()) return;
    out.push_back(v);
  });
  return out;
}

// Uniform-ish random element of the ball.
template <class Rng>
Element random_element(const GroupSpec& spec, std::int64_t radius, Rng& rng) {
  std::uniform_int_distribution<std::int64_t> sym(-radius, radius), nat(0, radius);
  if (spec.is_bs()) {
    std::int64_t i = spec.k == 1 ? 0 : nat(rng);
    return BsElement{zk_normalize(Int(static_cast<long>(sym(rng))), i, spec.k), sym(rng)};
  }
  ComponentRing ring = spec.ring();
  RLaurent p(ring);
  std::int64_t terms = nat(rng);
  for (std::int64_t j = 0; j < terms; ++j) {
    if (ring.size() == 0) break;
    std::uniform_int_distribution<std::size_t> comp(0, ring.size() - 1);
    std::size_t c = comp(rng);
    std::int64_t v = sym(rng);
    p.add_term(sym(rng), ring.unit_vector(c, Int(static_cast<long>(v))));
  }
  return WreathElement{p, sym(rng)};
}

}  // namespace metadio
