#pragma once

#include <random>
#include <string>
#include <vector>

#include "metadio/groups.hpp"
#include "metadio/oracle.hpp"
#include "metadio/system.hpp"

namespace metadio::support {

inline std::vector<GroupSpec> families() {
  return {GroupSpec::bs(2), GroupSpec::bs(3), GroupSpec::wreath(0, {2}), GroupSpec::wreath(1, {}),
          GroupSpec::wreath(1, {2})};
}

inline std::string family_name(const GroupSpec& s) { return s.render().substr(6); }

// A constant word evaluating to g.
inline Word element_word(const Element& g, const GroupSpec& spec) {
  Word w;
  if (spec.is_bs()) {
    const auto& e = std::get<BsElement>(g);
    // b^i a^z b^-i b^r = (z k^-i, r)
    if (e.u.z != 0) {
      std::int64_t z = to_i64(e.u.z);
      if (e.u.i) w.push_back({Letter::Kind::Const, "b", e.u.i});
      w.push_back({Letter::Kind::Const, "a", z});
      if (e.u.i) w.push_back({Letter::Kind::Const, "b", -e.u.i});
    }
    if (e.r) w.push_back({Letter::Kind::Const, "b", e.r});
    return w;
  }
  const auto& e = std::get<WreathElement>(g);
  auto names = spec.generator_names();
  for (const auto& [d, c] : e.p.terms()) {
    for (std::size_t j = 0; j < c.coords.size(); ++j) {
      if (c.coords[j] == 0) continue;
      if (d) w.push_back({Letter::Kind::Const, "t", d});
      w.push_back({Letter::Kind::Const, names[1 + j], to_i64(c.coords[j])});
      if (d) w.push_back({Letter::Kind::Const, "t", -d});
    }
  }
  if (e.x) w.push_back({Letter::Kind::Const, "t", e.x});
  return w;
}

template <class Rng>
Word random_word(const GroupSpec& spec, const std::vector<std::string>& vars, std::size_t max_len, Rng& rng) {
  auto gens = spec.generator_names();
  if (!spec.is_bs() && spec.components() == 1) gens.pop_back();  // drop the alias `a`
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<int> coin(0, 2), ex(-2, 2);
  Word w;
  std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    int e = 0;
    while (e == 0) e = ex(rng);
    if (!vars.empty() && coin(rng) == 0) {
      std::uniform_int_distribution<std::size_t> pick(0, vars.size() - 1);
      w.push_back({Letter::Kind::Var, vars[pick(rng)], e});
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
      w.push_back({Letter::Kind::Const, gens[pick(rng)], e});
    }
  }
  return w;
}

inline EquationSystem make_system(const GroupSpec& spec, std::vector<Equation> eqs) {
  EquationSystem sys;
  sys.spec = spec;
  sys.equations = std::move(eqs);
  for (const auto& e : sys.equations)
    for (const Word* w : {&e.lhs, &e.rhs})
      for (const auto& l : *w)
        if (l.is_var() && std::find(sys.variables.begin(), sys.variables.end(), l.name) == sys.variables.end())
          sys.variables.push_back(l.name);
  return sys;
}

// Random system with up to `max_eqs` equations in up to `max_vars` variables.
// With `planted`, every right-hand side is chosen so that `*planted` solves it.
template <class Rng>
EquationSystem random_system(const GroupSpec& spec, std::size_t max_eqs, std::size_t max_vars, Rng& rng,
                             Assignment* planted = nullptr, std::int64_t radius = 2) {
  std::uniform_int_distribution<std::size_t> ne(1, max_eqs), nv(1, max_vars);
  std::vector<std::string> vars;
  std::size_t v = nv(rng);
  for (std::size_t i = 0; i < v; ++i) vars.push_back(std::string(1, static_cast<char>('X' + i)));
  if (planted) {
    planted->clear();
    for (const auto& x : vars) (*planted)[x] = random_element(spec, radius, rng);
  }
  std::vector<Equation> eqs;
  std::size_t m = ne(rng);
  for (std::size_t i = 0; i < m; ++i) {
    Word lhs = random_word(spec, vars, 3, rng);
    Word rhs;
    if (planted) {
      rhs = element_word(eval_word(lhs, *planted, spec), spec);
    } else {
      rhs = random_word(spec, vars, 2, rng);
    }
    eqs.push_back({lhs, rhs});
  }
  EquationSystem sys = make_system(spec, std::move(eqs));
  if (planted)
    for (auto it = planted->begin(); it != planted->end();)
      it = std::find(sys.variables.begin(), sys.variables.end(), it->first) == sys.variables.end() ? planted->erase(it) : std::next(it);
  return sys;
}

}  // namespace metadio::support
