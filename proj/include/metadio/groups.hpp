#pragma once

// Normal-form arithmetic in BS(1,k) = Z[1/k] x| Z and in A wr Z, word
// evaluation, and witness checking. Everything else is tested against this.
//
//   BS(1,k):  (u1, r1)(u2, r2) = (u1 + u2 k^{-r1}, r1 + r2),  a = (1,0), b = (0,1)
//   A wr Z:   [[t^x1, P1],[0,1]] [[t^x2, P2],[0,1]] = (P1 + t^x1 P2, x1 + x2)

#include <cctype>
#include <map>
#include <regex>
#include <stdexcept>
#include <string>
#include <variant>

#include "metadio/rings.hpp"
#include "metadio/system.hpp"

namespace metadio {

struct BsElement {
  ZkFrac u;
  std::int64_t r = 0;
  friend bool operator==(const BsElement&, const BsElement&) = default;
};

struct WreathElement {
  RLaurent p;
  std::int64_t x = 0;
  friend bool operator==(const WreathElement&, const WreathElement&) = default;
};

using Element = std::variant<BsElement, WreathElement>;
using Assignment = std::map<std::string, Element>;

class UnboundVariable : public std::runtime_error {
 public:
  explicit UnboundVariable(const std::string& v) : std::runtime_error("unbound variable " + v), name(v) {}
  std::string name;
};

inline Element identity(const GroupSpec& spec) {
  if (spec.is_bs()) return BsElement{zk_integer(0, spec.k), 0};
  return WreathElement{RLaurent(spec.ring()), 0};
}

inline void check_spec(const Element& g, const GroupSpec& spec) {
  bool ok = spec.is_bs() ? std::holds_alternative<BsElement>(g) : std::holds_alternative<WreathElement>(g);
  if (!ok) throw std::invalid_argument("element does not belong to " + spec.render());
  if (spec.is_bs()) {
    if (std::get<BsElement>(g).u.k != spec.k) throw std::invalid_argument("element uses a different base k");
  } else if (!(std::get<WreathElement>(g).p.ring() == spec.ring())) {
    throw std::invalid_argument("element uses a different coefficient group");
  }
}

inline Element mul(const Element& g, const Element& h, const GroupSpec& spec) {
  check_spec(g, spec);
  check_spec(h, spec);
  if (spec.is_bs()) {
    const auto& a = std::get<BsElement>(g);
    const auto& b = std::get<BsElement>(h);
    return BsElement{a.u + zk_shift(b.u, -a.r), a.r + b.r};
  }
  const auto& a = std::get<WreathElement>(g);
  const auto& b = std::get<WreathElement>(h);
  return WreathElement{a.p + b.p.shifted(a.x), a.x + b.x};
}

inline Element inv(const Element& g, const GroupSpec& spec) {
  check_spec(g, spec);
  if (spec.is_bs()) {
    const auto& a = std::get<BsElement>(g);
    return BsElement{-zk_shift(a.u, a.r), -a.r};
  }
  const auto& a = std::get<WreathElement>(g);
  return WreathElement{-a.p.shifted(-a.x), -a.x};
}

inline Element power(const Element& g, std::int64_t e, const GroupSpec& spec) {
  Element base = e < 0 ? inv(g, spec) : g;
  std::uint64_t n = e < 0 ? static_cast<std::uint64_t>(-e) : static_cast<std::uint64_t>(e);
  Element result = identity(spec);
  while (n) {
    if (n & 1) result = mul(result, base, spec);
    n >>= 1;
    if (n) base = mul(base, base, spec);
  }
  return result;
}

inline Element generator(const std::string& name, const GroupSpec& spec) {
  if (spec.is_bs()) {
    if (name == "a") return BsElement{zk_integer(1, spec.k), 0};
    if (name == "b") return BsElement{zk_integer(0, spec.k), 1};
    throw std::invalid_argument("unknown generator " + name);
  }
  int c = spec.component_of(name);
  ComponentRing ring = spec.ring();
  if (c < 0) return WreathElement{RLaurent(ring), 1};
  return WreathElement{RLaurent::monomial(ring, ring.unit_vector(static_cast<std::size_t>(c), 1), 0), 0};
}

inline Element eval_word(const Word& w, const Assignment& assignment, const GroupSpec& spec) {
  Element acc = identity(spec);
  for (const auto& l : w) {
    Element base;
    if (l.is_var()) {
      auto it = assignment.find(l.name);
      if (it == assignment.end()) throw UnboundVariable(l.name);
      base = it->second;
    } else {
      base = generator(l.name, spec);
    }
    acc = mul(acc, power(base, l.exponent, spec), spec);
  }
  return acc;
}

inline bool is_identity(const Element& g, const GroupSpec& spec) { return g == identity(spec); }

inline bool verify_witness(const EquationSystem& system, const Assignment& assignment) {
  for (const auto& v : system.variables)
    if (!assignment.count(v)) throw UnboundVariable(v);
  for (const auto& eq : system.equations) {
    Element l = eval_word(eq.lhs, assignment, system.spec);
    Element r = eval_word(eq.rhs, assignment, system.spec);
    if (!(l == r)) return false;
  }
  return true;
}

// "z*k^-i | r" for BS, "[deg:coef, ...] | x" for wreath elements.
inline std::string render_element(const Element& g) {
  if (const auto* b = std::get_if<BsElement>(&g)) return to_string(b->u) + " | " + std::to_string(b->r);
  const auto& w = std::get<WreathElement>(g);
  return w.p.render() + " | " + std::to_string(w.x);
}

inline Element parse_element(const std::string& text, const GroupSpec& spec) {
  auto fail = [&]() -> Element { throw std::invalid_argument("malformed element: " + text); };
  if (spec.is_bs()) {
    static const std::regex re(R"(^\s*(-?\d+)\*(\d+)\^-(\d+)\s*\|\s*(-?\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) return fail();
    if (std::stoll(m[2]) != spec.k) return fail();
    return BsElement{zk_normalize(Int(m[1].str()), std::stoll(m[3]), spec.k), std::stoll(m[4])};
  }
  ComponentRing ring = spec.ring();
  auto bar = text.rfind('|');
  if (bar == std::string::npos) return fail();
  std::string poly = text.substr(0, bar);
  std::int64_t x = 0;
  try {
    x = std::stoll(text.substr(bar + 1));
  } catch (const std::exception&) {
    return fail();
  }
  auto lb = poly.find('['), rb = poly.rfind(']');
  if (lb == std::string::npos || rb == std::string::npos || rb < lb) return fail();
  std::string body = poly.substr(lb + 1, rb - lb - 1);
  RLaurent p(ring);
  static const std::regex entry(R"(\s*(-?\d+)\s*:\s*(\(([^)]*)\)|-?\d+)\s*(,|$))");
  auto begin = std::sregex_iterator(body.begin(), body.end(), entry);
  std::size_t consumed = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (static_cast<std::size_t>(m.position(0)) != consumed) return fail();
    consumed += static_cast<std::size_t>(m.length(0));
    std::int64_t deg = std::stoll(m[1]);
    RElem c = ring.zero();
    if (m[3].matched) {
      std::string inner = m[3];
      std::size_t idx = 0, pos = 0;
      while (pos <= inner.size()) {
        auto comma = inner.find(',', pos);
        std::string part = inner.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (idx >= ring.size()) return fail();
        c.coords[idx++] = Int(std::string(part.begin(), std::remove_if(part.begin(), part.end(), ::isspace)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (idx != ring.size()) return fail();
    } else {
      if (ring.size() != 1) return fail();
      c.coords[0] = Int(m[2].str());
    }
    p.add_term(deg, c);
  }
  if (consumed != body.size() && body.find_first_not_of(" \t") != std::string::npos) return fail();
  return WreathElement{std::move(p), x};
}

}  // namespace metadio
