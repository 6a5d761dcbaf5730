#pragma once

// Group specifications and equation systems as parsed from text.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "metadio/rings.hpp"

namespace metadio {

struct GroupSpec {
  enum class Kind { BS, Wreath };

  Kind kind = Kind::BS;
  std::int64_t k = 2;             // BS(1,k)
  std::size_t free_rank = 0;      // A = Z^m + Z_n1 + ... + Z_ns
  std::vector<std::int64_t> torsion;

  static GroupSpec bs(std::int64_t k) {
    if (k < 1) throw std::invalid_argument("BS(1,k) requires k >= 1");
    GroupSpec s;
    s.kind = Kind::BS;
    s.k = k;
    return s;
  }
  static GroupSpec wreath(std::size_t m, std::vector<std::int64_t> torsion) {
    for (auto n : torsion)
      if (n < 2) throw std::invalid_argument("torsion orders must be >= 2");
    GroupSpec s;
    s.kind = Kind::Wreath;
    s.free_rank = m;
    s.torsion = std::move(torsion);
    return s;
  }

  bool is_bs() const { return kind == Kind::BS; }
  std::size_t components() const { return free_rank + torsion.size(); }
  ComponentRing ring() const {
    ComponentRing r;
    r.free_rank = free_rank;
    for (auto n : torsion) r.torsion.emplace_back(static_cast<long>(n));
    return r;
  }

  // Constant generators of A sitting at position 0: a1..am, c1..cs. When A is
  // cyclic, plain `a` names its generator too.
  std::vector<std::string> generator_names() const {
    if (is_bs()) return {"a", "b"};
    std::vector<std::string> names{"t"};
    for (std::size_t i = 0; i < free_rank; ++i) names.push_back("a" + std::to_string(i + 1));
    for (std::size_t j = 0; j < torsion.size(); ++j) names.push_back("c" + std::to_string(j + 1));
    if (components() == 1) names.push_back("a");
    return names;
  }

  // Index of the A-component a generator name refers to, or -1 for t.
  int component_of(const std::string& gen) const {
    if (gen == "t") return -1;
    if (gen == "a" && components() == 1) return 0;
    if (gen.size() >= 2 && (gen[0] == 'a' || gen[0] == 'c')) {
      std::size_t idx = std::stoul(gen.substr(1));
      if (idx == 0) throw std::invalid_argument("unknown generator " + gen);
      if (gen[0] == 'a' && idx <= free_rank) return static_cast<int>(idx - 1);
      if (gen[0] == 'c' && idx <= torsion.size()) return static_cast<int>(free_rank + idx - 1);
    }
    throw std::invalid_argument("unknown generator " + gen);
  }

  std::string render() const {
    if (is_bs()) return "group BS " + std::to_string(k);
    std::string s = "group wreath Z^" + std::to_string(free_rank);
    for (auto n : torsion) s += " x Z_" + std::to_string(n);
    return s;
  }

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

struct Letter {
  enum class Kind { Const, Var };
  Kind kind = Kind::Const;
  std::string name;
  std::int64_t exponent = 1;

  bool is_var() const { return kind == Kind::Var; }
  friend bool operator==(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

inline Word inverse_word(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (auto& l : r) l.exponent = -l.exponent;
  return r;
}

inline Word concat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

struct Equation {
  Word lhs;
  Word rhs;

  // lhs * rhs^-1, the word that must evaluate to the identity
  Word as_relator() const { return concat(lhs, inverse_word(rhs)); }
  friend bool operator==(const Equation&, const Equation&) = default;
};

struct EquationSystem {
  GroupSpec spec;
  std::vector<Equation> equations;
  std::vector<std::string> variables;  // in order of first appearance

  friend bool operator==(const EquationSystem&, const EquationSystem&) = default;
};

inline std::string render_word(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (const auto& l : w) {
    if (!s.empty()) s += " ";
    s += l.name;
    if (l.exponent != 1) s += "^" + std::to_string(l.exponent);
  }
  return s;
}

inline std::string render_system(const EquationSystem& sys) {
  std::string s = sys.spec.render() + "\n";
  for (const auto& e : sys.equations) s += render_word(e.lhs) + " = " + render_word(e.rhs) + "\n";
  return s;
}

// FNV-1a over the canonical rendering; stable across runs and platforms.
inline std::string system_hash(const EquationSystem& sys) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : render_system(sys)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 15];
    h >>= 4;
  }
  return out;
}

}  // namespace metadio
