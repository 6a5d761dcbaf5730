#pragma once

// Sums  sum_j c_j * B^{tau_j}  with integer coefficients and affine exponent
// forms tau_j. B is either the integer base k of BS(1,k) (values in Z[1/k])
// or the indeterminate t of a wreath product (values in Z[t^+-1] or
// Z_n[t^+-1]). These are the symbolic coefficients of the component systems.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "metadio/affine.hpp"
#include "metadio/rings.hpp"

namespace metadio {

struct Domain {
  enum class Kind { KAdic, Laurent };

  Kind kind = Kind::KAdic;
  std::int64_t k = 2;  // KAdic base
  Int n = 0;           // Laurent coefficient modulus, 0 for Z

  static Domain kadic(std::int64_t k) { return {Kind::KAdic, k, 0}; }
  static Domain laurent(Int n) { return {Kind::Laurent, 0, std::move(n)}; }

  bool is_kadic() const { return kind == Kind::KAdic; }
  ScalarRing scalars() const { return ScalarRing{is_kadic() ? Int(0) : n}; }
  // Z[1/k], Z[t^+-1] and Z_p[t^+-1] are integral domains; Z_n[t^+-1] for composite n is not.
  bool integral() const { return is_kadic() || n == 0 || is_prime(to_i64(n)); }
  Int normalize(const Int& c) const { return is_kadic() || n == 0 ? c : int_mod(c, n); }

  std::string render() const {
    if (is_kadic()) return "Z[1/" + std::to_string(k) + "]";
    return n == 0 ? std::string("Z[t,t^-1]") : "Z_" + n.get_str() + "[t,t^-1]";
  }
  friend bool operator==(const Domain& a, const Domain& b) {
    return a.kind == b.kind && a.k == b.k && a.n == b.n;
  }
};

struct ExpTerm {
  Int coef;
  AffineForm exponent;
  friend bool operator==(const ExpTerm&, const ExpTerm&) = default;
};

class ExpSum {
 public:
  ExpSum() = default;
  explicit ExpSum(Domain d) : domain_(std::move(d)) {}

  static ExpSum constant(const Domain& d, const Int& c) {
    ExpSum s(d);
    s.add_term(c, AffineForm());
    return s;
  }
  static ExpSum monomial(const Domain& d, const Int& c, const AffineForm& exponent) {
    ExpSum s(d);
    s.add_term(c, exponent);
    return s;
  }

  const Domain& domain() const { return domain_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }

  std::vector<ExpTerm> terms() const {
    std::vector<ExpTerm> out;
    out.reserve(terms_.size());
    for (const auto& [key, t] : terms_) out.push_back(t);
    return out;
  }

  // Constant part (terms whose exponent has no variables), as an integer
  // multiple of B^0 when that is exact.
  bool is_constant() const {
    for (const auto& [key, t] : terms_)
      if (!t.exponent.is_constant()) return false;
    return true;
  }

  std::set<std::string> variables() const {
    std::set<std::string> s;
    for (const auto& [key, t] : terms_) {
      auto v = t.exponent.variables();
      s.insert(v.begin(), v.end());
    }
    return s;
  }

  void add_term(const Int& coef, const AffineForm& exponent) {
    Int c = domain_.normalize(coef);
    if (c == 0) return;
    if (domain_.is_kadic() && domain_.k == 1) {
      merge(AffineForm(), c, AffineForm());
      return;
    }
    if (domain_.is_kadic()) {
      merge(exponent.linear_part(), c, exponent);
    } else {
      merge(exponent, c, exponent);
    }
  }

  ExpSum& operator+=(const ExpSum& o) {
    for (const auto& [key, t] : o.terms_) add_term(t.coef, t.exponent);
    return *this;
  }
  ExpSum& operator-=(const ExpSum& o) {
    for (const auto& [key, t] : o.terms_) add_term(-t.coef, t.exponent);
    return *this;
  }
  friend ExpSum operator+(ExpSum a, const ExpSum& b) { return a += b; }
  friend ExpSum operator-(ExpSum a, const ExpSum& b) { return a -= b; }
  friend ExpSum operator-(const ExpSum& a) {
    ExpSum r(a.domain_);
    for (const auto& [key, t] : a.terms_) r.add_term(-t.coef, t.exponent);
    return r;
  }
  friend ExpSum operator*(const ExpSum& a, const ExpSum& b) {
    ExpSum r(a.domain_);
    for (const auto& [ka, ta] : a.terms_)
      for (const auto& [kb, tb] : b.terms_) r.add_term(ta.coef * tb.coef, ta.exponent + tb.exponent);
    return r;
  }
  ExpSum scaled(const Int& c) const {
    ExpSum r(domain_);
    for (const auto& [key, t] : terms_) r.add_term(t.coef * c, t.exponent);
    return r;
  }
  // this * B^{form}
  ExpSum shifted(const AffineForm& form) const {
    ExpSum r(domain_);
    for (const auto& [key, t] : terms_) r.add_term(t.coef, t.exponent + form);
    return r;
  }
  ExpSum substitute(const Substitution& sub) const {
    ExpSum r(domain_);
    for (const auto& [key, t] : terms_) r.add_term(t.coef, t.exponent.substitute(sub));
    return r;
  }

  // Value in Z[1/k] at integer exponent values.
  ZkFrac evaluate_kadic(const std::map<std::string, Int>& values) const {
    ZkFrac acc = zk_integer(0, domain_.k);
    for (const auto& [key, t] : terms_) {
      std::int64_t e = to_i64(t.exponent.evaluate(values));
      acc = acc + zk_shift(zk_integer(t.coef, domain_.k), e);
    }
    return acc;
  }
  // Value in Z[t^+-1] or Z_n[t^+-1] at integer exponent values.
  ScalarLaurent evaluate_laurent(const std::map<std::string, Int>& values) const {
    ScalarLaurent p(domain_.scalars());
    for (const auto& [key, t] : terms_) p.add_term(to_i64(t.exponent.evaluate(values)), t.coef);
    return p;
  }

  std::string render() const {
    if (terms_.empty()) return "0";
    std::string base = domain_.is_kadic() ? std::to_string(domain_.k) : "t";
    std::string s;
    for (const auto& [key, t] : terms_) {
      Int a = int_abs(t.coef);
      if (s.empty()) {
        if (t.coef < 0) s += "-";
      } else {
        s += t.coef < 0 ? " - " : " + ";
      }
      bool unit_exp = t.exponent.is_zero();
      if (a != 1 || unit_exp) s += a.get_str();
      if (!unit_exp) {
        if (a != 1) s += "*";
        std::string e = t.exponent.render();
        bool simple = e.find_first_of(" -*") == std::string::npos;
        s += base + "^" + (simple ? e : "(" + e + ")");
      }
    }
    return s;
  }

  friend bool operator==(const ExpSum& a, const ExpSum& b) { return a.domain_ == b.domain_ && a.terms_ == b.terms_; }
  friend bool operator<(const ExpSum& a, const ExpSum& b) {
    if (a.terms_.size() != b.terms_.size()) return a.terms_.size() < b.terms_.size();
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    for (; ia != a.terms_.end(); ++ia, ++ib) {
      if (ia->second.exponent != ib->second.exponent) return ia->second.exponent < ib->second.exponent;
      if (ia->second.coef != ib->second.coef) return ia->second.coef < ib->second.coef;
    }
    return false;
  }

 private:
  // K-adic terms share one slot per linear part: c1 k^{L+a} + c2 k^{L+b} is
  // folded into a single term whose coefficient is not divisible by k.
  void merge(const AffineForm& key, const Int& c, const AffineForm& exponent) {
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      ExpTerm t{c, exponent};
      if (domain_.is_kadic()) canonical_kadic(t);
      terms_.emplace(key, std::move(t));
      return;
    }
    ExpTerm& t = it->second;
    if (!domain_.is_kadic()) {
      t.coef = domain_.normalize(t.coef + c);
    } else if (domain_.k == 1) {
      t.coef += c;
    } else {
      Int ea = t.exponent.constant(), eb = exponent.constant();
      Int lo = ea < eb ? ea : eb;
      Int kk(static_cast<long>(domain_.k));
      t.coef = t.coef * int_pow(kk, Int(ea - lo).get_ui()) + c * int_pow(kk, Int(eb - lo).get_ui());
      t.exponent.set_constant(lo);
      canonical_kadic(t);
    }
    if (t.coef == 0) terms_.erase(it);
  }

  void canonical_kadic(ExpTerm& t) const {
    if (domain_.k == 1 || t.coef == 0) return;
    Int kk(static_cast<long>(domain_.k));
    Int e = t.exponent.constant();
    while (int_divides(kk, t.coef)) {
      t.coef /= kk;
      e += 1;
    }
    t.exponent.set_constant(e);
  }

  Domain domain_;
  std::map<AffineForm, ExpTerm> terms_;
};

// Equations  sum_j beta_j k^{tau_j} + C = 0  over integer exponent variables;
// the constant C is a term with exponent 0. Variables in `natural` range
// over N, all others over Z.
struct SemenovSystem {
  std::int64_t k = 2;
  std::vector<ExpSum> equations;
  std::set<std::string> natural;

  std::set<std::string> variables() const {
    std::set<std::string> s;
    for (const auto& e : equations) {
      auto v = e.variables();
      s.insert(v.begin(), v.end());
    }
    return s;
  }
};

}  // namespace metadio
