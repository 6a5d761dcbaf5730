#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "metadio/rings.hpp"

namespace metadio {

// sum_v coeff[v] * v + constant, integer coefficients, zero coefficients never stored.
class AffineForm {
 public:
  using Coeffs = std::map<std::string, Int>;

  AffineForm() = default;
  explicit AffineForm(Int constant) : constant_(std::move(constant)) {}

  static AffineForm variable(const std::string& v, const Int& c = 1) {
    AffineForm f;
    f.add(v, c);
    return f;
  }

  const Coeffs& coeffs() const { return coeffs_; }
  const Int& constant() const { return constant_; }
  Int coeff(const std::string& v) const {
    auto it = coeffs_.find(v);
    return it == coeffs_.end() ? Int(0) : it->second;
  }
  bool is_constant() const { return coeffs_.empty(); }
  bool is_zero() const { return coeffs_.empty() && constant_ == 0; }

  void add(const std::string& v, const Int& c) {
    if (c == 0) return;
    auto [it, inserted] = coeffs_.try_emplace(v, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) coeffs_.erase(it);
    }
  }
  void add_constant(const Int& c) { constant_ += c; }
  void set_constant(Int c) { constant_ = std::move(c); }

  AffineForm linear_part() const {
    AffineForm f = *this;
    f.constant_ = 0;
    return f;
  }

  std::set<std::string> variables() const {
    std::set<std::string> s;
    for (const auto& [v, c] : coeffs_) s.insert(v);
    return s;
  }

  AffineForm& operator+=(const AffineForm& o) {
    for (const auto& [v, c] : o.coeffs_) add(v, c);
    constant_ += o.constant_;
    return *this;
  }
  AffineForm& operator-=(const AffineForm& o) {
    for (const auto& [v, c] : o.coeffs_) add(v, -c);
    constant_ -= o.constant_;
    return *this;
  }
  AffineForm& operator*=(const Int& s) {
    if (s == 0) {
      coeffs_.clear();
      constant_ = 0;
      return *this;
    }
    for (auto& [v, c] : coeffs_) c *= s;
    constant_ *= s;
    return *this;
  }
  friend AffineForm operator+(AffineForm a, const AffineForm& b) { return a += b; }
  friend AffineForm operator-(AffineForm a, const AffineForm& b) { return a -= b; }
  friend AffineForm operator-(AffineForm a) { return a *= Int(-1); }
  friend AffineForm operator*(AffineForm a, const Int& s) { return a *= s; }

  // Replace variables by affine forms; unmapped variables stay.
  AffineForm substitute(const std::map<std::string, AffineForm>& sub) const {
    AffineForm out(constant_);
    for (const auto& [v, c] : coeffs_) {
      auto it = sub.find(v);
      if (it == sub.end()) {
        out.add(v, c);
      } else {
        out += it->second * c;
      }
    }
    return out;
  }

  // Requires every variable to be bound.
  Int evaluate(const std::map<std::string, Int>& values) const {
    Int r = constant_;
    for (const auto& [v, c] : coeffs_) {
      auto it = values.find(v);
      if (it == values.end()) throw std::out_of_range("unbound variable in affine form: " + v);
      r += c * it->second;
    }
    return r;
  }

  // Divide out the content and fix the sign of the leading coefficient, so
  // that equations f = 0 have one representative.
  AffineForm normalized_equation() const {
    Int g = int_abs(constant_);
    for (const auto& [v, c] : coeffs_) g = int_gcd(g, c);
    if (g == 0) return *this;
    AffineForm f = *this;
    for (auto& [v, c] : f.coeffs_) c /= g;
    f.constant_ /= g;
    bool negate = !f.coeffs_.empty() ? f.coeffs_.begin()->second < 0 : f.constant_ < 0;
    if (negate) f *= Int(-1);
    return f;
  }

  std::string render() const {
    std::string s;
    for (const auto& [v, c] : coeffs_) {
      if (c < 0) {
        s += s.empty() ? "-" : " - ";
      } else if (!s.empty()) {
        s += " + ";
      }
      Int a = int_abs(c);
      if (a != 1) s += a.get_str() + "*";
      s += v;
    }
    if (constant_ != 0 || s.empty()) {
      if (s.empty()) {
        s = constant_.get_str();
      } else {
        s += constant_ < 0 ? " - " : " + ";
        s += int_abs(constant_).get_str();
      }
    }
    return s;
  }

  friend bool operator==(const AffineForm& a, const AffineForm& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator<(const AffineForm& a, const AffineForm& b) {
    if (a.coeffs_ != b.coeffs_) return a.coeffs_ < b.coeffs_;
    return a.constant_ < b.constant_;
  }

 private:
  Coeffs coeffs_;
  Int constant_ = 0;
};

using Substitution = std::map<std::string, AffineForm>;

}  // namespace metadio
