#pragma once

// Exact arithmetic for every coefficient domain the solver touches:
// unbounded integers, Z[1/k], Z_n, dense polynomials over Z_n, and sparse
// Laurent polynomials over a scalar ring or over R = Z^m + Z_n1 + ... + Z_ns.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace metadio {

using Int = mpz_class;

inline std::int64_t to_i64(const Int& v) {
  if (!v.fits_slong_p()) throw std::overflow_error("integer does not fit in 64 bits: " + v.get_str());
  return v.get_si();
}

inline Int int_pow(const Int& base, std::uint64_t e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Int int_abs(const Int& v) { return abs(v); }

inline Int int_gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

// Floor-mod into [0, n).
inline Int int_mod(const Int& v, const Int& n) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  return r;
}

inline Int int_floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline bool int_divides(const Int& d, const Int& v) {
  if (d == 0) return v == 0;
  return mpz_divisible_p(v.get_mpz_t(), d.get_mpz_t()) != 0;
}

// ---------------------------------------------------------------------------
// Machine-word modular helpers. Moduli in obstruction searches stay small.

inline std::int64_t mod_i64(std::int64_t v, std::int64_t n) {
  std::int64_t r = v % n;
  return r < 0 ? r + n : r;
}

inline std::int64_t mod_i64(const Int& v, std::int64_t n) { return to_i64(int_mod(v, Int(n))); }

inline std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t n) {
  return static_cast<std::int64_t>((static_cast<__int128>(a) * b) % n);
}

inline std::int64_t powmod(std::int64_t base, std::uint64_t e, std::int64_t n) {
  if (n == 1) return 0;
  std::int64_t result = 1;
  base = mod_i64(base, n);
  while (e) {
    if (e & 1) result = mulmod(result, base, n);
    base = mulmod(base, base, n);
    e >>= 1;
  }
  return result;
}

inline std::int64_t gcd_i64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

inline std::int64_t lcm_i64(std::int64_t a, std::int64_t b) {
  __int128 l = static_cast<__int128>(a / gcd_i64(a, b)) * b;
  if (l > INT64_MAX) throw std::overflow_error("lcm overflow");
  return static_cast<std::int64_t>(l);
}

inline std::optional<std::int64_t> invmod(std::int64_t a, std::int64_t n) {
  Int r;
  Int aa(static_cast<long>(mod_i64(a, n))), nn(static_cast<long>(n));
  if (mpz_invert(r.get_mpz_t(), aa.get_mpz_t(), nn.get_mpz_t()) == 0) {
    if (n == 1) return 0;
    return std::nullopt;
  }
  return r.get_si();
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// If q = p^m for a prime p, returns p.
inline std::optional<std::int64_t> prime_power_base(std::int64_t q) {
  if (q < 2) return std::nullopt;
  std::int64_t p = 2;
  while (p * p <= q && q % p != 0) ++p;
  if (q % p != 0) p = q;
  while (q % p == 0) q /= p;
  if (q != 1) return std::nullopt;
  return p;
}

inline std::vector<std::int64_t> divisors_desc(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = n; d >= 2; --d)
    if (n % d == 0) out.push_back(d);
  return out;
}

// Least P > 0 with k^P = 1 (mod q).
inline std::int64_t mult_order(std::int64_t k, std::int64_t q) {
  if (q < 2) throw std::invalid_argument("mult_order: modulus must be >= 2");
  if (gcd_i64(mod_i64(k, q), q) != 1) throw std::invalid_argument("mult_order: base not coprime to modulus");
  std::int64_t x = mod_i64(k, q);
  std::int64_t cur = x;
  for (std::int64_t p = 1; p <= q; ++p) {
    if (cur == 1) return p;
    cur = mulmod(cur, x, q);
  }
  throw std::logic_error("mult_order: no period found");
}

// Euler totient by trial division.
inline std::int64_t totient(std::int64_t n) {
  std::int64_t result = n;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

// ---------------------------------------------------------------------------
// Z[1/k]

struct ZkFrac {
  Int z;
  std::int64_t i = 0;
  std::int64_t k = 2;

  friend bool operator==(const ZkFrac& a, const ZkFrac& b) { return a.z == b.z && a.i == b.i && a.k == b.k; }
};

// Canonical form: i == 0 or k does not divide z. Negative i is folded into z.
inline ZkFrac zk_normalize(Int z, std::int64_t i, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("zk_normalize: base must be positive");
  if (k == 1 || z == 0) return {std::move(z), 0, k};
  if (i < 0) {
    z *= int_pow(Int(static_cast<long>(k)), static_cast<std::uint64_t>(-i));
    return {std::move(z), 0, k};
  }
  Int kk(static_cast<long>(k));
  while (i > 0 && int_divides(kk, z)) {
    z /= kk;
    --i;
  }
  return {std::move(z), i, k};
}

inline ZkFrac zk_integer(const Int& z, std::int64_t k) { return zk_normalize(z, 0, k); }

inline ZkFrac operator+(const ZkFrac& a, const ZkFrac& b) {
  if (a.k != b.k) throw std::invalid_argument("ZkFrac: mismatched base");
  std::int64_t i = std::max(a.i, b.i);
  Int kk(static_cast<long>(a.k));
  Int z = a.z * int_pow(kk, static_cast<std::uint64_t>(i - a.i)) + b.z * int_pow(kk, static_cast<std::uint64_t>(i - b.i));
  return zk_normalize(std::move(z), i, a.k);
}

inline ZkFrac operator-(const ZkFrac& a) { return {-a.z, a.i, a.k}; }
inline ZkFrac operator-(const ZkFrac& a, const ZkFrac& b) { return a + (-b); }

inline ZkFrac operator*(const ZkFrac& a, const ZkFrac& b) {
  if (a.k != b.k) throw std::invalid_argument("ZkFrac: mismatched base");
  return zk_normalize(a.z * b.z, a.i + b.i, a.k);
}

// a * k^e
inline ZkFrac zk_shift(const ZkFrac& a, std::int64_t e) {
  if (a.k == 1) return a;
  return zk_normalize(a.z, a.i - e, a.k);
}

inline bool zk_is_zero(const ZkFrac& a) { return a.z == 0; }

// Part of v coprime to k (strip every prime shared with k).
inline Int strip_k_primes(Int v, std::int64_t k) {
  if (k == 1) return v;
  Int kk(static_cast<long>(k));
  for (;;) {
    Int g = int_gcd(v, kk);
    if (g == 1 || v == 0) return v;
    v /= g;
  }
}

// Units of Z[1/k] are +-(products of primes dividing k).
inline bool zk_is_unit(const ZkFrac& a) {
  if (a.z == 0) return false;
  return int_abs(strip_k_primes(a.z, a.k)) == 1;
}

// a / b inside Z[1/k], if the quotient stays in the ring.
inline std::optional<ZkFrac> zk_divide(const ZkFrac& a, const ZkFrac& b) {
  if (a.k != b.k) throw std::invalid_argument("ZkFrac: mismatched base");
  if (b.z == 0) return std::nullopt;
  if (a.z == 0) return zk_integer(0, a.k);
  Int w = strip_k_primes(b.z, b.k);
  if (!int_divides(w, a.z)) return std::nullopt;
  Int s = b.z / w;  // a product of primes dividing k (with sign)
  Int num = a.z / w;
  // 1/s = (k^e / s) k^{-e} for the least e with s | k^e
  std::int64_t e = 0;
  Int ke(1);
  Int kk(static_cast<long>(a.k));
  while (!int_divides(s, ke)) {
    ke *= kk;
    ++e;
  }
  num *= ke / s;
  return zk_normalize(num, a.i - b.i + e, a.k);
}

inline std::string to_string(const ZkFrac& a) {
  std::ostringstream os;
  os << a.z.get_str() << "*" << a.k << "^-" << a.i;
  return os.str();
}

// ---------------------------------------------------------------------------
// Scalar rings: Z (n == 0) or Z_n, residues canonical in [0, n).

struct ScalarRing {
  Int n = 0;

  using value_type = Int;

  bool is_integers() const { return n == 0; }
  Int normalize(Int v) const { return n == 0 ? v : int_mod(v, n); }
  Int zero() const { return 0; }
  Int one() const { return normalize(1); }
  bool is_zero(const Int& v) const { return v == 0; }
  Int add(const Int& a, const Int& b) const { return normalize(a + b); }
  Int neg(const Int& a) const { return normalize(-a); }
  Int mul(const Int& a, const Int& b) const { return normalize(a * b); }
  Int from_int(const Int& v) const { return normalize(v); }
  bool is_unit(const Int& v) const {
    if (n == 0) return v == 1 || v == -1;
    return int_gcd(v, n) == 1;
  }
  std::string render(const Int& v) const { return v.get_str(); }
  friend bool operator==(const ScalarRing& a, const ScalarRing& b) { return a.n == b.n; }
};

// R = Z^m + Z_n1 + ... + Z_ns with componentwise operations.
struct RElem {
  std::vector<Int> coords;  // free components first, then torsion components
  friend bool operator==(const RElem& a, const RElem& b) { return a.coords == b.coords; }
};

struct ComponentRing {
  std::size_t free_rank = 0;
  std::vector<Int> torsion;

  using value_type = RElem;

  std::size_t size() const { return free_rank + torsion.size(); }
  ScalarRing component(std::size_t c) const { return c < free_rank ? ScalarRing{0} : ScalarRing{torsion[c - free_rank]}; }

  RElem zero() const { return RElem{std::vector<Int>(size(), Int(0))}; }
  RElem unit_vector(std::size_t c, const Int& v) const {
    RElem e = zero();
    e.coords[c] = component(c).normalize(v);
    return e;
  }
  RElem normalize(RElem v) const {
    for (std::size_t c = 0; c < size(); ++c) v.coords[c] = component(c).normalize(v.coords[c]);
    return v;
  }
  bool is_zero(const RElem& v) const {
    return std::all_of(v.coords.begin(), v.coords.end(), [](const Int& x) { return x == 0; });
  }
  RElem add(const RElem& a, const RElem& b) const {
    RElem r = a;
    for (std::size_t c = 0; c < size(); ++c) r.coords[c] = component(c).add(a.coords[c], b.coords[c]);
    return r;
  }
  RElem neg(const RElem& a) const {
    RElem r = a;
    for (std::size_t c = 0; c < size(); ++c) r.coords[c] = component(c).neg(a.coords[c]);
    return r;
  }
  RElem mul(const RElem& a, const RElem& b) const {
    RElem r = a;
    for (std::size_t c = 0; c < size(); ++c) r.coords[c] = component(c).mul(a.coords[c], b.coords[c]);
    return r;
  }
  RElem from_int(const Int& v) const {
    RElem r = zero();
    for (std::size_t c = 0; c < size(); ++c) r.coords[c] = component(c).normalize(v);
    return r;
  }
  std::string render(const RElem& v) const {
    if (size() == 1) return v.coords[0].get_str();
    std::string s = "(";
    for (std::size_t c = 0; c < size(); ++c) {
      if (c) s += ",";
      s += v.coords[c].get_str();
    }
    return s + ")";
  }
  friend bool operator==(const ComponentRing& a, const ComponentRing& b) {
    return a.free_rank == b.free_rank && a.torsion == b.torsion;
  }
};

// ---------------------------------------------------------------------------
// Sparse Laurent polynomials keyed by degree. No zero coefficient is stored.

template <class Ring>
class Laurent {
 public:
  using Coeff = typename Ring::value_type;
  using Terms = std::map<std::int64_t, Coeff>;

  Laurent() = default;
  explicit Laurent(Ring ring) : ring_(std::move(ring)) {}

  static Laurent monomial(Ring ring, Coeff c, std::int64_t degree) {
    Laurent p(std::move(ring));
    p.add_term(degree, c);
    return p;
  }

  const Ring& ring() const { return ring_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Coeff coefficient(std::int64_t degree) const {
    auto it = terms_.find(degree);
    return it == terms_.end() ? ring_.zero() : it->second;
  }
  std::int64_t min_degree() const { return terms_.empty() ? 0 : terms_.begin()->first; }
  std::int64_t max_degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

  void add_term(std::int64_t degree, const Coeff& c) {
    auto it = terms_.find(degree);
    if (it == terms_.end()) {
      Coeff v = ring_.normalize(c);
      if (!ring_.is_zero(v)) terms_.emplace(degree, std::move(v));
      return;
    }
    it->second = ring_.add(it->second, c);
    if (ring_.is_zero(it->second)) terms_.erase(it);
  }

  Laurent shifted(std::int64_t e) const {
    Laurent r(ring_);
    for (const auto& [d, c] : terms_) r.terms_.emplace(d + e, c);
    return r;
  }

  // f(t) t^{-s} with f an ordinary polynomial: returns (s, coefficients of f from degree 0).
  std::pair<std::int64_t, std::vector<Coeff>> as_shifted_poly() const {
    std::vector<Coeff> coeffs;
    if (terms_.empty()) return {0, coeffs};
    std::int64_t lo = min_degree();
    coeffs.assign(static_cast<std::size_t>(max_degree() - lo + 1), ring_.zero());
    for (const auto& [d, c] : terms_) coeffs[static_cast<std::size_t>(d - lo)] = c;
    return {-lo, coeffs};
  }

  friend Laurent operator+(const Laurent& a, const Laurent& b) {
    Laurent r = a;
    for (const auto& [d, c] : b.terms_) r.add_term(d, c);
    return r;
  }
  friend Laurent operator-(const Laurent& a) {
    Laurent r(a.ring_);
    for (const auto& [d, c] : a.terms_) r.terms_.emplace(d, a.ring_.neg(c));
    return r;
  }
  friend Laurent operator-(const Laurent& a, const Laurent& b) { return a + (-b); }
  friend Laurent operator*(const Laurent& a, const Laurent& b) {
    Laurent r(a.ring_);
    for (const auto& [da, ca] : a.terms_)
      for (const auto& [db, cb] : b.terms_) r.add_term(da + db, a.ring_.mul(ca, cb));
    return r;
  }
  Laurent scaled(const Coeff& c) const {
    Laurent r(ring_);
    for (const auto& [d, v] : terms_) r.add_term(d, ring_.mul(v, c));
    return r;
  }
  friend bool operator==(const Laurent& a, const Laurent& b) { return a.terms_ == b.terms_; }

  std::string render() const {
    std::string s = "[";
    bool first = true;
    for (const auto& [d, c] : terms_) {
      if (!first) s += ", ";
      first = false;
      s += std::to_string(d) + ":" + ring_.render(c);
    }
    return s + "]";
  }

 private:
  Ring ring_{};
  Terms terms_;
};

using ScalarLaurent = Laurent<ScalarRing>;
using RLaurent = Laurent<ComponentRing>;

// Exact division in Z[t, t^-1] or Z_n[t, t^-1] by long division from the top
// (or, failing that, from the bottom). Needs a unit leading coefficient over
// Z_n; over Z every step must divide exactly. Zero divisors can push the
// quotient below the numerator's support, so the step count is capped.
inline std::optional<ScalarLaurent> laurent_divide(const ScalarLaurent& num, const ScalarLaurent& den) {
  const ScalarRing& ring = den.ring();
  if (den.is_zero()) return std::nullopt;
  if (num.is_zero()) return ScalarLaurent(ring);
  const std::int64_t den_span = den.max_degree() - den.min_degree();
  const std::int64_t extra = ring.is_integers() ? 0 : (den_span + 1) * static_cast<std::int64_t>(mpz_sizeinbase(ring.n.get_mpz_t(), 2));
  const std::int64_t max_steps = num.max_degree() - num.min_degree() + 2 + extra;
  auto attempt = [&](bool top) -> std::optional<ScalarLaurent> {
    const std::int64_t dlead = top ? den.max_degree() : den.min_degree();
    const Int lead = den.coefficient(dlead);
    std::optional<Int> inv;
    if (!ring.is_integers()) {
      auto iv = invmod(mod_i64(lead, to_i64(ring.n)), to_i64(ring.n));
      if (!iv) return std::nullopt;
      inv = Int(static_cast<long>(*iv));
    }
    ScalarLaurent rem = num;
    ScalarLaurent quot(ring);
    for (std::int64_t step = 0; step < max_steps && !rem.is_zero(); ++step) {
      const std::int64_t rd = top ? rem.max_degree() : rem.min_degree();
      const Int rc = rem.coefficient(rd);
      Int q;
      if (ring.is_integers()) {
        if (!int_divides(lead, rc)) return std::nullopt;
        q = rc / lead;
      } else {
        q = ring.mul(rc, *inv);
      }
      ScalarLaurent term = ScalarLaurent::monomial(ring, q, rd - dlead);
      quot = quot + term;
      rem = rem - den * term;
    }
    if (!rem.is_zero()) return std::nullopt;
    return quot;
  };
  if (auto q = attempt(true)) return q;
  return attempt(false);
}

// ---------------------------------------------------------------------------
// Dense polynomials over Z_n (coefficients low to high, n small enough for int64).

using DensePoly = std::vector<std::int64_t>;

inline void trim(DensePoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline DensePoly dense_normalize(DensePoly f, std::int64_t n) {
  for (auto& c : f) c = mod_i64(c, n);
  trim(f);
  return f;
}

inline DensePoly dense_add(const DensePoly& a, const DensePoly& b, std::int64_t n) {
  DensePoly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = mod_i64(r[i] + b[i], n);
  return dense_normalize(std::move(r), n);
}

inline DensePoly dense_mul(const DensePoly& a, const DensePoly& b, std::int64_t n) {
  if (a.empty() || b.empty()) return {};
  DensePoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = mod_i64(r[i + j] + mulmod(a[i], b[j], n), n);
  return dense_normalize(std::move(r), n);
}

inline bool is_monic(const DensePoly& h, std::int64_t n) {
  DensePoly t = dense_normalize(h, n);
  return t.size() >= 2 && t.back() == 1;
}

struct ModPoly {
  DensePoly coeffs;   // degree < deg(modulus)
  DensePoly modulus;  // monic h(t)
  std::int64_t n = 2;
};

inline DensePoly dense_rem(DensePoly f, const DensePoly& h, std::int64_t n) {
  f = dense_normalize(std::move(f), n);
  const std::size_t dh = h.size() - 1;
  while (f.size() > dh) {
    std::int64_t c = f.back();
    std::size_t shift = f.size() - 1 - dh;
    for (std::size_t i = 0; i <= dh; ++i) f[shift + i] = mod_i64(f[shift + i] - mulmod(c, h[i], n), n);
    trim(f);
  }
  return f;
}

inline ModPoly poly_reduce(const DensePoly& f, const DensePoly& h, std::int64_t n) {
  DensePoly hn = dense_normalize(h, n);
  if (!is_monic(hn, n)) throw std::invalid_argument("poly_reduce: modulus must be monic of degree >= 1");
  return {dense_rem(f, hn, n), hn, n};
}

inline DensePoly dense_mulmod(const DensePoly& a, const DensePoly& b, const DensePoly& h, std::int64_t n) {
  return dense_rem(dense_mul(a, b, n), h, n);
}

// Least P > 0 with t^P = 1 modulo h(t) over Z_n. h(0) must be a unit.
inline std::int64_t t_period(const DensePoly& h, std::int64_t n) {
  DensePoly hn = dense_normalize(h, n);
  if (!is_monic(hn, n)) throw std::invalid_argument("t_period: modulus must be monic of degree >= 1");
  if (gcd_i64(hn[0], n) != 1) throw std::invalid_argument("t_period: constant term is not a unit");
  const DensePoly one = dense_rem(DensePoly{1}, hn, n);
  const DensePoly t = dense_rem(DensePoly{0, 1}, hn, n);
  DensePoly cur = t;
  // the unit group of Z_n[t]/(h) has fewer than n^deg elements
  std::int64_t bound = 1;
  for (std::size_t i = 0; i + 1 < hn.size(); ++i) bound *= n;
  for (std::int64_t p = 1; p <= bound; ++p) {
    if (cur == one) return p;
    cur = dense_mulmod(cur, t, hn, n);
  }
  throw std::logic_error("t_period: no period found");
}

// Monic degree-d polynomials over Z_n, ordered by the base-n value of the
// lower coefficients (constant term least significant).
inline std::vector<DensePoly> monic_enum(std::int64_t n, std::size_t d) {
  if (n < 2 || d < 1) throw std::invalid_argument("monic_enum: need n >= 2, d >= 1");
  std::int64_t count = 1;
  for (std::size_t i = 0; i < d; ++i) count *= n;
  std::vector<DensePoly> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t code = 0; code < count; ++code) {
    DensePoly h(d + 1, 0);
    std::int64_t c = code;
    for (std::size_t i = 0; i < d; ++i) {
      h[i] = c % n;
      c /= n;
    }
    h[d] = 1;
    out.push_back(std::move(h));
  }
  return out;
}

inline std::string render_dense(const DensePoly& f) {
  if (f.empty()) return "0";
  std::string s;
  for (std::size_t i = f.size(); i-- > 0;) {
    if (f[i] == 0) continue;
    if (!s.empty()) s += "+";
    if (i == 0 || f[i] != 1) s += std::to_string(f[i]);
    if (i >= 1) s += "t";
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s;
}

}  // namespace metadio
