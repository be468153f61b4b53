#pragma once

// Exact arithmetic and elementary number theory over arbitrary-precision
// integers and rationals. Integers are GMP mpz, rationals GMP mpq; every
// rational returned by this library is canonical (positive denominator,
// gcd(num, den) = 1).

#include <gmpxx.h>

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latvol {

using Int = mpz_class;
using Rat = mpq_class;

// Thrown when an enumeration would exceed the configured work budget.
// required() reports the smallest budget that would admit the request.
class resource_limit_error : public std::runtime_error {
 public:
  resource_limit_error(const std::string& what, Int required)
      : std::runtime_error(what), required_(std::move(required)) {}
  const Int& required() const { return required_; }

 private:
  Int required_;
};

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// p^e for possibly negative e.
inline Rat pow_rat(const Int& p, long e) {
  if (p == 0) throw std::invalid_argument("pow_rat: zero base");
  Int abs = pow_int(p, static_cast<unsigned long>(e < 0 ? -e : e));
  Rat r = (e < 0) ? Rat(1, abs) : Rat(abs);
  r.canonicalize();
  return r;
}

inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw std::invalid_argument("make_rat: zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Trial division primality test; intended for desk-scale inputs.
inline bool is_prime(const Int& n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (Int d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

// (a/p) for odd prime p, computed by Euler's criterion with fast modular
// exponentiation. Returns 0 when p | a.
inline int legendre_symbol(const Int& a, const Int& p) {
  if (p == 2 || !is_prime(p))
    throw std::invalid_argument("legendre_symbol: p must be an odd prime");
  Int am = a % p;
  if (am < 0) am += p;
  if (am == 0) return 0;
  Int e = (p - 1) / 2;
  Int r;
  mpz_powm(r.get_mpz_t(), am.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
  if (r == 1) return 1;
  if (r == p - 1) return -1;
  throw std::logic_error("legendre_symbol: Euler's criterion failed");
}

inline long valuation(const Int& n, const Int& p) {
  if (n == 0) throw std::invalid_argument("valuation: zero argument");
  if (p < 2) throw std::invalid_argument("valuation: p must be >= 2");
  long v = 0;
  Int m = n;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

inline Int unit_part(const Int& n, const Int& p) {
  if (n == 0) throw std::invalid_argument("unit_part: zero argument");
  Int m = n;
  while (m % p == 0) m /= p;
  return m;
}

// p-adic valuation of a nonzero rational; may be negative.
inline long valuation(const Rat& q, const Int& p) {
  if (q == 0) throw std::invalid_argument("valuation: zero argument");
  return valuation(Int(q.get_num()), p) - valuation(Int(q.get_den()), p);
}

inline Rat unit_part(const Rat& q, const Int& p) {
  if (q == 0) throw std::invalid_argument("unit_part: zero argument");
  Rat r = make_rat(unit_part(Int(q.get_num()), p), unit_part(Int(q.get_den()), p));
  return r;
}

// Reduces a rational whose denominator is coprime to m into Z/m.
inline Int mod_reduce(const Rat& q, const Int& m) {
  if (m < 2) throw std::invalid_argument("mod_reduce: modulus must be >= 2");
  Int num = q.get_num() % m;
  if (num < 0) num += m;
  Int den = q.get_den() % m;
  Int inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::invalid_argument("mod_reduce: denominator not invertible");
  return (num * inv) % m;
}

namespace detail {
// (u-1)/2 mod 2 for a 2-adic unit u given mod 8.
inline int eps2(const Int& u_mod8) { return (u_mod8 == 3 || u_mod8 == 7) ? 1 : 0; }
// (u^2-1)/8 mod 2 for a 2-adic unit u given mod 8.
inline int omega2(const Int& u_mod8) { return (u_mod8 == 3 || u_mod8 == 5) ? 1 : 0; }
}  // namespace detail

// Hilbert symbol (a, b)_p over Q_p for nonzero rational a, b and prime p.
// Splitting a = p^alpha * u, b = p^beta * v with u, v units:
//   p odd: (-1)^(alpha*beta*(p-1)/2) * (u/p)^beta * (v/p)^alpha
//   p = 2: (-1)^(eps(u)eps(v) + alpha*omega(v) + beta*omega(u))
inline int hilbert_symbol(const Rat& a, const Rat& b, const Int& p) {
  if (a == 0 || b == 0)
    throw std::invalid_argument("hilbert_symbol: zero argument");
  if (!is_prime(p)) throw std::invalid_argument("hilbert_symbol: p not prime");
  long alpha = valuation(a, p), beta = valuation(b, p);
  Rat u = unit_part(a, p), v = unit_part(b, p);
  if (p == 2) {
    Int u8 = mod_reduce(u, 8), v8 = mod_reduce(v, 8);
    long e = detail::eps2(u8) * detail::eps2(v8) + alpha * detail::omega2(v8) +
             beta * detail::omega2(u8);
    return (e % 2 == 0) ? 1 : -1;
  }
  int lu = legendre_symbol(mod_reduce(u, p), p);
  int lv = legendre_symbol(mod_reduce(v, p), p);
  long epsp = ((p - 1) / 2) % 2 == 0 ? 0 : 1;
  int sign = ((alpha % 2) * (beta % 2) * epsp) % 2 == 0 ? 1 : -1;
  if (beta % 2 != 0) sign *= lu;
  if (alpha % 2 != 0) sign *= lv;
  return sign;
}

// Hilbert symbol at the real place: -1 iff both arguments are negative.
inline int hilbert_symbol_real(const Rat& a, const Rat& b) {
  if (a == 0 || b == 0)
    throw std::invalid_argument("hilbert_symbol_real: zero argument");
  return (a < 0 && b < 0) ? -1 : 1;
}

// Signed prime factorization, primes ascending.
struct Factorization {
  int sign = 1;
  std::vector<std::pair<Int, unsigned>> primes;

  int omega() const { return static_cast<int>(primes.size()); }

  bool square_free() const {
    for (const auto& [p, e] : primes)
      if (e > 1) return false;
    return true;
  }

  Int value() const {
    Int v = sign;
    for (const auto& [p, e] : primes) v *= pow_int(p, e);
    return v;
  }
};

// Trial-division factorization of a nonzero integer.
inline Factorization factorize(const Int& n) {
  if (n == 0) throw std::invalid_argument("factorize: zero argument");
  Factorization f;
  Int m = n;
  if (m < 0) {
    f.sign = -1;
    m = -m;
  }
  auto strip = [&](const Int& p) {
    unsigned e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e > 0) f.primes.emplace_back(p, e);
  };
  strip(2);
  for (Int d = 3; d * d <= m; d += 2) strip(d);
  if (m > 1) f.primes.emplace_back(m, 1);
  return f;
}

inline std::vector<Int> primes_dividing(const Int& n) {
  std::vector<Int> ps;
  for (const auto& [p, e] : factorize(n).primes) ps.push_back(p);
  return ps;
}

}  // namespace latvol
