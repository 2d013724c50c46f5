#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "multinorm/base.hpp"

namespace multinorm {

using std::int64_t;
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline int64_t mulmod(int64_t a, int64_t b, int64_t m) {
  return static_cast<int64_t>(static_cast<__int128>(a) * b % m);
}

inline int64_t powmod(int64_t base, int64_t exp, int64_t m) {
  if (m == 1) return 0;
  int64_t r = 1 % m;
  base %= m;
  if (base < 0) base += m;
  while (exp > 0) {
    if (exp & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return r;
}

struct Egcd {
  int64_t g, x, y;  // g = a*x + b*y
};

inline Egcd egcd(int64_t a, int64_t b) {
  if (b == 0) return {a >= 0 ? a : -a, a >= 0 ? 1 : -1, 0};
  int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    int64_t q = a / b;
    int64_t t = a - q * b; a = b; b = t;
    t = x0 - q * x1; x0 = x1; x1 = t;
    t = y0 - q * y1; y0 = y1; y1 = t;
  }
  if (a < 0) { a = -a; x0 = -x0; y0 = -y0; }
  return {a, x0, y0};
}

inline int64_t invmod(int64_t a, int64_t m) {
  auto e = egcd(a % m, m);
  if (e.g != 1) fail(ErrorCode::Internal, "invmod: not a unit");
  int64_t r = e.x % m;
  return r < 0 ? r + m : r;
}

inline int64_t mod_reduce(int64_t a, int64_t m) {
  int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline int64_t mod_reduce(const BigInt& a, int64_t m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return static_cast<int64_t>(r);
}

// Deterministic Miller-Rabin, exact for all 64-bit inputs.
inline bool is_prime64(int64_t n) {
  if (n < 2) return false;
  for (int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  int64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) { d >>= 1; ++s; }
  for (int64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    int64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 0; i < s - 1; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) { composite = false; break; }
    }
    if (composite) return false;
  }
  return true;
}

namespace detail {

inline int64_t pollard_rho(int64_t n) {
  if ((n & 1) == 0) return 2;
  for (int64_t c = 1;; ++c) {
    int64_t x = 2, y = 2, d = 1;
    auto f = [&](int64_t v) { return mod_reduce(mulmod(v, v, n) + c, n); };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      d = std::gcd(std::abs(x - y), n);
    }
    if (d != n) return d;
  }
}

inline void factor_into(int64_t n, std::map<int64_t, int>& out) {
  if (n == 1) return;
  if (is_prime64(n)) { out[n] += 1; return; }
  for (int64_t p : {2, 3, 5, 7, 11, 13}) {
    if (n % p == 0) {
      out[p] += 1;
      factor_into(n / p, out);
      return;
    }
  }
  int64_t d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace detail

// Sorted (prime, exponent) factorization of n >= 1.
inline std::vector<std::pair<int64_t, int>> factorize64(int64_t n) {
  if (n <= 0) fail(ErrorCode::ZeroInput, "factorize64 expects n >= 1");
  std::map<int64_t, int> m;
  detail::factor_into(n, m);
  return {m.begin(), m.end()};
}

inline std::vector<int64_t> divisors(int64_t n) {
  std::vector<int64_t> ds = {1};
  for (auto [p, e] : factorize64(n)) {
    size_t old = ds.size();
    int64_t pk = 1;
    for (int i = 1; i <= e; ++i) {
      pk *= p;
      for (size_t j = 0; j < old; ++j) ds.push_back(ds[j] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

inline int64_t euler_phi(int64_t n) {
  int64_t r = n;
  for (auto [p, e] : factorize64(n)) r -= r / p;
  return r;
}

inline int valuation(int64_t n, int64_t p) {
  if (n == 0) fail(ErrorCode::ZeroInput, "valuation of 0");
  int v = 0;
  while (n % p == 0) { n /= p; ++v; }
  return v;
}

inline int valuation(BigInt n, const BigInt& p) {
  if (n == 0) fail(ErrorCode::ZeroInput, "valuation of 0");
  int v = 0;
  while (n % p == 0) { n /= p; ++v; }
  return v;
}

inline int64_t ipow(int64_t b, int e) {
  int64_t r = 1;
  while (e-- > 0) {
    if (r > (int64_t(1) << 62) / std::max<int64_t>(b, 1))
      fail(ErrorCode::AmbientTooLarge, "integer power overflow");
    r *= b;
  }
  return r;
}

// Kronecker symbol (a|n), n may be negative or even.
inline int kronecker(int64_t a, int64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int sign = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) sign = -sign;
  }
  int v = 0;
  while ((n & 1) == 0) { n >>= 1; ++v; }
  if (v & 1) {
    int64_t am = mod_reduce(a, 8);
    if (am == 0 || am == 2 || am == 4 || am == 6) return 0;
    if (am == 3 || am == 5) sign = -sign;
  }
  a = mod_reduce(a, n);
  while (a != 0) {
    int va = 0;
    while ((a & 1) == 0) { a >>= 1; ++va; }
    if (va & 1) {
      int64_t nm = n % 8;
      if (nm == 3 || nm == 5) sign = -sign;
    }
    if ((a % 4) == 3 && (n % 4) == 3) sign = -sign;
    std::swap(a, n);
    a = mod_reduce(a, n);
  }
  return n == 1 ? sign : 0;
}

// Solve x = r1 mod m1, x = r2 mod m2 for coprime m1, m2; result mod m1*m2.
inline int64_t crt_pair(int64_t r1, int64_t m1, int64_t r2, int64_t m2) {
  auto e = egcd(m1, m2);
  if (e.g != 1) fail(ErrorCode::Internal, "crt_pair: moduli not coprime");
  int64_t m = m1 * m2;
  // x = r1 + m1 * ((r2 - r1) * inv(m1, m2) mod m2)
  int64_t diff = mod_reduce(r2 - r1, m2);
  int64_t k = mulmod(diff, mod_reduce(e.x, m2), m2);
  return mod_reduce(r1 + m1 * k, m);
}

inline int64_t multiplicative_order(int64_t a, int64_t n) {
  a = mod_reduce(a, n);
  if (std::gcd(a, n) != 1) fail(ErrorCode::Internal, "order: not a unit");
  int64_t ord = euler_phi(n);
  for (auto [p, e] : factorize64(ord)) {
    for (int i = 0; i < e; ++i) {
      if (powmod(a, ord / p, n) == 1) ord /= p;
      else break;
    }
  }
  return ord;
}

inline int64_t primitive_root_mod_prime(int64_t p) {
  if (p == 2) return 1;
  int64_t ord = p - 1;
  auto fs = factorize64(ord);
  for (int64_t g = 2;; ++g) {
    bool ok = true;
    for (auto [q, e] : fs) {
      if (powmod(g, ord / q, p) == 1) { ok = false; break; }
    }
    if (ok) return g;
  }
}

// Generators of the unit group (Z/q^bZ)^x for a prime power q^b.
inline std::vector<int64_t> unit_group_generators_prime_power(int64_t q, int b) {
  int64_t m = ipow(q, b);
  if (q == 2) {
    if (b == 1) return {};
    if (b == 2) return {3};
    return {m - 1, 3};
  }
  int64_t g = primitive_root_mod_prime(q);
  if (b == 1) return {g};
  // Lift to a generator mod q^b: g works unless g^(q-1) = 1 mod q^2.
  if (powmod(g, q - 1, q * q) == 1) g += q;
  return {mod_reduce(g, m)};
}

// Generators of {x in (Z/q^bZ)^x : x = 1 mod q^a}, 0 <= a <= b.
inline std::vector<int64_t> congruence_one_subgroup_generators(int64_t q, int b,
                                                               int a) {
  if (a <= 0) return unit_group_generators_prime_power(q, b);
  if (a >= b) return {};
  int64_t m = ipow(q, b);
  if (q == 2) {
    if (a == 1) return unit_group_generators_prime_power(q, b);
    return {mod_reduce(1 + ipow(2, a), m)};
  }
  return {mod_reduce(1 + ipow(q, a), m)};
}

// Generators of (Z/MZ)^x via CRT across prime powers.
inline std::vector<int64_t> unit_group_generators(int64_t M) {
  if (M <= 0) fail(ErrorCode::ZeroInput, "unit_group_generators");
  if (M <= 2) return {};
  std::vector<int64_t> gens;
  for (auto [q, b] : factorize64(M)) {
    int64_t qb = ipow(q, b);
    int64_t rest = M / qb;
    for (int64_t g : unit_group_generators_prime_power(q, b)) {
      gens.push_back(rest == 1 ? g : crt_pair(g, qb, 1, rest));
    }
  }
  return gens;
}

// Generators of ker((Z/MZ)^x -> (Z/NZ)^x) for N | M: units = 1 mod N.
inline std::vector<int64_t> reduction_kernel_generators(int64_t M, int64_t N) {
  if (N <= 0 || M % N != 0) fail(ErrorCode::Internal, "kernel: need N | M");
  std::vector<int64_t> gens;
  for (auto [q, b] : factorize64(M)) {
    int64_t qb = ipow(q, b);
    int64_t rest = M / qb;
    int a = valuation(std::gcd(N, qb), q);
    for (int64_t g : congruence_one_subgroup_generators(q, b, a)) {
      gens.push_back(rest == 1 ? g : crt_pair(g, qb, 1, rest));
    }
  }
  return gens;
}

inline std::vector<int64_t> primes_up_to(int64_t n) {
  std::vector<bool> sieve(std::max<int64_t>(n + 1, 2), true);
  sieve[0] = sieve[1] = false;
  for (int64_t i = 2; i * i <= n; ++i) {
    if (sieve[i])
      for (int64_t j = i * i; j <= n; j += i) sieve[j] = false;
  }
  std::vector<int64_t> out;
  for (int64_t i = 2; i <= n; ++i)
    if (sieve[i]) out.push_back(i);
  return out;
}

// First n primes not dividing `avoid`.
inline std::vector<int64_t> primes_avoiding(int count, int64_t avoid) {
  std::vector<int64_t> out;
  for (int64_t p = 2; static_cast<int>(out.size()) < count; ++p) {
    if (!is_prime64(p)) continue;
    if (avoid % p == 0) continue;
    out.push_back(p);
  }
  return out;
}

inline BigInt rational_height(const Rational& c) {
  BigInt n = boost::multiprecision::numerator(c);
  BigInt d = boost::multiprecision::denominator(c);
  if (n < 0) n = -n;
  return n > d ? n : d;
}

struct RationalFactorization {
  int sign = 1;                          // +1 or -1
  std::vector<std::pair<int64_t, int>> factors;  // prime -> exponent (can be < 0)
};

inline int moebius(int64_t n) {
  if (n <= 0) fail(ErrorCode::ZeroInput, "moebius needs n >= 1");
  int mu = 1;
  for (auto [p, e] : factorize64(n)) {
    (void)p;
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

// Exact value of the f-th cyclotomic polynomial at x: the norm of x - zeta_f
// from Q(zeta_f), hence a norm from every subfield of Q(zeta_f).
inline Rational cyclotomic_value(int64_t f, const Rational& x) {
  if (f <= 0) fail(ErrorCode::ZeroInput, "cyclotomic_value needs f >= 1");
  Rational num = 1, den = 1;
  for (int64_t d = 1; d <= f; ++d) {
    if (f % d != 0) continue;
    int mu = moebius(f / d);
    if (mu == 0) continue;
    Rational pw = 1;
    for (int64_t k = 0; k < d; ++k) pw *= x;
    (mu > 0 ? num : den) *= pw - 1;
  }
  if (den == 0) fail(ErrorCode::ZeroInput, "cyclotomic_value: pole at root of unity");
  return num / den;
}

inline RationalFactorization factor_rational(const Rational& c) {
  if (c == 0) fail(ErrorCode::ZeroInput, "cannot factor 0");
  BigInt n = boost::multiprecision::numerator(c);
  BigInt d = boost::multiprecision::denominator(c);
  RationalFactorization out;
  if (n < 0) { out.sign = -1; n = -n; }
  BigInt lim = (BigInt(1) << 62);
  if (n > lim || d > lim)
    fail(ErrorCode::ModulusTooLarge, "rational too large to factor");
  std::map<int64_t, int> acc;
  for (auto [p, e] : factorize64(static_cast<int64_t>(n))) acc[p] += e;
  for (auto [p, e] : factorize64(static_cast<int64_t>(d))) acc[p] -= e;
  for (auto [p, e] : acc)
    if (e != 0) out.factors.emplace_back(p, e);
  return out;
}

}  // namespace multinorm
