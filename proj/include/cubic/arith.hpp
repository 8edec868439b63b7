#pragma once
/**
 * @file arith.hpp
 * @brief Exact integer helpers: 128-bit widening, factorization, primes,
 * Kronecker symbols and fundamental discriminants.
 */

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cubic {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

/// Thrown when an input would exceed the overflow-safe working range.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an internal consistency check fails (a bug, not bad input).
class IntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline std::string to_string(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  u128 u = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

inline i128 abs128(i128 v) { return v < 0 ? -v : v; }

inline i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }

inline i128 gcd128(i128 a, i128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// Floor square root of a nonnegative 64-bit value.
inline u64 isqrt(u64 n) {
  if (n < 2) return n;
  u64 r = static_cast<u64>(__builtin_sqrtl(static_cast<long double>(n)));
  while (static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline bool is_square(u64 n) {
  u64 r = isqrt(n);
  return r * r == n;
}

/// Integer cube-root floor for nonnegative n.
inline u64 icbrt(u64 n) {
  u64 r = static_cast<u64>(__builtin_cbrtl(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 powmod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e > 0) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace detail {

inline u64 pollard_rho(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1;; ++c) {
    u64 x = 2, y = 2, d = 1;
    auto step = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
    while (d == 1) {
      x = step(x);
      y = step(step(y));
      d = std::gcd(x > y ? x - y : y - x, n);
    }
    if (d != n) return d;
  }
}

inline void factor_rec(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_rho(n);
  factor_rec(d, out);
  factor_rec(n / d, out);
}

}  // namespace detail

using Factorization = std::vector<std::pair<u64, int>>;

/// Full factorization: trial division to 10^6, Pollard rho beyond.
inline Factorization factorize(u64 n) {
  Factorization f;
  if (n <= 1) return f;
  auto take = [&](u64 p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) f.emplace_back(p, e);
  };
  take(2);
  take(3);
  for (u64 p = 5; p <= 1000000 && p * p <= n; p += 6) {
    take(p);
    take(p + 2);
  }
  if (n > 1) {
    std::vector<u64> big;
    detail::factor_rec(n, big);
    std::sort(big.begin(), big.end());
    for (u64 p : big) {
      if (!f.empty() && f.back().first == p) {
        ++f.back().second;
      } else {
        f.emplace_back(p, 1);
      }
    }
  }
  return f;
}

inline int valuation(i128 n, u64 p) {
  if (n == 0) return 1 << 20;
  int v = 0;
  n = abs128(n);
  while (n % static_cast<i128>(p) == 0) {
    n /= static_cast<i128>(p);
    ++v;
  }
  return v;
}

/// Product of the distinct primes dividing |n|; radical(0) is undefined.
inline u64 radical(i64 n) {
  if (n == 0) throw std::invalid_argument("radical of zero");
  u64 r = 1;
  for (auto [p, e] : factorize(static_cast<u64>(std::llabs(n)))) r *= p;
  return r;
}

/// Primes up to n inclusive (Eratosthenes).
inline std::vector<u64> primes_up_to(u64 n) {
  std::vector<u64> out;
  if (n < 2) return out;
  std::vector<bool> comp(n + 1, false);
  for (u64 i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= n; j += i) comp[j] = true;
  }
  return out;
}

/// Kronecker symbol (m/n) with the standard sign and 2-adic conventions.
inline int kronecker(i64 m, i64 n) {
  if (m == 0 && n == 0) throw std::invalid_argument("kronecker(0,0) is undefined");
  if (n == 0) return (m == 1 || m == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (m < 0) result = -result;
  }
  int v = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++v;
  }
  if (v > 0) {
    if ((m & 1) == 0) return 0;
    int r8 = static_cast<int>(((m % 8) + 8) % 8);
    if ((v & 1) && (r8 == 3 || r8 == 5)) result = -result;
  }
  // n is now odd and positive: Jacobi symbol.
  i64 a = m % n;
  if (a < 0) a += n;
  i64 b = n;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      i64 r = b % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, b);
    if (a % 4 == 3 && b % 4 == 3) result = -result;
    a %= b;
  }
  return b == 1 ? result : 0;
}

/// Signed squarefree kernel: n = s * m^2 with s squarefree (sign kept on s).
inline std::pair<i64, u64> squarefree_decompose(i64 n) {
  if (n == 0) throw std::invalid_argument("squarefree part of zero");
  i64 s = n < 0 ? -1 : 1;
  u64 m = 1;
  for (auto [p, e] : factorize(static_cast<u64>(std::llabs(n)))) {
    if (e & 1) s *= static_cast<i64>(p);
    for (int i = 0; i < e / 2; ++i) m *= p;
  }
  return {s, m};
}

/// True for 1 and for discriminants of quadratic fields.
inline bool is_fundamental_discriminant(i64 d) {
  if (d == 1) return true;
  if (d == 0) return false;
  i64 r = ((d % 16) + 16) % 16;
  if (r % 4 == 1) {
    auto [s, m] = squarefree_decompose(d);
    return m == 1;
  }
  if (r == 8 || r == 12) {
    i64 q = d / 4;
    i64 q4 = ((q % 4) + 4) % 4;
    if (q4 != 2 && q4 != 3) return false;
    auto [s, m] = squarefree_decompose(q);
    return m == 1;
  }
  return false;
}

/// All fundamental discriminants d with 0 < |d| <= bound, sorted by |d| then sign.
inline std::vector<i64> fundamental_discriminants(i64 bound, bool include_one = true) {
  std::vector<i64> out;
  for (i64 a = 1; a <= bound; ++a) {
    for (i64 d : {-a, a}) {
      if (d == 1 && !include_one) continue;
      if (d == -1) continue;
      if (is_fundamental_discriminant(d)) out.push_back(d);
    }
  }
  return out;
}

/// Number of distinct prime factors.
inline int omega(u64 n) { return static_cast<int>(factorize(n).size()); }

}  // namespace cubic
