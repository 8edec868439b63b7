#pragma once
/**
 * @file index.hpp
 * @brief Cubic rings from forms and the p-adic integral of i(x)^e over
 * primitive elements, where i(x) is the index of Z_p[x] in the ring.
 *
 * For x = u + v w1 + w w2 in the ring of F, disc(charpoly x) = F(v, w)^2 disc(F),
 * so i(x) = |F(v, w)|_p^{-1}. Homogeneity reduces the integral over primitive
 * (v, w) to two affine charts:
 *   J = (1 - 1/p) [ int_{Z_p} |F(t, 1)|^{-e} dt + int_{pZ_p} |F(1, s)|^{-e} ds ].
 */

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cubic/arith.hpp"
#include "cubic/forms.hpp"

namespace cubic {

/// The cubic ring of a form on the basis (1, w1, w2), Delone-Faddeev table.
class RingModel {
 public:
  using Elt = std::array<i128, 3>;

  RingModel(const BinaryCubicForm& f, u64 p) : f_(f), p_(p) {
    if (!is_prime(p)) throw std::invalid_argument("RingModel: p must be prime");
  }

  const BinaryCubicForm& form() const { return f_; }
  u64 p() const { return p_; }

  /// w1 w2 = -ad, w1^2 = -ac + b w1 - a w2, w2^2 = -bd + d w1 - c w2.
  Elt mul(const Elt& x, const Elt& y) const {
    const i128 a = f_.a, b = f_.b, c = f_.c, d = f_.d;
    Elt r{x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[0] * y[2] + x[2] * y[0]};
    i128 w11 = x[1] * y[1], w22 = x[2] * y[2], w12 = x[1] * y[2] + x[2] * y[1];
    r[0] += -a * c * w11 - b * d * w22 - a * d * w12;
    r[1] += b * w11 + d * w22;
    r[2] += -a * w11 - c * w22;
    return r;
  }

  /// Coefficients (c2, c1, c0) of the characteristic polynomial T^3 + c2 T^2 + c1 T + c0.
  std::array<i128, 3> charpoly(const Elt& x) const {
    std::array<Elt, 3> cols;
    const std::array<Elt, 3> basis{Elt{1, 0, 0}, Elt{0, 1, 0}, Elt{0, 0, 1}};
    for (int j = 0; j < 3; ++j) cols[j] = mul(x, basis[j]);
    auto M = [&](int i, int j) { return cols[j][i]; };
    i128 tr = M(0, 0) + M(1, 1) + M(2, 2);
    i128 s2 = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0) + M(0, 0) * M(2, 2) - M(0, 2) * M(2, 0) +
              M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1);
    i128 det = M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
               M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
               M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
    return {-tr, s2, -det};
  }

  i128 charpoly_disc(const Elt& x) const {
    auto [b, c, d] = charpoly(x);
    return disc_form({1, static_cast<i64>(b), static_cast<i64>(c), static_cast<i64>(d)});
  }

  /// v_p(disc(charpoly x)) - v_p(disc F); equals 2 v_p(i(x)) for x outside Z_p.
  int index_valuation_gap(const Elt& x) const {
    return valuation(charpoly_disc(x), p_) - valuation(disc_form(f_), p_);
  }

 private:
  BinaryCubicForm f_;
  u64 p_;
};

struct IndexIntegral {
  long double value;  // tail-corrected estimate
  long double lower;  // capped sum
  long double upper;  // capped sum with geometric tails on capped classes
  int depth;
};

namespace detail {

using Poly3 = std::array<i128, 4>;  // c0 + c1 t + c2 t^2 + c3 t^3

inline i64 eval_mod(const Poly3& h, u64 t, u64 m) {
  u64 acc = 0;
  for (int k = 3; k >= 0; --k) {
    i128 ck = h[k] % static_cast<i128>(m);
    if (ck < 0) ck += m;
    acc = static_cast<u64>((mulmod(acc, t, m) + static_cast<u64>(ck)) % m);
  }
  return static_cast<i64>(acc);
}

inline int val_capped(u64 x, u64 p, int cap) {
  if (x == 0) return cap;
  int v = 0;
  while (x % p == 0 && v < cap) {
    x /= p;
    ++v;
  }
  return v;
}

/// Integral of |h|^{-e} over a + p^j Z_p style disc, recursing at multiple roots.
/// `scale` is the Haar measure of the disc, `shift` the p-adic valuation already removed.
inline long double chart_exact(Poly3 h, u64 p, long double e, long double scale, int shift, int depth) {
  if (depth > 200) throw IntegrityError("index integral: recursion did not terminate (form not maximal?)");
  // Remove content.
  i128 g = 0;
  for (i128 c : h) g = gcd128(g, c);
  if (g == 0) throw IntegrityError("index integral: vanishing polynomial");
  while (g % static_cast<i128>(p) == 0) {
    for (auto& c : h) c /= static_cast<i128>(p);
    g /= static_cast<i128>(p);
    ++shift;
  }
  const long double pe = std::pow(static_cast<long double>(p), e);
  const long double base = std::pow(pe, static_cast<long double>(shift));
  // Simple-root disc of measure 1/p (relative): sum_{k>=1} (1-1/p) p^{-(k-1)} p^{ek}.
  const long double simple = (1 - 1.0L / p) * pe / (1 - pe / p);
  long double total = 0;
  for (u64 r = 0; r < p; ++r) {
    i128 hr = ((h[3] * r + h[2]) * r + h[1]) * r + h[0];
    if (hr % static_cast<i128>(p) != 0) {
      total += scale / p * base;
      continue;
    }
    i128 dh = (3 * h[3] * r + 2 * h[2]) * r + h[1];
    if (dh % static_cast<i128>(p) != 0) {
      total += scale / p * base * simple;
      continue;
    }
    // Multiple root mod p: substitute t = r + p t'.
    Poly3 n{};
    const i128 P = p;
    // Taylor coefficients h^{(k)}(r)/k! times p^k
    i128 h0 = hr;
    i128 h1 = dh;
    i128 h2 = 3 * h[3] * r + h[2];
    i128 h3 = h[3];
    n[0] = h0;
    n[1] = h1 * P;
    n[2] = h2 * P * P;
    n[3] = h3 * P * P * P;
    total += chart_exact(n, p, e, scale / p, shift, depth + 1);
  }
  return total;
}

}  // namespace detail

/**
 * Exact value of J_e(F, p) = int over primitive (v, w) of |F(v, w)|_p^{-e}
 * (up to floating-point summation). Requires F primitive and p-maximal so
 * that recursion at multiple roots terminates.
 */
inline long double index_integral_exact(const BinaryCubicForm& f, u64 p, long double e = 2.0L / 3) {
  const long double q = static_cast<long double>(p);
  // chart 1: t in Z_p, F(t, 1) = a t^3 + b t^2 + c t + d
  detail::Poly3 h1{f.d, f.c, f.b, f.a};
  // chart 2: s in pZ_p, F(1, p s') = a + b p s' + c p^2 s'^2 + d p^3 s'^3
  const i128 P = p;
  detail::Poly3 h2{f.a, f.b * P, f.c * P * P, f.d * P * P * P};
  long double j1 = detail::chart_exact(h1, p, e, 1.0L, 0, 0);
  long double j2 = detail::chart_exact(h2, p, e, 1.0L / q, 0, 0);
  return (1 - 1 / q) * (j1 + j2);
}

/**
 * Exhaustive estimator: residues t mod p^k in both charts, index capped at
 * p^k. Capped classes get the bracket [p^{ek}, p^{ek}(1-1/p)/(1-p^{e-1})] per
 * unit measure, the upper end being exact for neighbourhoods of simple roots.
 * Depth doubles from k0 until successive tail-corrected values differ by less
 * than tol; throws if kmax is reached first.
 */
inline IndexIntegral local_index_integral(const RingModel& model, long double e, long double tol,
                                          int k0 = 1, int kmax = 0) {
  const u64 p = model.p();
  const BinaryCubicForm& f = model.form();
  const long double q = static_cast<long double>(p);
  if (kmax == 0) {
    // keep p^k within ~2^23 residues
    kmax = 1;
    u64 pk = p;
    while (pk * p <= (1ULL << 23)) {
      pk *= p;
      ++kmax;
    }
  }
  auto run = [&](int k) {
    u64 m = 1;
    for (int i = 0; i < k; ++i) m *= p;
    const long double mu = 1.0L / static_cast<long double>(m);
    const long double pe = std::pow(q, e);
    const long double capv = std::pow(pe, static_cast<long double>(k));
    const long double tail = (1 - 1 / q) / (1 - pe / q);
    long double lo = 0, hi = 0;
    detail::Poly3 h1{f.d, f.c, f.b, f.a};
    detail::Poly3 h2{f.a, f.b, f.c, f.d};  // F(1, s) = a + b s + c s^2 + d s^3
    for (u64 t = 0; t < m; ++t) {
      int v = detail::val_capped(static_cast<u64>(detail::eval_mod(h1, t, m)), p, k);
      if (v >= k) {
        lo += mu * capv;
        hi += mu * capv * tail;
      } else {
        long double w = mu * std::pow(pe, static_cast<long double>(v));
        lo += w;
        hi += w;
      }
    }
    for (u64 s = 0; s < m; s += p) {  // s in pZ_p
      int v = detail::val_capped(static_cast<u64>(detail::eval_mod(h2, s, m)), p, k);
      if (v >= k) {
        lo += mu * capv;
        hi += mu * capv * tail;
      } else {
        long double w = mu * std::pow(pe, static_cast<long double>(v));
        lo += w;
        hi += w;
      }
    }
    return IndexIntegral{(1 - 1 / q) * hi, (1 - 1 / q) * lo, (1 - 1 / q) * hi, k};
  };
  IndexIntegral prev = run(k0);
  for (int k = 2 * k0; k <= kmax; k *= 2) {
    IndexIntegral cur = run(k);
    if (std::fabs(cur.value - prev.value) < tol) return cur;
    prev = cur;
  }
  if (prev.depth < kmax) {
    IndexIntegral cur = run(kmax);
    if (std::fabs(cur.value - prev.value) < tol) return cur;
    throw std::runtime_error("index integral did not converge by depth " + std::to_string(kmax) +
                             ": last values " + std::to_string(static_cast<double>(prev.value)) + ", " +
                             std::to_string(static_cast<double>(cur.value)));
  }
  throw std::runtime_error("index integral did not converge by depth " + std::to_string(kmax));
}

/// Closed form of J_e for p-maximal algebras at p > 3, by splitting type.
inline long double index_integral_tame(SplittingType t, u64 p, long double e = 2.0L / 3) {
  const long double q = static_cast<long double>(p);
  const long double pe = std::pow(q, e);
  const long double simple = (1 - 1 / q) * pe / (1 - pe / q);
  long double sum = 0;
  switch (t) {
    case SplittingType::S111: sum = (q - 2) + 3 * simple; break;
    case SplittingType::S12: sum = q + simple; break;
    case SplittingType::S3: sum = q + 1; break;
    case SplittingType::S121: sum = (q - 1) + simple + pe; break;
    case SplittingType::S13: sum = q + pe; break;
  }
  return (1 - 1 / (q * q)) / (q + 1) * sum;
}

}  // namespace cubic
