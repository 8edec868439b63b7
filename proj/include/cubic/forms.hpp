#pragma once
/**
 * @file forms.hpp
 * @brief Integral binary cubic forms: discriminant, GL2(Z) action, reduction,
 * irreducibility, p-maximality and splitting types.
 *
 * Forms are written a x^3 + b x^2 y + c x y^2 + d y^3. The GL2(Z) action is the
 * twisted one, (g.F)(x, y) = F((x, y) g) / det(g), under which the ring attached
 * to a form is preserved and -I sends F to -F.
 */

#include <array>
#include <cmath>
#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubic/arith.hpp"

namespace cubic {

struct BinaryCubicForm {
  i64 a = 0;
  i64 b = 0;
  i64 c = 0;
  i64 d = 0;

  auto operator<=>(const BinaryCubicForm&) const = default;

  /// Value at an integer point, exact.
  i128 operator()(i128 x, i128 y) const {
    return ((a * x + b * y) * x + c * y * y) * x + static_cast<i128>(d) * y * y * y;
  }
};

inline std::ostream& operator<<(std::ostream& os, const BinaryCubicForm& f) {
  return os << '(' << f.a << ',' << f.b << ',' << f.c << ',' << f.d << ')';
}

/// Classical discriminant 18abcd - 4ac^3 + b^2c^2 - 4b^3d - 27a^2d^2.
inline i128 disc_form(const BinaryCubicForm& f) {
  const i128 a = f.a, b = f.b, c = f.c, d = f.d;
  return 18 * a * b * c * d - 4 * a * c * c * c + b * b * c * c - 4 * b * b * b * d -
         27 * a * a * d * d;
}

inline i64 content(const BinaryCubicForm& f) {
  return gcd(gcd(f.a, f.b), gcd(f.c, f.d));
}

/// Row-vector convention: (x, y) -> (x, y) * M = (m00 x + m10 y, m01 x + m11 y).
struct Mat2 {
  i64 m00, m01, m10, m11;
  i64 det() const { return m00 * m11 - m01 * m10; }
};

/// Twisted GL2(Z) action.
inline BinaryCubicForm act(const Mat2& g, const BinaryCubicForm& f) {
  // Substitute X = m00 x + m10 y, Y = m01 x + m11 y and expand.
  using Poly = std::array<i128, 4>;  // coefficients of x^3, x^2 y, x y^2, y^3
  auto lin_mul = [](const std::array<i128, 3>& q, i128 px, i128 py) {
    Poly r{0, 0, 0, 0};
    for (int i = 0; i < 3; ++i) {
      r[i] += q[i] * px;
      r[i + 1] += q[i] * py;
    }
    return r;
  };
  const i128 xx = g.m00, xy = g.m10, yx = g.m01, yy = g.m11;
  std::array<i128, 3> X2{xx * xx, 2 * xx * xy, xy * xy};
  std::array<i128, 3> XY{xx * yx, xx * yy + xy * yx, xy * yy};
  std::array<i128, 3> Y2{yx * yx, 2 * yx * yy, yy * yy};
  Poly X3 = lin_mul(X2, xx, xy);
  Poly X2Y = lin_mul(X2, yx, yy);
  Poly XY2 = lin_mul(XY, yx, yy);
  Poly Y3 = lin_mul(Y2, yx, yy);
  i128 det = g.det();
  if (det != 1 && det != -1) throw std::invalid_argument("matrix not in GL2(Z)");
  std::array<i64, 4> out{};
  for (int i = 0; i < 4; ++i) {
    i128 v = f.a * X3[i] + f.b * X2Y[i] + f.c * XY2[i] + f.d * Y3[i];
    out[i] = static_cast<i64>(v * det);
  }
  return {out[0], out[1], out[2], out[3]};
}

struct Hessian {
  i128 P, Q, R;
};

inline Hessian hessian(const BinaryCubicForm& f) {
  const i128 a = f.a, b = f.b, c = f.c, d = f.d;
  return {b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d};
}

enum class Reduction { NotReduced, Interior, Boundary };

/**
 * Reduction domain test for irreducible forms with nonzero discriminant.
 *
 * Positive discriminant: the Hessian is positive definite and the form is
 * reduced when a > 0 and 0 <= Q <= P <= R.
 *
 * Negative discriminant: with real root t and complex root u + iv of F(x, 1),
 * reduced means a > 0, 0 <= u <= 1/2 and u^2 + v^2 >= 1, which in integers is
 *   0 <= ad - bc <= (a + b)^2 + ac   and   d^2 - a^2 + ac - bd >= 0.
 */
inline Reduction reduction_status(const BinaryCubicForm& f, i128 disc) {
  if (f.a <= 0) return Reduction::NotReduced;
  const i128 a = f.a, b = f.b, c = f.c, d = f.d;
  if (disc > 0) {
    auto [P, Q, R] = hessian(f);
    if (Q < 0 || Q > P || P > R) return Reduction::NotReduced;
    return (Q == 0 || Q == P || P == R) ? Reduction::Boundary : Reduction::Interior;
  }
  i128 s = a * d - b * c;
  i128 upper = (a + b) * (a + b) + a * c;
  i128 n = d * d - a * a + a * c - b * d;
  if (s < 0 || s > upper || n < 0) return Reduction::NotReduced;
  return (s == 0 || s == upper || n == 0) ? Reduction::Boundary : Reduction::Interior;
}

namespace detail {

inline const std::vector<Mat2>& small_gl2() {
  static const std::vector<Mat2> mats = [] {
    std::vector<Mat2> m;
    for (i64 p = -1; p <= 1; ++p)
      for (i64 q = -1; q <= 1; ++q)
        for (i64 r = -1; r <= 1; ++r)
          for (i64 s = -1; s <= 1; ++s) {
            Mat2 g{p, q, r, s};
            i64 dt = g.det();
            if (dt == 1 || dt == -1) m.push_back(g);
          }
    return m;
  }();
  return mats;
}

inline BinaryCubicForm normalize_sign(BinaryCubicForm f) {
  if (f.a < 0 || (f.a == 0 && (f.b < 0 || (f.b == 0 && (f.c < 0 || (f.c == 0 && f.d < 0)))))) {
    f = {-f.a, -f.b, -f.c, -f.d};
  }
  return f;
}

}  // namespace detail

/**
 * Canonical representative of a reduced form. Interior forms are their own
 * representative; forms on the boundary of the domain are compared with every
 * reduced image under GL2(Z) matrices with entries in {-1, 0, 1} (these generate
 * all identifications along the boundary) and the lexicographically least wins.
 */
inline BinaryCubicForm canonical_reduced(const BinaryCubicForm& f, i128 disc) {
  Reduction st = reduction_status(f, disc);
  if (st == Reduction::NotReduced) throw std::invalid_argument("form is not reduced");
  if (st == Reduction::Interior) return f;
  BinaryCubicForm best = f;
  for (const Mat2& g : detail::small_gl2()) {
    BinaryCubicForm h = detail::normalize_sign(act(g, f));
    if (reduction_status(h, disc) != Reduction::NotReduced && h < best) best = h;
  }
  return best;
}

/// Number of GL2(Z) elements fixing the form (1 or 3 for irreducible forms).
inline int stabilizer_order(const BinaryCubicForm& f) {
  int n = 0;
  for (const Mat2& g : detail::small_gl2()) {
    if (act(g, f) == f) ++n;
  }
  return n;
}

namespace detail {

inline i64 mod(i128 v, i64 p) {
  i128 r = v % p;
  return static_cast<i64>(r < 0 ? r + p : r);
}

/// Roots of F mod p on P^1(F_p) with multiplicity; infinity encoded as p.
inline std::vector<std::pair<i64, int>> projective_roots(const BinaryCubicForm& f, i64 p) {
  std::array<i64, 4> g{mod(f.a, p), mod(f.b, p), mod(f.c, p), mod(f.d, p)};
  if (g[0] == 0 && g[1] == 0 && g[2] == 0 && g[3] == 0) {
    throw std::invalid_argument("form vanishes identically mod p");
  }
  std::vector<std::pair<i64, int>> roots;
  // Root at infinity: multiplicity = number of leading zeros of (a, b, c).
  int inf = 0;
  while (inf < 3 && g[inf] == 0) ++inf;
  if (inf > 0) roots.emplace_back(p, inf);
  // Affine polynomial a x^3 + b x^2 + c x + d, coefficients high to low.
  std::vector<i64> poly(g.begin() + inf, g.end());
  for (i64 r = 0; r < p && poly.size() > 1; ++r) {
    int mult = 0;
    while (poly.size() > 1) {
      // synthetic division by (x - r)
      std::vector<i64> q(poly.size() - 1);
      i64 acc = 0;
      for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        acc = static_cast<i64>((static_cast<i128>(acc) * r + poly[i]) % p);
        q[i] = acc;
      }
      i64 rem = static_cast<i64>((static_cast<i128>(acc) * r + poly.back()) % p);
      if (rem != 0) break;
      poly = std::move(q);
      ++mult;
    }
    if (mult > 0) roots.emplace_back(r, mult);
  }
  return roots;
}

}  // namespace detail

/**
 * p-maximality of the cubic ring of a primitive form: the ring fails to be
 * maximal at p iff some multiple root r of F mod p (including infinity) has
 * F(r) = 0 mod p^2 for a lift of r.
 */
inline bool is_maximal_at(const BinaryCubicForm& f, i64 p) {
  if (f.a % p == 0 && f.b % p == 0 && f.c % p == 0 && f.d % p == 0) return false;
  const i128 p2 = static_cast<i128>(p) * p;
  for (auto [r, mult] : detail::projective_roots(f, p)) {
    if (mult < 2) continue;
    i128 value = (r == p) ? static_cast<i128>(f.a) : f(r, 1);
    if (value % p2 == 0) return false;
  }
  return true;
}

/// Primes p with p^2 | n (n > 0).
inline std::vector<u64> square_prime_divisors(u64 n) {
  std::vector<u64> out;
  for (auto [p, e] : factorize(n)) {
    if (e >= 2) out.push_back(p);
  }
  return out;
}

inline bool is_maximal(const BinaryCubicForm& f) {
  i128 disc = disc_form(f);
  if (disc == 0) return false;
  for (u64 p : square_prime_divisors(static_cast<u64>(abs128(disc)))) {
    if (!is_maximal_at(f, static_cast<i64>(p))) return false;
  }
  return true;
}

enum class SplittingType { S111, S12, S3, S121, S13 };

inline const char* to_string(SplittingType t) {
  switch (t) {
    case SplittingType::S111: return "111";
    case SplittingType::S12: return "12";
    case SplittingType::S3: return "3";
    case SplittingType::S121: return "121";
    case SplittingType::S13: return "13";
  }
  return "?";
}

inline SplittingType parse_splitting_type(const std::string& s) {
  if (s == "111") return SplittingType::S111;
  if (s == "12" || s == "21") return SplittingType::S12;
  if (s == "3") return SplittingType::S3;
  if (s == "121" || s == "1^21" || s == "112") return SplittingType::S121;
  if (s == "13" || s == "1^3") return SplittingType::S13;
  throw std::invalid_argument("unknown splitting type '" + s + "'");
}

/// Factorization shape of a (p-maximal) form mod p.
inline SplittingType splitting_type(const BinaryCubicForm& f, i64 p) {
  auto roots = detail::projective_roots(f, p);
  int distinct = 0;
  for (auto [r, m] : roots) {
    if (m == 3) return SplittingType::S13;
    if (m == 2) return SplittingType::S121;
    ++distinct;
  }
  if (distinct == 3) return SplittingType::S111;
  if (distinct == 1) return SplittingType::S12;
  return SplittingType::S3;
}

/// True when the form has no linear factor over Q.
inline bool is_irreducible(const BinaryCubicForm& f) {
  if (f.a == 0 || f.d == 0) return false;
  // A root mod some small prime is necessary for reducibility.
  static constexpr std::array<i64, 6> kSieve{2, 3, 5, 7, 11, 13};
  for (i64 p : kSieve) {
    bool has_root = detail::mod(f.a, p) == 0;
    for (i64 x = 0; x < p && !has_root; ++x) {
      has_root = detail::mod(f(x, 1), p) == 0;
    }
    if (!has_root) return true;
  }
  // Rational roots p/q have q | a: locate real roots numerically, test exactly.
  const long double A = f.a, B = f.b, C = f.c, D = f.d;
  auto val = [&](long double t) { return ((A * t + B) * t + C) * t + D; };
  auto dval = [&](long double t) { return (3 * A * t + 2 * B) * t + C; };
  std::vector<long double> brackets;
  long double bound = 1 + std::max({std::fabs(B / A), std::fabs(C / A), std::fabs(D / A)});
  brackets.push_back(-bound);
  long double disc_d = B * B - 3 * A * C;
  if (disc_d > 0) {
    long double s = std::sqrt(disc_d);
    long double r1 = (-B - s) / (3 * A), r2 = (-B + s) / (3 * A);
    brackets.push_back(std::min(r1, r2));
    brackets.push_back(std::max(r1, r2));
  }
  brackets.push_back(bound);
  std::vector<long double> reals;
  for (std::size_t i = 0; i + 1 < brackets.size(); ++i) {
    long double lo = brackets[i], hi = brackets[i + 1];
    long double flo = val(lo), fhi = val(hi);
    if (flo == 0) {
      reals.push_back(lo);
      continue;
    }
    if ((flo < 0) == (fhi < 0)) {
      // possible tangential root at a critical point
      if (std::fabs(fhi) < 1e-6L * (1 + std::fabs(D))) reals.push_back(hi);
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15L * (1 + std::fabs(lo)); ++it) {
      long double mid = (lo + hi) / 2;
      if ((val(mid) < 0) == (flo < 0)) lo = mid; else hi = mid;
    }
    long double t = (lo + hi) / 2;
    long double dv = dval(t);
    if (dv != 0) t -= val(t) / dv;
    reals.push_back(t);
  }
  const i64 absa = std::llabs(f.a);
  for (long double t : reals) {
    for (i64 q = 1; q <= absa; ++q) {
      if (absa % q != 0) continue;
      i64 p0 = std::llround(t * q);
      for (i64 p = p0 - 1; p <= p0 + 1; ++p) {
        if (f(p, q) == 0) return false;
      }
    }
  }
  return true;
}

/// Brings an irreducible form into the reduction domain (canonical representative).
inline BinaryCubicForm reduce(const BinaryCubicForm& f0) {
  i128 disc = disc_form(f0);
  if (disc == 0 || !is_irreducible(f0)) {
    throw std::invalid_argument("reduce: form must be irreducible with nonzero discriminant");
  }
  BinaryCubicForm f = detail::normalize_sign(f0);
  const Mat2 S{0, 1, 1, 0};     // swap x and y
  const Mat2 N{-1, 0, 0, 1};    // x -> -x
  auto fix_sign = [](BinaryCubicForm g) { return detail::normalize_sign(g); };
  for (int guard = 0; guard < 100000; ++guard) {
    if (reduction_status(f, disc) != Reduction::NotReduced) return canonical_reduced(f, disc);
    if (disc > 0) {
      auto [P, Q, R] = hessian(f);
      if (f.a <= 0) { f = fix_sign(f); continue; }
      if (Q < 0) { f = fix_sign(act(N, f)); continue; }
      if (Q > P) {
        // translate to bring Q into [-P, P]
        i128 k = (Q + P) / (2 * P);
        f = fix_sign(act(Mat2{1, 0, -static_cast<i64>(k), 1}, f));
        continue;
      }
      if (P > R) { f = fix_sign(act(S, f)); continue; }
    } else {
      // Locate u = Re(complex root) via the real root t: 2u = -b/a - t.
      const long double A = f.a, B = f.b, C = f.c, D = f.d;
      long double lo = -1, hi = 1;
      auto val = [&](long double t) { return ((A * t + B) * t + C) * t + D; };
      bool up = A > 0;
      while ((val(lo) < 0) != up) lo *= 2;
      while ((val(hi) > 0) != up) hi *= 2;
      for (int it = 0; it < 200; ++it) {
        long double mid = (lo + hi) / 2;
        if ((val(mid) > 0) == up) hi = mid; else lo = mid;
      }
      long double t = (lo + hi) / 2;
      long double u = (-B / A - t) / 2;
      long double n = -D / (A * t);
      i64 shift = static_cast<i64>(std::floor(u + 0.5L));
      if (shift != 0) {
        // complex root u + iv -> u - shift: substitute x -> x + shift y
        f = fix_sign(act(Mat2{1, 0, shift, 1}, f));
        continue;
      }
      if (u < 0) { f = fix_sign(act(N, f)); continue; }
      if (n < 1) { f = fix_sign(act(S, f)); continue; }
      // numerically reduced but an exact boundary test failed: nudge with small moves
      for (const Mat2& g : detail::small_gl2()) {
        BinaryCubicForm h = fix_sign(act(g, f));
        if (reduction_status(h, disc) != Reduction::NotReduced) return canonical_reduced(h, disc);
      }
      throw IntegrityError("reduce: failed to reach reduction domain");
    }
  }
  throw IntegrityError("reduce: iteration limit");
}

}  // namespace cubic
