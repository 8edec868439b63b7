#pragma once
/**
 * @file hunter.hpp
 * @brief Slow, independent enumeration of cubic fields by Hunter's theorem.
 *
 * Every cubic field K contains a non-rational integer with trace 0 or 1 and
 * T2 <= Tr^2/3 + 2 sqrt|disc K| / 3. We list all monic integer cubics with such
 * roots, compute field discriminants by enlarging Z[theta] until maximal, and
 * identify polynomials defining the same field by exhibiting a root of one as
 * an exact rational polynomial in a root of the other.
 *
 * Nothing here uses binary cubic forms.
 */

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "cubic/arith.hpp"

namespace cubic::hunter {

inline constexpr i64 kMaxBound = 100000;

/// Monic x^3 + c[0] x^2 + c[1] x + c[2].
using Monic = std::array<i64, 3>;

struct OracleField {
  i64 disc;
  Monic poly;  // some defining polynomial
};

namespace detail {

using cld = std::complex<long double>;

inline std::array<cld, 3> roots(const Monic& m) {
  // Durand-Kerner, then a few Newton polishing steps.
  auto f = [&](cld z) { return ((z + static_cast<long double>(m[0])) * z + static_cast<long double>(m[1])) * z + static_cast<long double>(m[2]); };
  auto df = [&](cld z) { return (3.0L * z + 2.0L * static_cast<long double>(m[0])) * z + static_cast<long double>(m[1]); };
  long double R = 1 + std::max({std::fabs((long double)m[0]), std::fabs((long double)m[1]), std::fabs((long double)m[2])});
  std::array<cld, 3> z{cld(0.4L, 0.9L) * R, cld(-0.7L, 0.3L) * R, cld(0.2L, -0.8L) * R};
  for (int it = 0; it < 500; ++it) {
    long double move = 0;
    for (int i = 0; i < 3; ++i) {
      cld den = 1;
      for (int j = 0; j < 3; ++j)
        if (j != i) den *= (z[i] - z[j]);
      cld step = f(z[i]) / den;
      z[i] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-18L * R) break;
  }
  for (auto& w : z) {
    for (int k = 0; k < 3; ++k) {
      cld d = df(w);
      if (std::abs(d) > 0) w -= f(w) / d;
    }
  }
  return z;
}

inline i128 eval(const Monic& m, i128 x) { return ((x + m[0]) * x + m[1]) * x + m[2]; }

inline bool irreducible(const Monic& m, const std::array<cld, 3>& r) {
  if (m[2] == 0) return false;
  for (const cld& z : r) {
    if (std::fabs(z.imag()) > 1e-6L) continue;
    i64 k = std::llround(z.real());
    for (i64 t = k - 1; t <= k + 1; ++t)
      if (eval(m, t) == 0) return false;
  }
  return true;
}

inline i128 poly_disc(const Monic& m) {
  const i128 a = 1, b = m[0], c = m[1], d = m[2];
  return 18 * a * b * c * d - 4 * a * c * c * c + b * b * c * c - 4 * b * b * b * d -
         27 * a * a * d * d;
}

using Vec = std::array<i128, 3>;
using Mat = std::array<std::array<i128, 3>, 3>;

/// Matrix of multiplication by v0 + v1 t + v2 t^2 in the power basis of Q[t]/(m).
inline Mat mult_matrix(const Monic& m, const Vec& v) {
  // t * (x0, x1, x2) = (-m2 x2, x0 - m1 x2, x1 - m0 x2)
  auto mul_t = [&](const Vec& x) {
    return Vec{-m[2] * x[2], x[0] - m[1] * x[2], x[1] - m[0] * x[2]};
  };
  Mat M{};
  Vec e{1, 0, 0};
  for (int col = 0; col < 3; ++col) {
    // column col = v * t^col
    Vec acc{0, 0, 0};
    Vec tp = e;
    Vec base = e;
    for (int k = 0; k < col; ++k) base = mul_t(base);
    tp = base;
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 3; ++i) acc[i] += v[k] * tp[i];
      tp = mul_t(tp);
    }
    for (int i = 0; i < 3; ++i) M[i][col] = acc[i];
  }
  return M;
}

/// Whether w/q (power-basis coordinates) is an algebraic integer.
inline bool integral(const Monic& m, const Vec& w, i128 q) {
  Mat M = mult_matrix(m, w);
  i128 tr = M[0][0] + M[1][1] + M[2][2];
  if (tr % q != 0) return false;
  i128 s2 = M[0][0] * M[1][1] - M[0][1] * M[1][0] + M[0][0] * M[2][2] - M[0][2] * M[2][0] +
            M[1][1] * M[2][2] - M[1][2] * M[2][1];
  if (s2 % (q * q) != 0) return false;
  i128 det = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
             M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
             M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
  return det % (q * q * q) == 0;
}

/// Row Hermite normal form of an integer lattice given by generators; returns 3 rows.
inline std::array<Vec, 3> hnf(std::vector<Vec> rows) {
  std::array<Vec, 3> out{};
  std::size_t top = 0;
  for (int col = 0; col < 3; ++col) {
    // Euclid on column col among rows[top..]
    for (;;) {
      std::size_t piv = rows.size();
      for (std::size_t i = top; i < rows.size(); ++i) {
        if (rows[i][col] != 0 && (piv == rows.size() || abs128(rows[i][col]) < abs128(rows[piv][col]))) piv = i;
      }
      if (piv == rows.size()) break;
      std::swap(rows[top], rows[piv]);
      bool done = true;
      for (std::size_t i = top + 1; i < rows.size(); ++i) {
        i128 k = rows[i][col] / rows[top][col];
        for (int j = 0; j < 3; ++j) rows[i][j] -= k * rows[top][j];
        if (rows[i][col] != 0) done = false;
      }
      if (done) break;
    }
    if (top < rows.size() && rows[top][col] != 0) {
      if (rows[top][col] < 0)
        for (auto& x : rows[top]) x = -x;
      out[col] = rows[top];
      ++top;
    } else {
      throw IntegrityError("hunter: lattice is not of full rank");
    }
  }
  return out;
}

/// Discriminant of the maximal order of Q[t]/(m), by p-enlargement of Z[t].
inline i128 field_discriminant(const Monic& m) {
  const i128 pd = poly_disc(m);
  i128 disc = pd;
  // Order basis rows with common denominator den, coordinates in the power basis.
  std::array<Vec, 3> basis{Vec{1, 0, 0}, Vec{0, 1, 0}, Vec{0, 0, 1}};
  i128 den = 1;
  for (auto [p64, e] : factorize(static_cast<u64>(abs128(pd)))) {
    const i128 p = static_cast<i128>(p64);
    for (;;) {
      if (disc % (p * p) != 0) break;
      // Integral elements of (1/p)O form an F_p-subspace; scan normalized vectors.
      bool found = false;
      Vec hit{};
      auto test = [&](i128 x0, i128 x1, i128 x2) {
        Vec w{0, 0, 0};
        for (int i = 0; i < 3; ++i) w[i] = x0 * basis[0][i] + x1 * basis[1][i] + x2 * basis[2][i];
        if (integral(m, w, p * den)) {
          hit = w;
          return true;
        }
        return false;
      };
      for (i128 x0 = 0; x0 < p && !found; ++x0)
        for (i128 x1 = 0; x1 < p && !found; ++x1) found = test(x0, x1, 1);
      for (i128 x0 = 0; x0 < p && !found; ++x0) found = test(x0, 1, 0);
      if (!found) found = test(1, 0, 0);
      if (!found) break;
      std::vector<Vec> gens;
      for (const Vec& b : basis) gens.push_back(Vec{b[0] * p, b[1] * p, b[2] * p});
      gens.push_back(hit);
      auto h = hnf(gens);
      i128 g = p * den;
      for (const Vec& r : h)
        for (i128 x : r) g = gcd128(g, x);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) basis[i][j] = h[i][j] / g;
      den = p * den / g;
      disc /= p * p;
    }
  }
  return disc;
}

/// Exact check that sum_k num[k] t^k / den is a root of g in Q[t]/(f).
inline bool is_root_in(const Monic& f, const Monic& g, const Vec& num, i128 den) {
  // Reduce polynomials modulo f; represent as Vec (degree < 3).
  auto mulmod_f = [&](const Vec& x, const Vec& y) {
    std::array<i128, 5> prod{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) prod[i + j] += x[i] * y[j];
    for (int k = 4; k >= 3; --k) {
      i128 c = prod[k];
      prod[k] = 0;
      prod[k - 1] -= c * f[0];
      prod[k - 2] -= c * f[1];
      prod[k - 3] -= c * f[2];
    }
    return Vec{prod[0], prod[1], prod[2]};
  };
  // den^3 g(h/den) = h^3 + g0 den h^2 + g1 den^2 h + g2 den^3
  Vec h2 = mulmod_f(num, num);
  Vec h3 = mulmod_f(h2, num);
  Vec acc{};
  for (int i = 0; i < 3; ++i) acc[i] = h3[i] + g[0] * den * h2[i] + g[1] * den * den * num[i];
  acc[0] += g[2] * den * den * den;
  return acc[0] == 0 && acc[1] == 0 && acc[2] == 0;
}

/// Whether Q[t]/(f) and Q[t]/(g) are isomorphic (both irreducible, same degree).
inline bool same_field(const Monic& f, const Monic& g) {
  auto rf = roots(f);
  auto rg = roots(g);
  const i128 bound = abs128(poly_disc(f));
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (const auto& pm : perms) {
    // Solve c0 + c1 a_i + c2 a_i^2 = b_pm(i) by Cramer's rule.
    std::array<std::array<cld, 3>, 3> V;
    std::array<cld, 3> rhs;
    for (int i = 0; i < 3; ++i) {
      V[i] = {cld(1), rf[i], rf[i] * rf[i]};
      rhs[i] = rg[pm[i]];
    }
    auto det3 = [](const std::array<std::array<cld, 3>, 3>& A) {
      return A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
             A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
             A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
    };
    cld D = det3(V);
    Vec num{};
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) {
      auto W = V;
      for (int i = 0; i < 3; ++i) W[i][k] = rhs[i];
      cld ck = det3(W) / D;
      if (std::fabs(ck.imag()) * static_cast<long double>(bound) > 1e-3L) ok = false;
      long double scaled = ck.real() * static_cast<long double>(bound);
      if (std::fabs(scaled) > 9e17L) ok = false;
      if (ok) num[k] = static_cast<i128>(std::llround(scaled));
    }
    if (ok && is_root_in(f, g, num, bound)) return true;
  }
  return false;
}

}  // namespace detail

/// Cubic fields with 0 < |disc| < X, sorted by |disc| then sign (negative first).
inline std::vector<OracleField> hunter_oracle(i64 X) {
  if (X > kMaxBound) throw CapacityError("hunter oracle is limited to bounds <= 100000");
  std::vector<OracleField> out;
  if (X <= 1) return out;
  const long double sx = std::sqrt(static_cast<long double>(X));
  std::map<i64, std::vector<Monic>> groups;
  for (i64 tr = 0; tr <= 1; ++tr) {
    const long double T2max = tr * tr / 3.0L + 2.0L * sx / 3.0L;
    const i64 a2max = static_cast<i64>(std::floor((T2max + tr * tr) / 2)) + 1;
    const i64 a3max = static_cast<i64>(std::floor(std::pow(T2max / 3, 1.5L))) + 1;
    for (i64 a2 = -a2max; a2 <= a2max; ++a2) {
      for (i64 a3 = -a3max; a3 <= a3max; ++a3) {
        Monic m{-tr, a2, a3};
        auto r = detail::roots(m);
        long double t2 = 0;
        for (auto& z : r) t2 += std::norm(z);
        if (t2 > T2max * (1 + 1e-12L) + 1e-9L) continue;
        if (!detail::irreducible(m, r)) continue;
        i128 dk = detail::field_discriminant(m);
        if (abs128(dk) >= X) continue;
        // T2 bound must hold with the actual discriminant of this field.
        const long double own = tr * tr / 3.0L + 2.0L * std::sqrt(static_cast<long double>(abs128(dk))) / 3.0L;
        if (t2 > own * (1 + 1e-12L) + 1e-9L) continue;
        auto& g = groups[static_cast<i64>(dk)];
        bool seen = false;
        for (const Monic& rep : g) {
          if (detail::same_field(rep, m)) {
            seen = true;
            break;
          }
        }
        if (!seen) g.push_back(m);
      }
    }
  }
  for (auto& [d, reps] : groups)
    for (const Monic& m : reps) out.push_back({d, m});
  std::sort(out.begin(), out.end(), [](const OracleField& x, const OracleField& y) {
    i64 ax = std::llabs(x.disc), ay = std::llabs(y.disc);
    if (ax != ay) return ax < ay;
    return x.disc < y.disc;
  });
  return out;
}

}  // namespace cubic::hunter
