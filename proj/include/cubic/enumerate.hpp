#pragma once
/**
 * @file enumerate.hpp
 * @brief Cubic fields up to a discriminant bound, one reduced maximal form each.
 *
 * Cubic fields correspond to GL2(Z)-classes of irreducible maximal binary cubic
 * forms, and a class has exactly one canonical reduced member, so walking the
 * reduction domain visits each field once.
 */

#include <algorithm>
#include <cmath>
#include <vector>

#include "cubic/arith.hpp"
#include "cubic/forms.hpp"

namespace cubic {

/// Largest discriminant bound the enumerator accepts.
inline constexpr i64 kMaxEnumerationBound = 1'000'000'000'000LL;

enum class SignFilter { Both, Positive, Negative };

struct FieldForm {
  BinaryCubicForm form;
  i64 disc = 0;
  auto operator<=>(const FieldForm&) const = default;
};

namespace detail {

/// Maximality for a discriminant whose small primes come from `small` (all primes <= cbrt|disc|).
inline bool maximal_fast(const BinaryCubicForm& f, i64 disc, const std::vector<u64>& small) {
  u64 n = static_cast<u64>(disc < 0 ? -disc : disc);
  for (u64 p : small) {
    if (p * p * p > n) break;
    if (n % p != 0) continue;
    n /= p;
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    if (!is_maximal_at(f, static_cast<i64>(p))) return false;
  }
  // What remains is 1, a prime, a product of two large primes, or a square of one.
  if (n > 1 && is_square(n)) {
    if (!is_maximal_at(f, static_cast<i64>(isqrt(n)))) return false;
  }
  return true;
}

template <class Visit>
inline void accept_candidate(const BinaryCubicForm& f, i64 disc, Reduction st,
                             const std::vector<u64>& small, Visit& visit) {
  if (st == Reduction::NotReduced) return;
  if (st == Reduction::Boundary && canonical_reduced(f, disc) != f) return;
  if (!maximal_fast(f, disc, small)) return;
  if (!is_irreducible(f)) return;
  visit(FieldForm{f, disc});
}

template <class Visit>
void walk_negative(i64 X, double scale, const std::vector<u64>& small, Visit& visit) {
  const long double Xl = static_cast<long double>(X);
  const i64 amax = static_cast<i64>(std::floor(scale * std::pow(16.0L * Xl / 27.0L, 0.25L))) + 1;
  for (i64 a = 1; a <= amax; ++a) {
    const long double A = static_cast<long double>(a);
    long double S2 = std::sqrt(Xl / 3.0L) / (A * A) - 0.75L;
    long double S = scale * std::sqrt(std::max(0.0L, S2));
    i64 bmin = static_cast<i64>(std::floor(-A * (S + 1.5L))) - 1;
    i64 bmax = static_cast<i64>(std::ceil(A * S)) + 1;
    const long double vmax2 = scale * std::cbrt(Xl / (4.0L * A * A * A * A));
    for (i64 b = bmin; b <= bmax; ++b) {
      const long double ba = static_cast<long double>(b) / A;
      long double ustar = std::clamp(-ba / 3.0L, 0.0L, 0.5L);
      long double cmax_r = vmax2 - 3 * ustar * ustar - 2 * ustar * ba;
      long double cmin_r = std::min(1.0L, -ba);
      i64 cmin = static_cast<i64>(std::floor(A * cmin_r)) - 1;
      i64 cmax = static_cast<i64>(std::ceil(A * cmax_r)) + 1;
      for (i64 c = cmin; c <= cmax; ++c) {
        const long double B = static_cast<long double>(b), C = static_cast<long double>(c);
        // d = -(a t^3 + b t^2 + c t) for the real root t in [-b/a - 1, -b/a].
        auto g = [&](long double t) { return -((A * t + B) * t + C) * t; };
        long double t0 = -ba - 1, t1 = -ba;
        long double dlo = std::min(g(t0), g(t1)), dhi = std::max(g(t0), g(t1));
        long double q = B * B - 3 * A * C;
        if (q > 0) {
          long double sq = std::sqrt(q);
          for (long double t : {(-B - sq) / (3 * A), (-B + sq) / (3 * A)}) {
            if (t > t0 && t < t1) {
              dlo = std::min(dlo, g(t));
              dhi = std::max(dhi, g(t));
            }
          }
        }
        // disc(d) = -27a^2 d^2 + (18abc - 4b^3) d + (b^2c^2 - 4ac^3) >= -X.
        long double qa = -27 * A * A, qb = 18 * A * B * C - 4 * B * B * B,
                    qc = B * B * C * C - 4 * A * C * C * C + Xl;
        long double dd = qb * qb - 4 * qa * qc;
        if (dd < 0) continue;
        long double sdd = std::sqrt(dd);
        long double r1 = (-qb + sdd) / (2 * qa), r2 = (-qb - sdd) / (2 * qa);
        dlo = std::max(dlo, std::min(r1, r2));
        dhi = std::min(dhi, std::max(r1, r2));
        if (scale != 1.0) {
          long double w = (dhi - dlo) * (scale - 1) + 2;
          dlo -= w;
          dhi += w;
        }
        if (dlo > dhi + 2) continue;
        i64 d0 = static_cast<i64>(std::floor(dlo)) - 1;
        i64 d1 = static_cast<i64>(std::ceil(dhi)) + 1;
        for (i64 d = d0; d <= d1; ++d) {
          BinaryCubicForm f{a, b, c, d};
          i128 disc = disc_form(f);
          if (disc >= 0 || disc < -X) continue;
          accept_candidate(f, static_cast<i64>(disc), reduction_status(f, disc), small, visit);
        }
      }
    }
  }
}

template <class Visit>
void walk_positive(i64 X, double scale, const std::vector<u64>& small, Visit& visit) {
  const long double Xl = static_cast<long double>(X);
  const i64 amax = static_cast<i64>(std::floor(scale * std::pow(16.0L * Xl / 729.0L, 0.25L))) + 1;
  const i64 Pmax = static_cast<i64>(isqrt(static_cast<u64>(X))) + 1;
  for (i64 a = 1; a <= amax; ++a) {
    const long double A = static_cast<long double>(a);
    long double rad = std::sqrt(Xl) - 27.0L * A * A / 4.0L;
    long double bw = 1.5L * A + std::sqrt(std::max(0.0L, rad));
    i64 bspan = static_cast<i64>(std::ceil(scale * bw)) + 1;
    for (i64 b = -bspan; b <= bspan; ++b) {
      const i64 m3 = 3 * a;
      i64 bb = ((b * b) % m3 + m3) % m3;
      i64 P = bb == 0 ? m3 : bb;
      for (; P <= Pmax; P += m3) {
        i64 c = (b * b - P) / m3;
        const i64 m9 = 9 * a;
        i64 bc = b * c;
        i64 Q = ((bc % m9) + m9) % m9;
        for (; Q <= P; Q += m9) {
          i64 d = (bc - Q) / m9;
          BinaryCubicForm f{a, b, c, d};
          i128 disc = disc_form(f);
          if (disc <= 0 || disc > X) continue;
          accept_candidate(f, static_cast<i64>(disc), reduction_status(f, disc), small, visit);
        }
      }
    }
  }
}

}  // namespace detail

/**
 * Calls visit(FieldForm) once per cubic field with 0 < |disc| < X (sign per
 * filter), in no particular order.
 */
template <class Visit>
void for_each_field(i64 X, SignFilter sign, Visit&& visit, double bound_scale = 1.0) {
  if (X < 1) throw std::invalid_argument("discriminant bound must be at least 1");
  if (X > kMaxEnumerationBound) {
    throw CapacityError("discriminant bound " + std::to_string(X) + " exceeds the supported " +
                        std::to_string(kMaxEnumerationBound));
  }
  const i64 inclusive = X - 1;
  if (inclusive < 23) return;
  const std::vector<u64> small = primes_up_to(icbrt(static_cast<u64>(inclusive)) + 2);
  if (sign != SignFilter::Positive) detail::walk_negative(inclusive, bound_scale, small, visit);
  if (sign != SignFilter::Negative) detail::walk_positive(inclusive, bound_scale, small, visit);
}

/// Sorted by |disc|, then canonical form.
inline std::vector<FieldForm> enumerate_fields(i64 X, SignFilter sign = SignFilter::Both,
                                               double bound_scale = 1.0) {
  std::vector<FieldForm> out;
  for_each_field(X, sign, [&](const FieldForm& r) { out.push_back(r); }, bound_scale);
  std::sort(out.begin(), out.end(), [](const FieldForm& x, const FieldForm& y) {
    i64 ax = x.disc < 0 ? -x.disc : x.disc, ay = y.disc < 0 ? -y.disc : y.disc;
    if (ax != ay) return ax < ay;
    return x.form < y.form;
  });
  return out;
}

}  // namespace cubic
