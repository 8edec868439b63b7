#pragma once
/**
 * @file constants.hpp
 * @brief Leading and secondary constants as Euler products with certified tails.
 *
 * Each product is written as (closed zeta quotient) x prod_p factor_p / model_p,
 * where model_p is the local factor of the zeta quotient. The corrected factors
 * are 1 + O(p^-sigma) with sigma > 1; they are multiplied out to P_max and the
 * remainder bounded by 2 c P_max^{1-sigma} / (sigma - 1).
 */

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubic/arith.hpp"
#include "cubic/forms.hpp"
#include "cubic/index.hpp"
#include "cubic/localmass.hpp"
#include "cubic/rational.hpp"

namespace cubic {

inline constexpr u64 kDefaultPmax = 100000;

/// A value with an absolute error bound.
struct Interval {
  long double value = 0;
  long double error = 0;
  u64 P_max = 0;

  bool contains(long double x) const { return std::fabs(x - value) <= error; }
  bool overlaps(const Interval& o) const { return std::fabs(value - o.value) <= error + o.error; }
};

struct EulerProductSpec {
  std::function<long double(u64)> factor;  // true local factor
  std::function<long double(u64)> model;   // local factor of the zeta quotient
  long double model_value = 1;             // prod_p model(p)
  long double prefactor = 1;
  u64 P_max = kDefaultPmax;
  long double tail_sigma = 2;  // |factor/model - 1| <= tail_c p^-tail_sigma for p > P_max
  long double tail_c = 1;
  std::set<u64> special;  // primes always multiplied in, even beyond P_max
};

namespace detail {

inline const std::vector<u64>& primes_cached(u64 n) {
  static std::mutex mu;
  static std::vector<u64> ps;
  static u64 have = 0;
  std::lock_guard<std::mutex> lock(mu);
  if (n > have) {
    ps = primes_up_to(n);
    have = n;
  }
  return ps;
}

}  // namespace detail

inline Interval evaluate(const EulerProductSpec& e) {
  if (e.tail_sigma <= 1) throw std::invalid_argument("tail exponent must exceed 1");
  long double prod = 1;
  std::size_t n = 0;
  for (u64 p : detail::primes_cached(e.P_max)) {
    if (p > e.P_max) break;
    prod *= e.factor(p) / e.model(p);
    ++n;
  }
  for (u64 p : e.special) {
    if (p <= e.P_max) continue;
    prod *= e.factor(p) / e.model(p);
    ++n;
  }
  const long double P = static_cast<long double>(e.P_max);
  long double tail = 2 * e.tail_c * std::pow(P, 1 - e.tail_sigma) / (e.tail_sigma - 1);
  long double rounding = 8 * static_cast<long double>(n) * 1.1e-19L;  // long double ulp
  long double value = e.prefactor * e.model_value * prod;
  long double err = std::fabs(value) * (std::expm1(tail + rounding) + 1e-18L);
  return {value, err, e.P_max};
}

/// Half the archimedean mass: 1/12 for totally real, 1/4 for complex, 1/3 for both.
inline long double half_infinite_mass(const SignatureSet& s) { return infinite_mass(s).to_ld() / 2; }

/// Admissible conductors: squarefree away from 3, v_3 at most 2.
inline bool is_admissible_conductor(u64 f) {
  if (f == 0) return false;
  for (auto [p, e] : factorize(f)) {
    if (p == 3 ? e > 2 : e > 1) return false;
  }
  return true;
}

namespace detail {

inline long double local_weight(u64 p, int d_val, int f_val, long double s) {
  const long double q = static_cast<long double>(p);
  return std::pow(q, -static_cast<long double>(d_val)) * std::pow(q, -s * f_val);
}

}  // namespace detail

/// (1 - 1/p) * sum over allowed classes of |d|_p |f|_p^s / |Aut|.
inline long double L1_factor(const SplittingConstraint& c, u64 p, long double s) {
  const long double q = static_cast<long double>(p);
  return (1 - 1 / q) * mass_sum(p, c.allowed(p), [&](int d, int f) { return detail::local_weight(p, d, f, s); });
}

/**
 * C_1(Sigma, f) = 1/2 m_inf prod_p (1 - 1/p) sum_{K in Sigma_p(f)} |d|_p / |Aut K|,
 * where Sigma_p(f) keeps the classes with v_p(F) = v_p(f). Away from 2, 3, the
 * restricted primes and the primes of f the factor is 1 - 1/p^2, so the product
 * is finite times 1/zeta(2).
 */
inline Interval C1_of_f(const SplittingConstraint& c, u64 f) {
  if (!is_admissible_conductor(f)) {
    throw std::invalid_argument("conductor " + std::to_string(f) + " is not squarefree away from 3 with v_3 <= 2");
  }
  std::set<u64> S{2, 3};
  for (auto [p, e] : factorize(f)) S.insert(p);
  for (u64 p : c.restricted_primes()) S.insert(p);
  long double prod = 1;
  for (u64 p : S) {
    const int v = valuation(static_cast<i64>(f), p);
    const long double q = static_cast<long double>(p);
    long double m = 0;
    for (const auto& k : local_classes(p)) {
      if (k.f_val != v || !c.allowed(p).count(k.splitting)) continue;
      m += static_cast<long double>(k.multiplicity) / k.aut_order * std::pow(q, -static_cast<long double>(k.d_val));
    }
    prod *= (1 - 1 / q) * m / (1 - 1 / (q * q));
  }
  long double value = half_infinite_mass(c.infinity) * prod / std::riemann_zetal(2);
  return {value, std::fabs(value) * 1e-17L, 0};
}

/// L_1(Sigma, s) = sum_f C_1(Sigma, f) f^-s as an Euler product, s > 1.01.
inline Interval L1(const SplittingConstraint& c, long double s, u64 P_max = kDefaultPmax) {
  if (!(s > 1.01L)) throw std::domain_error("L1: s must exceed 1.01 (pole at s = 1)");
  EulerProductSpec e;
  e.factor = [&](u64 p) { return L1_factor(c, p, s); };
  // zeta(s) / zeta(2)
  e.model = [s](u64 p) {
    const long double q = static_cast<long double>(p);
    return (1 - 1 / (q * q)) / (1 - std::pow(q, -s));
  };
  e.model_value = std::riemann_zetal(s) / std::riemann_zetal(2);
  e.prefactor = half_infinite_mass(c.infinity);
  e.P_max = P_max;
  // generic ratio is 1 - (p^{-s-1} + p^{-2s}) / (1 + 1/p)
  e.tail_sigma = std::min(s + 1, 2 * s);
  e.tail_c = 2;
  for (u64 p : c.restricted_primes()) e.special.insert(p);
  return evaluate(e);
}

/// Res_{s=1} L_1 = 1/2 m_inf prod_p (1 - 1/p)^2 sum |d|_p |f|_p / |Aut|.
inline Interval residue_L1(const SplittingConstraint& c, u64 P_max = kDefaultPmax) {
  EulerProductSpec e;
  e.factor = [&](u64 p) {
    const long double q = static_cast<long double>(p);
    return (1 - 1 / q) * L1_factor(c, p, 1);
  };
  // zeta(2)^-3
  e.model = [](u64 p) {
    const long double q = static_cast<long double>(p);
    const long double t = 1 - 1 / (q * q);
    return t * t * t;
  };
  const long double z2 = std::riemann_zetal(2);
  e.model_value = 1 / (z2 * z2 * z2);
  e.prefactor = half_infinite_mass(c.infinity);
  e.P_max = P_max;
  e.tail_sigma = 3;
  e.tail_c = 3;
  for (u64 p : c.restricted_primes()) e.special.insert(p);
  return evaluate(e);
}

/// C(p) = sum over all classes of |rad(d f)|_p / |Aut|, exact.
inline Rational radical_local_constant(u64 p) { return radical_mass(p); }

/// (1 / (2 sigma)) prod_p C(p) (1 - 1/p)^2 with sigma = 6 (totally real) or 2 (complex).
inline Interval radical_constant(Signature sig, u64 P_max = kDefaultPmax) {
  EulerProductSpec e;
  e.factor = [](u64 p) {
    const long double q = static_cast<long double>(p);
    return radical_local_constant(p).to_ld() * (1 - 1 / q) * (1 - 1 / q);
  };
  e.model = [](u64 p) {
    const long double q = static_cast<long double>(p);
    const long double t = 1 - 1 / (q * q);
    return t * t * t;
  };
  const long double z2 = std::riemann_zetal(2);
  e.model_value = 1 / (z2 * z2 * z2);
  e.prefactor = sig == Signature::TotallyReal ? 1.0L / 12 : 1.0L / 4;
  e.P_max = P_max;
  e.tail_sigma = 3;
  e.tail_c = 3;
  return evaluate(e);
}

/// The printed closed form: 11/12 (or 11/4) prod_p (1 + 2/p)(1 - 1/p)^2.
inline Interval radical_constant_closed_form(Signature sig, u64 P_max = kDefaultPmax) {
  EulerProductSpec e;
  e.factor = [](u64 p) {
    const long double q = static_cast<long double>(p);
    return (1 + 2 / q) * (1 - 1 / q) * (1 - 1 / q);
  };
  e.model = [](u64 p) {
    const long double q = static_cast<long double>(p);
    const long double t = 1 - 1 / (q * q);
    return t * t * t;
  };
  const long double z2 = std::riemann_zetal(2);
  e.model_value = 1 / (z2 * z2 * z2);
  e.prefactor = sig == Signature::TotallyReal ? 11.0L / 12 : 11.0L / 4;
  e.P_max = P_max;
  e.tail_sigma = 3;
  e.tail_c = 3;
  return evaluate(e);
}

/**
 * Archimedean weight of the X^{5/6} term: 1/sqrt3 for totally real, 1 for a
 * complex pair, their sum for both. This ordering is the one that matches the
 * known secondary terms and our own counts.
 */
inline long double C_infinity(const SignatureSet& s) {
  if (s.empty()) throw std::invalid_argument("infinite-place constraint must be nonempty");
  long double v = 0;
  if (s.count(Signature::TotallyReal)) v += 1 / std::sqrt(3.0L);
  if (s.count(Signature::OneComplexPair)) v += 1;
  return v;
}

/// zeta(2/3) Gamma(1/3) (2 pi)^{1/3} / (10 zeta(2) Gamma(2/3)).
inline long double secondary_prefactor() {
  const long double pi = 3.141592653589793238462643383279502884L;
  return std::riemann_zetal(2.0L / 3) * std::tgammal(1.0L / 3) * std::cbrt(2 * pi) /
         (10 * std::riemann_zetal(2) * std::tgammal(2.0L / 3));
}

namespace detail {

/// A form whose ring is maximal at p with the local invariants of the given row.
inline BinaryCubicForm local_model_form(const LocalAlgebraClass& c) {
  using S = SplittingType;
  if (c.p == 2) {
    switch (c.splitting) {
      case S::S111: return {0, 1, -1, 0};
      case S::S12: return {0, 1, 1, 1};
      case S::S3: return {1, 1, 0, 1};
      case S::S121:
        if (c.d_val == 2) return {0, 1, 0, 1};
        if (c.d_val == 3) return {0, 1, 0, -2};
        break;
      case S::S13:
        if (c.f_val == 1 && c.d_val == 0) return {1, 0, 0, -2};
        break;
    }
  } else if (c.p == 3) {
    switch (c.splitting) {
      case S::S111: return {0, 1, -1, 0};
      case S::S12: return {0, 1, 0, 1};
      case S::S3: return {1, 0, -1, 1};
      case S::S121:
        if (c.d_val == 1) return {0, 1, 0, -3};
        break;
      case S::S13:
        if (c.d_val == 0 && c.f_val == 2) return {1, 0, -3, 1};
        if (c.d_val == 1 && c.f_val == 1) return {1, 0, 3, 3};
        if (c.d_val == 1 && c.f_val == 2) return {1, 0, 0, -3};
        break;
    }
  }
  throw std::runtime_error("no index-integral model at p = " + std::to_string(c.p) + " for " +
                           to_string(c.splitting) + " with d_val " + std::to_string(c.d_val) + ", f_val " +
                           std::to_string(c.f_val));
}

inline bool model_matches(const BinaryCubicForm& f, const LocalAlgebraClass& c) {
  const i128 D = disc_form(f);
  const int want = c.d_val + 2 * c.f_val;
  return is_maximal_at(f, static_cast<i64>(c.p)) && splitting_type(f, static_cast<i64>(c.p)) == c.splitting &&
         valuation(D, c.p) == want;
}

}  // namespace detail

/**
 * int over primitive x in O_K / Z_p of i(x)^{2/3}, with the primitive set given
 * total measure 1.
 */
inline long double class_index_integral(const LocalAlgebraClass& c) {
  const long double q = static_cast<long double>(c.p);
  if (c.p > 3) return index_integral_tame(c.splitting, c.p) / (1 - 1 / (q * q));
  BinaryCubicForm f = detail::local_model_form(c);
  if (!detail::model_matches(f, c)) {
    throw std::runtime_error("index-integral model at p = " + std::to_string(c.p) + " does not match its class");
  }
  return index_integral_exact(f, c.p) / (1 - 1 / (q * q));
}

/// (1 - p^{-1/3}) sum over allowed classes of |d|_p |f|_p^u / |Aut| * J(K).
inline long double L2_factor(const SplittingConstraint& c, u64 p, long double u) {
  const long double q = static_cast<long double>(p);
  long double m = 0;
  for (const auto& k : local_classes(p)) {
    if (!c.allowed(p).count(k.splitting)) continue;
    m += static_cast<long double>(k.multiplicity) / k.aut_order * detail::local_weight(p, k.d_val, k.f_val, u) *
         class_index_integral(k);
  }
  return (1 - std::pow(q, -1.0L / 3)) * m;
}

/**
 * L_2(Sigma, s) = sum_f C_2(Sigma, f) f^-s. Since C_2 carries f^{-1/3}, the
 * local weight is |f|_p^{s + 1/3}. For the full family the factor at p is
 * (1 - p^{-5/3}) at s = 5/3, so L_2(all, 5/3) = C_inf prefactor / zeta(5/3).
 */
inline Interval L2(const SplittingConstraint& c, long double s, u64 P_max = kDefaultPmax) {
  const long double u = s + 1.0L / 3;
  if (!(u > 1.01L)) throw std::domain_error("L2: s must exceed 2/3 + 0.01");
  EulerProductSpec e;
  e.factor = [&](u64 p) { return L2_factor(c, p, u); };
  // zeta(u) / (zeta(5/3) zeta(2) zeta(u + 2/3) zeta(u + 1) zeta(2u))
  e.model = [u](u64 p) {
    const long double q = static_cast<long double>(p);
    return (1 - std::pow(q, -5.0L / 3)) * (1 - 1 / (q * q)) * (1 - std::pow(q, -u - 2.0L / 3)) *
           (1 - std::pow(q, -u - 1)) * (1 - std::pow(q, -2 * u)) / (1 - std::pow(q, -u));
  };
  e.model_value = std::riemann_zetal(u) /
                  (std::riemann_zetal(5.0L / 3) * std::riemann_zetal(2) * std::riemann_zetal(u + 2.0L / 3) *
                   std::riemann_zetal(u + 1) * std::riemann_zetal(2 * u));
  e.prefactor = C_infinity(c.infinity) * secondary_prefactor();
  e.P_max = P_max;
  // what is left is O(p^{-8/3} + p^{-u-5/3} + p^{-2u-2/3})
  e.tail_sigma = std::min({8.0L / 3, u + 5.0L / 3, 2 * u + 2.0L / 3});
  e.tail_c = 8;
  for (u64 p : c.restricted_primes()) e.special.insert(p);
  return evaluate(e);
}

/// C_2(Sigma, f): f-compatible classes only, with the f^{-1/3} weight.
inline Interval C2_of_f(const SplittingConstraint& c, u64 f, u64 P_max = kDefaultPmax) {
  if (!is_admissible_conductor(f)) {
    throw std::invalid_argument("conductor " + std::to_string(f) + " is not squarefree away from 3 with v_3 <= 2");
  }
  EulerProductSpec e;
  auto compatible = [&c, f](u64 p) {
    const int v = valuation(static_cast<i64>(f), p);
    const long double q = static_cast<long double>(p);
    long double m = 0;
    for (const auto& k : local_classes(p)) {
      if (k.f_val != v || !c.allowed(p).count(k.splitting)) continue;
      m += static_cast<long double>(k.multiplicity) / k.aut_order * std::pow(q, -static_cast<long double>(k.d_val)) *
           class_index_integral(k);
    }
    return (1 - std::pow(q, -1.0L / 3)) * m;
  };
  e.factor = compatible;
  e.model = [](u64 p) {
    const long double q = static_cast<long double>(p);
    return (1 - std::pow(q, -5.0L / 3)) * (1 - 1 / (q * q));
  };
  e.model_value = 1 / (std::riemann_zetal(5.0L / 3) * std::riemann_zetal(2));
  e.prefactor = C_infinity(c.infinity) * secondary_prefactor() * std::pow(static_cast<long double>(f), -1.0L / 3);
  e.P_max = P_max;
  e.tail_sigma = 8.0L / 3;
  e.tail_c = 8;
  for (u64 p : c.restricted_primes()) e.special.insert(p);
  for (auto [p, k] : factorize(f)) e.special.insert(p);
  return evaluate(e);
}

}  // namespace cubic
