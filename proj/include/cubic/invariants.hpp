#pragma once
/**
 * @file invariants.hpp
 * @brief Disc = D F^2 decomposition, local parts, radical, and D^alpha F^beta.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cubic/arith.hpp"
#include "cubic/enumerate.hpp"
#include "cubic/forms.hpp"

namespace cubic {

enum class Signature { TotallyReal, OneComplexPair };

inline const char* to_string(Signature s) {
  return s == Signature::TotallyReal ? "TotallyReal" : "OneComplexPair";
}

inline Signature parse_signature(const std::string& s) {
  if (s == "TotallyReal") return Signature::TotallyReal;
  if (s == "OneComplexPair") return Signature::OneComplexPair;
  throw std::invalid_argument("unknown signature '" + s + "'");
}

struct Decomposition {
  i64 D;
  i64 F;
};

/// D is the fundamental discriminant in the square class of disc, F = sqrt(disc / D).
inline Decomposition resolvent_decompose(i64 disc) {
  if (disc == 0) throw std::invalid_argument("zero discriminant");
  auto [s, m] = squarefree_decompose(disc);
  i64 D = (((s % 4) + 4) % 4 == 1) ? s : 4 * s;
  if (disc % D != 0) throw IntegrityError("no fundamental discriminant in the square class of " + std::to_string(disc));
  i64 q = disc / D;
  if (q <= 0 || !is_square(static_cast<u64>(q))) {
    throw IntegrityError("no fundamental discriminant in the square class of " + std::to_string(disc));
  }
  return {D, static_cast<i64>(isqrt(static_cast<u64>(q)))};
}

/// Product of the distinct primes dividing |disc|.
inline i64 radical_C(i64 disc) { return static_cast<i64>(radical(disc)); }

struct CubicFieldRecord {
  BinaryCubicForm form;
  i64 disc = 0;
  i64 resolvent_d = 0;
  i64 conductor_f = 0;
  Signature signature = Signature::TotallyReal;

  bool operator==(const CubicFieldRecord&) const = default;
};

inline CubicFieldRecord make_record(const FieldForm& ff) {
  auto [D, F] = resolvent_decompose(ff.disc);
  return {ff.form, ff.disc, D, F, ff.disc > 0 ? Signature::TotallyReal : Signature::OneComplexPair};
}

inline std::vector<CubicFieldRecord> enumerate_records(i64 X, SignFilter sign = SignFilter::Both) {
  std::vector<CubicFieldRecord> out;
  for (const FieldForm& ff : enumerate_fields(X, sign)) out.push_back(make_record(ff));
  return out;
}

struct LocalPart {
  u64 p;
  u64 d_p;  // p^{v_p(D)}
  u64 f_p;  // p^{v_p(F)}
  bool operator==(const LocalPart&) const = default;
};

inline bool is_allowed_local_part(const LocalPart& lp) {
  const u64 p = lp.p, d = lp.d_p, f = lp.f_p;
  auto is = [&](u64 x, u64 y) { return d == x && f == y; };
  if (p == 2) return is(1, 1) || is(4, 1) || is(8, 1) || is(1, 2);
  if (p == 3) return is(1, 1) || is(3, 1) || is(3, 3) || is(1, 9) || is(3, 9);
  return is(1, 1) || is(p, 1) || is(1, p);
}

/// Local parts at every prime dividing D F.
inline std::vector<LocalPart> local_parts(i64 D, i64 F) {
  std::vector<u64> primes;
  for (auto [p, e] : factorize(static_cast<u64>(std::llabs(D)))) primes.push_back(p);
  for (auto [p, e] : factorize(static_cast<u64>(F))) primes.push_back(p);
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  std::vector<LocalPart> out;
  for (u64 p : primes) {
    u64 dp = 1, fp = 1;
    for (int i = valuation(D, p); i > 0; --i) dp *= p;
    for (int i = valuation(F, p); i > 0; --i) fp *= p;
    out.push_back({p, dp, fp});
  }
  return out;
}

struct InvariantExponents {
  double alpha = 1;
  double beta = 2;
  // Exact encodings when given as fractions num/den.
  std::optional<std::pair<i64, i64>> alpha_frac;
  std::optional<std::pair<i64, i64>> beta_frac;

  InvariantExponents() = default;
  InvariantExponents(double a, double b) : alpha(a), beta(b) {
    if (!(a > 0) || !(b > 0)) throw std::invalid_argument("exponents must be positive");
    if (a == std::floor(a) && a < 1e15) alpha_frac = std::make_pair(static_cast<i64>(a), i64{1});
    if (b == std::floor(b) && b < 1e15) beta_frac = std::make_pair(static_cast<i64>(b), i64{1});
  }

  /// Parses "3/2", "1.3" or "2".
  static InvariantExponents parse(const std::string& a, const std::string& b) {
    auto one = [](const std::string& s, std::optional<std::pair<i64, i64>>& frac) {
      auto slash = s.find('/');
      if (slash != std::string::npos) {
        i64 n = std::stoll(s.substr(0, slash)), d = std::stoll(s.substr(slash + 1));
        if (d <= 0) throw std::invalid_argument("bad fraction '" + s + "'");
        frac = std::make_pair(n, d);
        return static_cast<double>(n) / static_cast<double>(d);
      }
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument("bad exponent '" + s + "'");
      if (v == std::floor(v) && std::fabs(v) < 1e15) frac = std::make_pair(static_cast<i64>(v), i64{1});
      return v;
    };
    InvariantExponents e;
    e.alpha = one(a, e.alpha_frac);
    e.beta = one(b, e.beta_frac);
    if (!(e.alpha > 0) || !(e.beta > 0)) throw std::invalid_argument("exponents must be positive");
    return e;
  }

  /// Scaled so that min(alpha, beta) = 1.
  InvariantExponents normalized() const {
    double m = std::min(alpha, beta);
    InvariantExponents e(alpha / m, beta / m);
    if (alpha_frac && beta_frac) {
      // (a/b, c/d) / min -> keep exact when both are fractions
      auto [an, ad] = *alpha_frac;
      auto [bn, bd] = *beta_frac;
      bool a_min = alpha <= beta;
      i64 mn = a_min ? an : bn, md = a_min ? ad : bd;
      auto reduce_frac = [](i64 n, i64 d) {
        i64 g = gcd(n, d);
        return std::make_pair(n / g, d / g);
      };
      e.alpha_frac = reduce_frac(an * md, ad * mn);
      e.beta_frac = reduce_frac(bn * md, bd * mn);
    }
    return e;
  }
};

/// |D|^alpha F^beta.
inline long double generalized_disc(i64 D, i64 F, const InvariantExponents& e) {
  long double l = e.alpha * std::log(static_cast<long double>(std::llabs(D))) +
                  e.beta * std::log(static_cast<long double>(F));
  return std::exp(l);
}

enum class Compare { Below, Above, Borderline };

inline const char* to_string(Compare c) {
  switch (c) {
    case Compare::Below: return "below";
    case Compare::Above: return "above";
    case Compare::Borderline: return "borderline";
  }
  return "?";
}

/// Three-valued comparison of |D|^alpha F^beta with X; borderline within relative 1e-12.
inline Compare compare_generalized(i64 D, i64 F, const InvariantExponents& e, long double X) {
  long double l = e.alpha * std::log(static_cast<long double>(std::llabs(D))) +
                  e.beta * std::log(static_cast<long double>(F));
  long double diff = l - std::log(X);
  if (std::fabs(diff) <= 1e-12L) return Compare::Borderline;
  return diff < 0 ? Compare::Below : Compare::Above;
}

/// (alpha, beta) = c1 (1, 2) + c2 (1, 0).
inline std::pair<i64, i64> conductor_exponents(i64 c1, i64 c2) {
  if (c1 < 1) throw std::invalid_argument("c1 must be at least 1: the representation must contain the standard one");
  if (c2 < 0) throw std::invalid_argument("c2 must be nonnegative");
  return {c1 + c2, 2 * c1};
}

}  // namespace cubic
