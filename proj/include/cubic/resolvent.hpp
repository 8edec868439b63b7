#pragma once
/**
 * @file resolvent.hpp
 * @brief Explicit Dirichlet series Phi_{Sigma,d}(s) = sum over cubic fields K
 * with quadratic resolvent Q(sqrt d) of f(K)^-s, with splitting conditions.
 *
 *   c_d 3^{w(P)} Phi = 1/2 M_1(s) prod_{p not | P} (1 + (1 + (-3d/p)) p^-s)
 *                    + sum_{E in L_3(P, d)} M_{2,E}(s) prod_{p != 3, p not | P} (1 + w_E(p) p^-s)
 *
 * Conventions fixed by comparison with enumeration:
 *  - the right side also counts the trivial algebra Q + Q(sqrt d) with weight 1/2
 *    at f = 1, which is subtracted;
 *  - the main-term factor is 1 at p | 3d (the 3-part lives in M_1);
 *  - w_E(p) = 0 when p ramifies in E.
 */

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubic/arith.hpp"
#include "cubic/constants.hpp"
#include "cubic/enumerate.hpp"
#include "cubic/forms.hpp"
#include "cubic/invariants.hpp"
#include "cubic/localmass.hpp"
#include "cubic/rational.hpp"

namespace cubic {

/// n -> (m / n).
struct QuadChar {
  i64 m;
  int operator()(i64 n) const { return kronecker(m, n); }
};

/// Cubic fields by exact discriminant, from one enumeration run.
class FieldIndex {
 public:
  explicit FieldIndex(i64 bound) : bound_(bound) {
    for (const FieldForm& ff : enumerate_fields(bound)) by_disc_[ff.disc].push_back(make_record(ff));
  }

  i64 bound() const { return bound_; }

  const std::vector<CubicFieldRecord>& with_disc(i64 disc) const {
    static const std::vector<CubicFieldRecord> none;
    if (std::llabs(disc) >= bound_) {
      throw CapacityError("field index bound " + std::to_string(bound_) + " too small: need |disc| " +
                          std::to_string(std::llabs(disc)) + ", i.e. a bound of at least " +
                          std::to_string(std::llabs(disc) + 1));
    }
    auto it = by_disc_.find(disc);
    return it == by_disc_.end() ? none : it->second;
  }

  template <class F>
  void for_each(F&& f) const {
    for (const auto& [disc, v] : by_disc_)
      for (const auto& r : v) f(r);
  }

 private:
  i64 bound_;
  std::map<i64, std::vector<CubicFieldRecord>> by_disc_;
};

enum class MirrorRole { MinusDOver3, Minus3D, Minus27D };

inline const char* to_string(MirrorRole r) {
  switch (r) {
    case MirrorRole::MinusDOver3: return "-d/3";
    case MirrorRole::Minus3D: return "-3d";
    case MirrorRole::Minus27D: return "-27d";
  }
  return "?";
}

struct MirrorField {
  CubicFieldRecord E;
  MirrorRole role;
  i64 k;  // disc(E) = role disc * k^2
};

/// 2, 0, -1 for totally split, partially split, inert; p must be unramified in E.
inline int omega_E(const CubicFieldRecord& E, u64 p) {
  if (E.disc % static_cast<i64>(p) == 0) {
    throw std::invalid_argument("omega_E undefined: " + std::to_string(p) + " divides Disc(E) = " +
                                std::to_string(E.disc));
  }
  switch (splitting_type(E.form, static_cast<i64>(p))) {
    case SplittingType::S111: return 2;
    case SplittingType::S12: return 0;
    case SplittingType::S3: return -1;
    default: break;
  }
  throw IntegrityError("unramified prime with ramified splitting type");
}

/// c_0 + c_1 3^-s + c_2 3^-2s.
struct ThreeFactor {
  std::array<i64, 3> c{1, 0, 0};
  long double operator()(long double s) const {
    return c[0] + c[1] * std::pow(3.0L, -s) + c[2] * std::pow(3.0L, -2 * s);
  }
  /// d/ds at s.
  long double derivative(long double s) const {
    const long double l3 = std::log(3.0L);
    return -l3 * c[1] * std::pow(3.0L, -s) - 2 * l3 * c[2] * std::pow(3.0L, -2 * s);
  }
};

enum class MRole { Main, MinusDOver3, Minus3D, Minus27D };

/// The 3-Euler factors M_{1,d} and M_{2,E}; omega3 is w_E(3), needed for d = 6 mod 9, role -d/3.
inline ThreeFactor m_factor(i64 d, MRole role, int omega3 = 0) {
  if (!is_fundamental_discriminant(d)) throw std::invalid_argument(std::to_string(d) + " is not fundamental");
  const bool three = d % 3 == 0;
  if (role == MRole::MinusDOver3 && !three) throw std::invalid_argument("role -d/3 needs 3 | d");
  if (role == MRole::Minus3D && three) throw std::invalid_argument("role -3d needs 3 not dividing d");
  const i64 r9 = ((d % 9) + 9) % 9;
  if (!three) {
    if (role == MRole::Minus27D) return {{1, 0, -1}};
    return {{1, 0, 2}};
  }
  if (role == MRole::Minus27D) return {{1, -1, 0}};
  if (r9 == 3) return {{1, 2, 0}};
  if (role == MRole::Main) return {{1, 2, 6}};
  return {{1, 2, 3 * omega3}};
}

inline long double m_factors(i64 d, MRole role, long double s, int omega3 = 0) {
  return m_factor(d, role, omega3)(s);
}

inline i64 c_d(i64 d) { return (d == 1 || d < -3) ? 1 : 3; }

/// How one prime enters a basic series.
enum class PrimeRule {
  Split,      // completely split: factor removed, 3^w and the enlarged mirror list
  KeepConst,  // only f prime to p
  DropConst,  // only f divisible by p
};

/// One series of the shape of the explicit formula, with a sign.
struct BasicPhi {
  int sign = 1;
  std::map<u64, PrimeRule> rules;
  std::vector<MirrorField> mirrors;
  u64 P = 1;  // product of Split primes
  bool vanishes = false;
};

struct PhiSeries {
  i64 d = 1;
  SplittingConstraint constraint;
  i64 c = 1;
  std::vector<BasicPhi> terms;
  bool vanishing = false;
  bool has_mirrors = true;  // false when built without a field index (residues only)
  std::vector<std::string> anomalies;
};

namespace detail {

inline std::vector<i64> squarefree_divisors(const std::vector<u64>& primes) {
  std::vector<i64> ks{1};
  for (u64 p : primes) {
    std::size_t n = ks.size();
    for (std::size_t i = 0; i < n; ++i) ks.push_back(ks[i] * static_cast<i64>(p));
  }
  return ks;
}

inline void fill_mirrors(BasicPhi& b, i64 d, const FieldIndex& idx, std::vector<std::string>& anomalies) {
  std::vector<u64> split;
  for (const auto& [p, r] : b.rules)
    if (r == PrimeRule::Split) split.push_back(p);
  b.P = 1;
  for (u64 p : split) b.P *= p;
  const bool three = d % 3 == 0;
  for (i64 k : squarefree_divisors(split)) {
    std::vector<std::pair<MirrorRole, i64>> discs;
    if (three) discs.push_back({MirrorRole::MinusDOver3, -k * k * d / 3});
    else discs.push_back({MirrorRole::Minus3D, -3 * k * k * d});
    discs.push_back({MirrorRole::Minus27D, -27 * k * k * d});
    for (auto [role, disc] : discs) {
      for (const auto& E : idx.with_disc(disc)) {
        b.mirrors.push_back({E, role, k});
        if (role == MirrorRole::MinusDOver3 && ((d % 9) + 9) % 9 == 6 && E.disc % 3 == 0) {
          anomalies.push_back("w_E(3) undefined for mirror field of disc " + std::to_string(E.disc));
        }
      }
    }
  }
}

}  // namespace detail

/// Discriminant bound the field index needs for (d, constraint).
inline i64 mirror_bound(i64 d, const SplittingConstraint& c) {
  i64 k = 1;
  for (u64 p : c.restricted_primes()) k *= static_cast<i64>(p);
  return 27 * k * k * std::llabs(d) + 1;
}

/**
 * Builds Phi_{Sigma,d}. Per restricted prime p and allowed type:
 *   111: needs (d/p) = 1, explicit formula with p in P;
 *   12:  needs (d/p) = -1, p-factors removed;
 *   121: needs p | d, only f prime to p;
 *   13:  only f divisible by p, and needs (-3d/p) = 1 for p != 3;
 *   3:   needs (d/p) = 1, (unramified at p) - (111 at p).
 * Several allowed types at one prime add up; several primes multiply out.
 */
inline PhiSeries build_phi(i64 d, const SplittingConstraint& c, const FieldIndex* idx) {
  if (!is_fundamental_discriminant(d)) throw std::invalid_argument(std::to_string(d) + " is not fundamental");
  PhiSeries S;
  S.d = d;
  S.constraint = c;
  S.c = c_d(d);
  const Signature sig = d > 0 ? Signature::TotallyReal : Signature::OneComplexPair;
  if (!c.infinity.count(sig)) {
    S.vanishing = true;
    return S;
  }
  if (idx && idx->bound() < mirror_bound(d, c)) {
    throw CapacityError("field index bound " + std::to_string(idx->bound()) + " too small for d = " +
                        std::to_string(d) + ": need " + std::to_string(mirror_bound(d, c)));
  }
  std::vector<BasicPhi> terms{BasicPhi{}};
  for (u64 p : c.restricted_primes()) {
    const int chi = kronecker(d, static_cast<i64>(p));
    std::vector<BasicPhi> next;
    for (const BasicPhi& t : terms) {
      for (SplittingType type : c.allowed(p)) {
        auto with = [&](PrimeRule r, int sign) {
          BasicPhi b = t;
          b.rules[p] = r;
          b.sign *= sign;
          next.push_back(b);
        };
        switch (type) {
          case SplittingType::S111:
            if (chi == 1) with(PrimeRule::Split, 1);
            break;
          case SplittingType::S12:
            if (chi == -1) with(PrimeRule::KeepConst, 1);
            break;
          case SplittingType::S121:
            if (chi == 0) with(PrimeRule::KeepConst, 1);
            break;
          case SplittingType::S13:
            // tame total ramification needs cube roots of unity locally
            if (p == 3 || kronecker(-3 * d, static_cast<i64>(p)) == 1) with(PrimeRule::DropConst, 1);
            break;
          case SplittingType::S3:
            if (chi == 1) {
              with(PrimeRule::KeepConst, 1);
              with(PrimeRule::Split, -1);
            }
            break;
        }
      }
    }
    terms = std::move(next);
  }
  if (terms.empty()) {
    S.vanishing = true;
    return S;
  }
  if (idx) {
    for (BasicPhi& b : terms) detail::fill_mirrors(b, d, *idx, S.anomalies);
  } else {
    for (BasicPhi& b : terms) {
      b.P = 1;
      for (const auto& [p, r] : b.rules)
        if (r == PrimeRule::Split) b.P *= p;
    }
    S.has_mirrors = false;
  }
  S.terms = std::move(terms);
  return S;
}

inline PhiSeries build_phi(i64 d, const SplittingConstraint& c, const FieldIndex& idx) { return build_phi(d, c, &idx); }

namespace detail {

inline Rational basic_coefficient(const BasicPhi& b, i64 d, i64 cd, u64 f) {
  // f = 3^a m, m squarefree and prime to 3
  int a = 0;
  u64 m = f;
  while (m % 3 == 0) {
    m /= 3;
    ++a;
  }
  if (a > 2) return 0;
  auto fac = factorize(m);
  for (auto [p, e] : fac)
    if (e > 1) return 0;
  auto rule = [&](u64 p) -> const PrimeRule* {
    auto it = b.rules.find(p);
    return it == b.rules.end() ? nullptr : &it->second;
  };
  // local restrictions
  for (const auto& [p, r] : b.rules) {
    const bool divides = p == 3 ? a > 0 : m % p == 0;
    if (r == PrimeRule::Split && divides) return 0;
    if (r == PrimeRule::KeepConst && divides) return 0;
    if (r == PrimeRule::DropConst && !divides) return 0;
  }
  i64 total = 0;  // twice the right-hand side
  // main term
  {
    ThreeFactor M1 = m_factor(d, MRole::Main);
    i64 v = M1.c[a];
    for (auto [p, e] : fac) {
      if (v == 0) break;
      if (d % static_cast<i64>(p) == 0) {
        v = 0;
        break;
      }
      v *= 1 + kronecker(-3 * d, static_cast<i64>(p));
    }
    total += v;
  }
  for (const MirrorField& E : b.mirrors) {
    int w3 = 0;
    MRole role = E.role == MirrorRole::MinusDOver3 ? MRole::MinusDOver3
                 : E.role == MirrorRole::Minus3D   ? MRole::Minus3D
                                                   : MRole::Minus27D;
    if (role == MRole::MinusDOver3 && ((d % 9) + 9) % 9 == 6 && E.E.disc % 3 != 0) w3 = omega_E(E.E, 3);
    i64 v = m_factor(d, role, w3).c[a];
    for (auto [p, e] : fac) {
      if (v == 0) break;
      const PrimeRule* r = rule(p);
      if (r && *r == PrimeRule::Split) {
        v = 0;
        break;
      }
      v *= E.E.disc % static_cast<i64>(p) == 0 ? 0 : omega_E(E.E, p);
    }
    total += 2 * v;
  }
  i64 w = 0;
  for (const auto& [p, r] : b.rules)
    if (r == PrimeRule::Split) ++w;
  i64 norm = cd;
  for (i64 i = 0; i < w; ++i) norm *= 3;
  Rational coef(total, 2 * norm);
  // the trivial algebra Q + Q(sqrt d), weight 1/2 at f = 1
  if (f == 1) coef = coef - Rational(1, 2);
  return coef;
}

}  // namespace detail

/// Coefficient of f^-s: the number of fields with resolvent d, conductor f and the constraint.
inline i64 phi_coefficient(const PhiSeries& S, u64 f) {
  if (f < 1) throw std::invalid_argument("conductor must be positive");
  if (S.vanishing) return 0;
  if (!S.has_mirrors) throw std::logic_error("series built without a field index has no coefficients");
  Rational sum;
  for (const BasicPhi& b : S.terms) sum += Rational(b.sign) * detail::basic_coefficient(b, S.d, S.c, f);
  if (sum.den() != 1 || sum.num() < 0) {
    std::ostringstream os;
    os << "coefficient " << sum << " at f = " << f << " for d = " << S.d << " is not a nonnegative integer";
    throw IntegrityError(os.str());
  }
  return static_cast<i64>(sum.num());
}

/// Coefficients a_f, f = 0..Zmax (a_0 unused).
inline std::vector<i64> phi_coefficients(const PhiSeries& S, u64 Zmax) {
  if (Zmax < 1) throw std::invalid_argument("Zmax must be at least 1");
  std::vector<i64> out(Zmax + 1, 0);
  for (u64 f = 1; f <= Zmax; ++f) out[f] = phi_coefficient(S, f);
  return out;
}

/// L(1, chi_m) for a fundamental discriminant m != 1 by the finite class-number sums.
inline long double l_one(i64 m) {
  if (m == 1 || !is_fundamental_discriminant(m)) throw std::invalid_argument("l_one needs a nontrivial fundamental discriminant");
  if (std::llabs(m) > 1000000) throw CapacityError("l_one: |m| above 10^6");
  const long double pi = 3.141592653589793238462643383279502884L;
  if (m < 0) {
    const i64 n = -m;
    i64 s = 0;  // exact
    for (i64 a = 1; a < n; ++a) s += kronecker(m, a) * a;
    return -pi * static_cast<long double>(s) / std::pow(static_cast<long double>(n), 1.5L);
  }
  long double s = 0;
  for (i64 a = 1; a < m; ++a) {
    int x = kronecker(m, a);
    if (x) s += x * std::log(std::sin(pi * a / m));
  }
  return -s / std::sqrt(static_cast<long double>(m));
}

struct PhiResidue {
  Interval residue;      // coefficient of 1/(s-1)
  Interval double_pole;  // coefficient of 1/(s-1)^2, zero unless d = -3
};

/**
 * Residue at s = 1 of the main term (c_d 3^w)^-1 1/2 M_1(s) prod(...), summed
 * over the basic series. For chi = (-3d/.) nontrivial the product is
 * zeta(s) L(s, chi_0) H(s); for d = -3 it is zeta(s)^2 H(s).
 */
inline PhiResidue phi_residue(const PhiSeries& S, u64 P_max = kDefaultPmax) {
  PhiResidue out{{0, 0, P_max}, {0, 0, P_max}};
  if (S.vanishing) return out;
  const i64 m0 = resolvent_decompose(-3 * S.d).D;
  const bool doubled = m0 == 1;
  const long double L1chi = doubled ? 0 : l_one(m0);
  const auto& primes = detail::primes_cached(P_max);
  const long double gamma = 0.577215664901532860606512090082402431L;
  for (const BasicPhi& b : S.terms) {
    ThreeFactor M1 = m_factor(S.d, MRole::Main);
    long double M = M1(1), dM = M1.derivative(1);
    auto it3 = b.rules.find(3);
    if (it3 != b.rules.end()) {
      if (it3->second == PrimeRule::DropConst) {
        M -= M1.c[0];
      } else {
        M = M1.c[0];
        dM = 0;
      }
    }
    // H(1) and (for d = -3) H'(1)/H(1) over p != 3
    long double H = 1, dlogH = 0;
    auto local = [&](u64 p) {
      const long double q = static_cast<long double>(p);
      const int chi0 = doubled ? 1 : kronecker(m0, static_cast<i64>(p));
      const int chi = kronecker(-3 * S.d, static_cast<i64>(p));
      long double F = 1 + (1 + chi) / q, dF = -std::log(q) * (1 + chi) / q;
      auto r = b.rules.find(p);
      if (r != b.rules.end()) {
        if (r->second == PrimeRule::DropConst) F -= 1;
        else {
          F = 1;
          dF = 0;
        }
      }
      if (chi == 0 && (r == b.rules.end() || r->second != PrimeRule::DropConst)) {
        F = 1;
        dF = 0;
      } else if (chi == 0) {
        F = 0;
        dF = 0;
      }
      long double z = 1 - 1 / q, l = 1 - chi0 / q;
      H *= F * z * l;
      if (doubled && F != 0) {
        // d/ds log[(1 - p^-s)(1 - p^-s)] = 2 log p p^-s / (1 - p^-s)
        dlogH += dF / F + 2 * std::log(q) / q / z;
      }
    };
    for (u64 p : primes) {
      if (p > P_max) break;
      if (p == 3) continue;
      local(p);
    }
    for (const auto& [p, r] : b.rules)
      if (p > P_max && p != 3) local(p);
    // at p = 3 only the zeta and L local factors remain
    {
      const long double q = 3;
      const int chi0 = doubled ? 1 : kronecker(m0, 3);
      H *= (1 - 1 / q) * (1 - chi0 / q);
      if (doubled) dlogH += 2 * std::log(q) / q / (1 - 1 / q);
    }
    i64 w = 0;
    for (const auto& [p, r] : b.rules)
      if (r == PrimeRule::Split) ++w;
    long double norm = 2.0L * S.c * std::pow(3.0L, static_cast<long double>(w));
    const long double P = static_cast<long double>(P_max);
    // |H_p - 1| <= 3 / p^2
    const long double tail = std::expm1(6 / P);
    if (!doubled) {
      long double v = b.sign * M * L1chi * H / norm;
      out.residue.value += v;
      out.residue.error += std::fabs(v) * (tail + 1e-15L);
    } else {
      long double G = M * H / norm;
      long double dG = (dM / (M == 0 ? 1 : M) + dlogH) * G;
      if (M == 0) dG = dM * H / norm;
      long double v = b.sign * (dG + 2 * gamma * G);
      out.double_pole.value += b.sign * G;
      out.double_pole.error += std::fabs(G) * (tail + 1e-15L);
      out.residue.value += v;
      // the log-derivative tail is at most 8 (log P + 1) / P
      out.residue.error += std::fabs(G) * 8 * (std::log(P) + 1) / P + std::fabs(v) * tail;
    }
  }
  return out;
}

}  // namespace cubic
