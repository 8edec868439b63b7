#pragma once
/**
 * @file census.hpp
 * @brief Empirical counts under the orderings |D|^alpha F^beta, rectangles
 * |D| < Y, F < Z and the radical of the discriminant, with the matching
 * predictions, the X^{5/6} regression and independence-of-primes experiments.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cubic/constants.hpp"
#include "cubic/enumerate.hpp"
#include "cubic/index.hpp"
#include "cubic/invariants.hpp"
#include "cubic/localmass.hpp"
#include "cubic/resolvent.hpp"

namespace cubic {

/// Fields with 0 < |disc| < bound().
class FieldSource {
 public:
  virtual ~FieldSource() = default;
  virtual i64 bound() const = 0;
  virtual void for_each(const std::function<void(const CubicFieldRecord&)>& visit) const = 0;

  void require(long double needed, const std::string& what) const {
    if (needed > static_cast<long double>(kMaxEnumerationBound)) {
      throw CapacityError(what + " needs discriminants up to " + std::to_string(static_cast<double>(needed)) +
                          ", beyond the enumerator limit");
    }
    if (static_cast<long double>(bound()) < needed) {
      throw CapacityError(what + " needs a field source bound of at least " +
                          std::to_string(static_cast<i64>(std::ceil(needed))) + ", have " + std::to_string(bound()));
    }
  }
};

/// Streams the enumerator; nothing is stored.
class EnumeratedSource : public FieldSource {
 public:
  explicit EnumeratedSource(i64 bound) : bound_(bound) {}
  i64 bound() const override { return bound_; }
  void for_each(const std::function<void(const CubicFieldRecord&)>& visit) const override {
    for_each_field(bound_, SignFilter::Both, [&](const FieldForm& ff) { visit(make_record(ff)); });
  }

 private:
  i64 bound_;
};

/// Records held in memory, e.g. from the cache.
class RecordSource : public FieldSource {
 public:
  RecordSource(std::vector<CubicFieldRecord> records, i64 bound) : records_(std::move(records)), bound_(bound) {}
  i64 bound() const override { return bound_; }
  void for_each(const std::function<void(const CubicFieldRecord&)>& visit) const override {
    for (const auto& r : records_)
      if (std::llabs(r.disc) < bound_) visit(r);
  }
  const std::vector<CubicFieldRecord>& records() const { return records_; }

 private:
  std::vector<CubicFieldRecord> records_;
  i64 bound_;
};

struct DyadicRatio {
  long double bound;
  i64 count;
  long double predicted;
  long double ratio() const { return predicted != 0 ? count / predicted : 0; }
};

struct CountReport {
  std::string ordering;
  SplittingConstraint constraint;
  std::vector<long double> bounds;
  i64 count = 0;
  Interval predicted;
  std::optional<Interval> secondary;
  std::vector<DyadicRatio> dyadic;  // sub-bounds X / 2^j, j = 0..3
  i64 borderline = 0;
  bool unreliable = false;
  std::vector<std::string> notes;

  long double ratio() const { return predicted.value != 0 ? count / predicted.value : 0; }
};

inline std::string describe(const InvariantExponents& e) {
  std::ostringstream os;
  os << "generalized(alpha=" << e.alpha << ",beta=" << e.beta << ")";
  return os.str();
}

namespace detail {

inline constexpr int kDyadicLevels = 4;
inline constexpr long double kBorderlineLimit = 1e-6L;

inline bool below_rect(const CubicFieldRecord& r, long double Y, long double Z) {
  return std::llabs(r.resolvent_d) < Y && r.conductor_f < Z;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// rectangles

/// Theoretical main terms of N(Sigma; Y, Z): sum_{f<Z} C_1(f) Y and sum_{|d|<Y} Res Phi_d Z.
struct RectMainTerms {
  long double by_conductor = 0;
  long double by_resolvent = 0;
};

inline long double rect_main_by_conductor(const SplittingConstraint& c, long double Y, long double Z) {
  long double s = 0;
  for (u64 f = 1; f < Z; ++f)
    if (is_admissible_conductor(f)) s += C1_of_f(c, f).value;
  return s * Y;
}

/// sum over fundamental |d| < Y of the Z-count predicted by the residue at s = 1.
inline long double rect_main_by_resolvent(const SplittingConstraint& c, long double Y, long double Z,
                                          u64 P_max = 20000) {
  long double s = 0;
  for (i64 d : fundamental_discriminants(static_cast<i64>(std::ceil(Y)), true)) {
    if (std::llabs(d) >= Y) continue;
    PhiResidue r = phi_residue(build_phi(d, c, nullptr), P_max);
    s += Z * (r.double_pole.value * std::log(Z) + r.residue.value - r.double_pole.value);
  }
  return s;
}

inline RectMainTerms rect_main_terms(const SplittingConstraint& c, long double Y, long double Z) {
  return {rect_main_by_conductor(c, Y, Z), rect_main_by_resolvent(c, Y, Z)};
}

/// N(Sigma; Y, Z) = #{K : |D| < Y, F < Z}, predicted C_1(DF; Sigma) Y Z.
inline CountReport count_rect(const SplittingConstraint& c, long double Y, long double Z, const FieldSource& src) {
  if (!(Y > 0) || !(Z > 0)) throw std::invalid_argument("Y and Z must be positive");
  src.require(Y * Z * Z, "count_rect");
  CountReport rep;
  rep.ordering = "rect(Y,Z)";
  rep.constraint = c;
  rep.bounds = {Y, Z};
  std::vector<i64> sub(detail::kDyadicLevels, 0);
  src.for_each([&](const CubicFieldRecord& r) {
    if (!c.admits(r)) return;
    for (int j = 0; j < detail::kDyadicLevels; ++j) {
      const long double s = std::ldexp(1.0L, -j);
      if (detail::below_rect(r, Y * s, Z * s)) ++sub[j];
    }
  });
  const Interval R = residue_L1(c);
  rep.count = sub[0];
  rep.predicted = {R.value * Y * Z, R.error * Y * Z, R.P_max};
  for (int j = 0; j < detail::kDyadicLevels; ++j) {
    const long double s = std::ldexp(1.0L, -j);
    rep.dyadic.push_back({Y * s, sub[j], R.value * Y * Z * s * s});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// generalized discriminants |D|^alpha F^beta

enum class Regime { AlphaBelowBeta, AlphaAboveBeta, Equal };

inline Regime regime(const InvariantExponents& e) {
  if (e.alpha < e.beta) return Regime::AlphaBelowBeta;
  if (e.alpha > e.beta) return Regime::AlphaAboveBeta;
  return Regime::Equal;
}

/**
 * Source bound covering every |Disc| = |D| F^2 with |D|^alpha F^beta < X. The
 * supremum is never attained when integer exponents are compared exactly;
 * otherwise one more unit keeps the borderline fields.
 */
inline long double generalized_ceiling(const InvariantExponents& e, long double X) {
  const long double m = std::max(std::pow(X, 1 / static_cast<long double>(e.alpha)),
                                 std::pow(X, 2 / static_cast<long double>(e.beta)));
  const bool exact = e.alpha_frac && e.beta_frac && e.alpha_frac->second == 1 && e.beta_frac->second == 1;
  return exact ? m : m + 1;
}

struct ResidueSum {
  long double value = 0;
  long double tail = 0;  // estimate of the omitted |d| > d_max
  i64 d_max = 0;
};

/**
 * sum_d [Res Phi_d] / |d|^gamma, gamma = alpha / beta > 1. The d = -3 double
 * pole is handled by the caller. d_max grows until the tail, estimated with
 * the average residue A = Res L_1 as density, is below 1% of the partial sum.
 */
inline ResidueSum residue_sum(const SplittingConstraint& c, long double gamma, u64 P_max = 20000,
                              i64 d_cap = 200000) {
  if (!(gamma > 1)) throw std::domain_error("residue sum needs alpha > beta");
  const long double A = residue_L1(c).value;
  ResidueSum out;
  i64 lo = 1, hi = 1000;
  while (true) {
    for (i64 d : fundamental_discriminants(hi, true)) {
      if (std::llabs(d) < lo || d == -3) continue;
      out.value += phi_residue(build_phi(d, c, nullptr), P_max).residue.value / std::pow(std::fabs(d), gamma);
    }
    out.d_max = hi - 1;
    out.tail = A * std::pow(static_cast<long double>(hi), 1 - gamma) / (gamma - 1);
    if (out.tail < 0.01L * out.value || hi >= d_cap) break;
    lo = hi;
    hi = std::min(hi * 4, d_cap);
  }
  return out;
}

/// Main term of N_I(Sigma; X) by regime; the constants are computed once.
class GeneralizedMainTerm {
 public:
  GeneralizedMainTerm(const SplittingConstraint& c, const InvariantExponents& e) : a_(e.alpha), b_(e.beta) {
    switch (regime(e)) {
      case Regime::AlphaBelowBeta: K_ = L1(c, b_ / a_); break;
      case Regime::Equal: K_ = residue_L1(c); break;
      case Regime::AlphaAboveBeta: {
        ResidueSum S = residue_sum(c, a_ / b_);
        K_ = {S.value, S.tail, 20000};
        r3_ = phi_residue(build_phi(-3, c, nullptr), 20000);
        std::ostringstream os;
        os << "residue sum over |d| <= " << S.d_max << ", tail estimate " << static_cast<double>(S.tail);
        note_ = os.str();
        break;
      }
    }
    regime_ = regime(e);
  }

  Interval operator()(long double X) const {
    switch (regime_) {
      case Regime::AlphaBelowBeta: {
        const long double x = std::pow(X, 1 / a_);
        return {K_.value * x, K_.error * x, K_.P_max};
      }
      case Regime::Equal: {
        const long double x = std::pow(X, 1 / a_) * std::log(X) / a_;
        return {K_.value * x, K_.error * x, K_.P_max};
      }
      case Regime::AlphaAboveBeta: {
        const long double x = std::pow(X, 1 / b_);
        long double v = K_.value * x;
        // d = -3: Z = (X / 3^alpha)^{1/beta}, count G Z log Z + (R - G) Z
        const long double Z3 = std::pow(X / std::pow(3.0L, a_), 1 / b_);
        if (Z3 > 1) v += Z3 * (r3_.double_pole.value * std::log(Z3) + r3_.residue.value - r3_.double_pole.value);
        return {v, K_.error * x, K_.P_max};
      }
    }
    return {};
  }

  const std::string& note() const { return note_; }

 private:
  long double a_, b_;
  Regime regime_ = Regime::Equal;
  Interval K_;
  PhiResidue r3_{};
  std::string note_;
};

inline Interval generalized_main_term(const SplittingConstraint& c, const InvariantExponents& e, long double X) {
  return GeneralizedMainTerm(c, e)(X);
}

/// N_I(Sigma; X) at several bounds from one pass; reports in the order of Xs.
inline std::vector<CountReport> count_generalized_multi(const SplittingConstraint& c, const InvariantExponents& e,
                                                        const std::vector<long double>& Xs, const FieldSource& src) {
  if (Xs.empty()) throw std::invalid_argument("no bounds given");
  long double Xmax = *std::max_element(Xs.begin(), Xs.end());
  src.require(generalized_ceiling(e, Xmax), "count_generalized");
  // every bound and its dyadic sub-bounds
  std::vector<long double> all;
  for (long double X : Xs)
    for (int j = 0; j < detail::kDyadicLevels; ++j) all.push_back(X * std::ldexp(1.0L, -j));
  std::vector<i64> below(all.size(), 0), border(all.size(), 0);
  std::vector<long double> logs(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) logs[i] = std::log(all[i]);
  src.for_each([&](const CubicFieldRecord& r) {
    if (!c.admits(r)) return;
    const long double l = e.alpha * std::log(static_cast<long double>(std::llabs(r.resolvent_d))) +
                          e.beta * std::log(static_cast<long double>(r.conductor_f));
    for (std::size_t i = 0; i < all.size(); ++i) {
      const long double diff = l - logs[i];
      if (std::fabs(diff) <= 1e-12L) {
        // exact test where the exponents are integers
        if (e.alpha_frac && e.beta_frac && e.alpha_frac->second == 1 && e.beta_frac->second == 1) {
          long double v = std::pow(static_cast<long double>(std::llabs(r.resolvent_d)), e.alpha_frac->first) *
                          std::pow(static_cast<long double>(r.conductor_f), e.beta_frac->first);
          if (v < all[i]) ++below[i];
        } else {
          ++border[i];
        }
      } else if (diff < 0) {
        ++below[i];
      }
    }
  });
  std::vector<CountReport> out;
  const GeneralizedMainTerm main(c, e);
  for (std::size_t k = 0; k < Xs.size(); ++k) {
    CountReport rep;
    rep.ordering = describe(e);
    rep.constraint = c;
    rep.bounds = {Xs[k]};
    const std::size_t i0 = k * detail::kDyadicLevels;
    rep.count = below[i0];
    rep.borderline = border[i0];
    rep.predicted = main(Xs[k]);
    for (int j = 0; j < detail::kDyadicLevels; ++j) {
      rep.dyadic.push_back({all[i0 + j], below[i0 + j], main(all[i0 + j]).value});
    }
    if (rep.borderline > 0 &&
        static_cast<long double>(rep.borderline) / (rep.count + rep.borderline) > detail::kBorderlineLimit) {
      rep.unreliable = true;
      rep.notes.push_back("borderline comparisons above 1e-6 of the count");
    }
    if (e.alpha < e.beta && e.beta / e.alpha > 1.4) {
      const long double u = 5 * e.beta / (6 * e.alpha);
      Interval L = L2(c, u);
      const long double x = std::pow(Xs[k], 5 / (6 * e.alpha));
      rep.secondary = Interval{L.value * x, L.error * x, L.P_max};
    }
    if (!main.note().empty()) rep.notes.push_back(main.note());
    out.push_back(std::move(rep));
  }
  return out;
}

inline CountReport count_generalized(const SplittingConstraint& c, const InvariantExponents& e, long double X,
                                     const FieldSource& src) {
  return count_generalized_multi(c, e, {X}, src).front();
}

// ---------------------------------------------------------------------------
// radical ordering

/// Largest |Disc| / rad(Disc)^2 over cubic fields: 2 at p = 2 times 27 at p = 3.
inline constexpr i64 kRadicalDiscFactor = 54;

namespace detail {

/// Fields with rad < X and |Disc| >= E, from the exact Phi_d coefficients.
inline i64 radical_tail(Signature sig, long double X, long double E) {
  // rad(D F^2) >= |D| F / 36, so |D| < 4 X (F = 1 case) and F < 36 X / |D|
  const i64 dmax = static_cast<i64>(std::min(4 * X, 1296 * X * X / E)) + 1;
  const FieldIndex idx(27 * dmax + 1);
  const SplittingConstraint all;
  i64 n = 0;
  for (i64 d : fundamental_discriminants(dmax + 1, true)) {
    if (std::llabs(d) > dmax) continue;
    if ((d > 0) != (sig == Signature::TotallyReal)) continue;
    const long double ad = std::fabs(static_cast<long double>(d));
    const u64 fmin = static_cast<u64>(std::max(1.0L, std::floor(std::sqrt(E / ad)) - 1));
    const u64 fmax = static_cast<u64>(36 * X / ad) + 1;
    if (fmin > fmax) continue;
    std::optional<PhiSeries> S;
    for (u64 f = fmin; f <= fmax; ++f) {
      if (ad * f * f < E) continue;
      if (radical(d * static_cast<i64>(f) * static_cast<i64>(f)) >= X) continue;
      if (!is_admissible_conductor(f)) continue;
      bool possible = true;
      for (auto [p, e] : factorize(f))
        if (p != 3 && (d % static_cast<i64>(p) == 0 || kronecker(-3 * d, static_cast<i64>(p)) != 1)) possible = false;
      if (!possible) continue;
      if (!S) S = build_phi(d, all, idx);
      n += phi_coefficient(*S, f);
    }
  }
  return n;
}

}  // namespace detail

struct RadicalCount {
  i64 enumerated = 0;  // |Disc| below the enumeration ceiling
  i64 tail = 0;        // from Phi coefficients
  i64 total() const { return enumerated + tail; }
};

/**
 * N_C^+(X), N_C^-(X) exactly for each X, from one pass over the source.
 * Fields with |Disc| < src.bound() are counted directly; the rest (|Disc| can
 * reach 54 rad^2) come from the Phi_d coefficients. The source must reach X^2 / 3.
 */
inline std::vector<std::array<RadicalCount, 2>> radical_counts(const std::vector<long double>& Xs,
                                                               const FieldSource& src) {
  if (Xs.empty()) throw std::invalid_argument("no bounds given");
  for (long double X : Xs)
    if (!(X > 0)) throw std::invalid_argument("X must be positive");
  src.require(std::pow(*std::max_element(Xs.begin(), Xs.end()), 2) / 3, "count_radical");
  std::vector<std::array<RadicalCount, 2>> out(Xs.size());
  src.for_each([&](const CubicFieldRecord& r) {
    const long double rad = static_cast<long double>(radical_C(r.disc));
    const int k = r.signature == Signature::TotallyReal ? 0 : 1;
    for (std::size_t i = 0; i < Xs.size(); ++i)
      if (rad < Xs[i]) ++out[i][k].enumerated;
  });
  const long double E = static_cast<long double>(src.bound());
  for (std::size_t i = 0; i < Xs.size(); ++i) {
    if (E > kRadicalDiscFactor * Xs[i] * Xs[i]) continue;
    out[i][0].tail = detail::radical_tail(Signature::TotallyReal, Xs[i], E);
    out[i][1].tail = detail::radical_tail(Signature::OneComplexPair, Xs[i], E);
  }
  return out;
}

inline RadicalCount radical_count(Signature sig, long double X, const FieldSource& src) {
  return radical_counts({X}, src)[0][sig == Signature::TotallyReal ? 0 : 1];
}

inline CountReport radical_report(Signature sig, long double X, const RadicalCount& n, i64 source_bound) {
  CountReport rep;
  rep.ordering = "radical";
  rep.constraint.infinity = {sig};
  rep.bounds = {X};
  rep.count = n.total();
  Interval K = radical_constant(sig);
  const long double xl = X > 1 ? X * std::log(X) : 0;
  rep.predicted = {K.value * xl, K.error * xl, K.P_max};
  std::ostringstream os;
  os << "enumerated " << n.enumerated << " below |disc| " << source_bound << ", " << n.tail
     << " above from conductor series";
  rep.notes.push_back(os.str());
  return rep;
}

inline CountReport count_radical(Signature sig, long double X, const FieldSource& src) {
  return radical_report(sig, X, radical_count(sig, X, src), src.bound());
}

// ---------------------------------------------------------------------------
// secondary term

struct SecondaryFit {
  long double coefficient = 0;
  long double std_error = 0;
  std::optional<Interval> predicted;  // L_2-based
  std::vector<long double> bounds;
  std::vector<i64> counts;
  std::vector<long double> main_terms;
  std::vector<long double> residuals;  // count - main - fit X^{5/(6 alpha)}
  long double max_rel_dev_main = 0;    // at the largest bound
  long double max_rel_dev_fit = 0;
  long double residual_share = 0;  // |residual| / |fitted secondary| at the largest bound
};

inline SecondaryFit fit_secondary(const SplittingConstraint& c, const InvariantExponents& e,
                                  const std::vector<long double>& Xs, const FieldSource& src) {
  if (!(e.beta / e.alpha > 1.4)) {
    throw std::domain_error("the X^{5/6} secondary term is only established for beta/alpha > 7/5");
  }
  if (Xs.size() < 4) throw std::invalid_argument("need at least 4 sample bounds");
  if (!std::is_sorted(Xs.begin(), Xs.end())) throw std::invalid_argument("sample bounds must increase");
  auto reps = count_generalized_multi(c, e, Xs, src);
  SecondaryFit fit;
  fit.bounds = Xs;
  const long double pw = 5 / (6 * static_cast<long double>(e.alpha));
  long double sxy = 0, sxx = 0;
  std::vector<long double> x(Xs.size()), r(Xs.size());
  for (std::size_t i = 0; i < Xs.size(); ++i) {
    fit.counts.push_back(reps[i].count);
    fit.main_terms.push_back(reps[i].predicted.value);
    x[i] = std::pow(Xs[i], pw);
    r[i] = reps[i].count - reps[i].predicted.value;
    sxy += x[i] * r[i];
    sxx += x[i] * x[i];
  }
  fit.coefficient = sxy / sxx;
  long double rss = 0;
  for (std::size_t i = 0; i < Xs.size(); ++i) {
    fit.residuals.push_back(r[i] - fit.coefficient * x[i]);
    rss += fit.residuals.back() * fit.residuals.back();
  }
  fit.std_error = std::sqrt(rss / (Xs.size() - 1) / sxx);
  const std::size_t n = Xs.size() - 1;
  fit.max_rel_dev_main = std::fabs(r[n]) / fit.counts[n];
  fit.max_rel_dev_fit = std::fabs(fit.residuals[n]) / fit.counts[n];
  fit.residual_share = std::fabs(fit.residuals[n]) / std::fabs(fit.coefficient * x[n]);
  Interval L = L2(c, 5 * e.beta / (6 * e.alpha));
  fit.predicted = L;
  return fit;
}

// ---------------------------------------------------------------------------
// independence of primes

struct IndependenceReport {
  u64 p = 0;
  InvariantExponents exponents;
  long double X = 0;
  i64 total = 0;
  std::map<SplittingType, i64> counts;
  std::map<SplittingType, long double> empirical;
  std::map<SplittingType, long double> predicted;  // empty when no product prediction applies
  i64 restricted_total = 0;                        // fields with resolvent_d = restricted_d
  i64 restricted_split = 0;                        // of those, S111 at p
  i64 restricted_d = -3;
};

/**
 * Product densities sigma_p(T) for the ordering: class weights |d|_p |f|_p^{beta/alpha}
 * / |Aut| (alpha <= beta), normalized. No prediction for alpha > beta.
 */
inline std::map<SplittingType, long double> local_densities(u64 p, const InvariantExponents& e) {
  std::map<SplittingType, long double> out;
  if (e.alpha > e.beta) return out;
  const long double s = e.beta / e.alpha;
  long double tot = 0;
  for (const auto& k : local_classes(p)) {
    const long double w = k.multiplicity * detail::local_weight(p, k.d_val, k.f_val, s) / k.aut_order;
    out[k.splitting] += w;
    tot += w;
  }
  for (auto& [t, v] : out) v /= tot;
  return out;
}

inline IndependenceReport independence_report(u64 p, const SplittingConstraint& c, const InvariantExponents& e,
                                              long double X, const FieldSource& src, i64 restricted_d = -3) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  src.require(generalized_ceiling(e, X), "independence_report");
  IndependenceReport rep;
  rep.p = p;
  rep.exponents = e;
  rep.X = X;
  rep.restricted_d = restricted_d;
  const long double lX = std::log(X);
  src.for_each([&](const CubicFieldRecord& r) {
    if (!c.admits(r)) return;
    const long double l = e.alpha * std::log(static_cast<long double>(std::llabs(r.resolvent_d))) +
                          e.beta * std::log(static_cast<long double>(r.conductor_f));
    if (!(l < lX)) return;
    const SplittingType t = splitting_type(r.form, static_cast<i64>(p));
    ++rep.total;
    ++rep.counts[t];
    if (r.resolvent_d == restricted_d) {
      ++rep.restricted_total;
      if (t == SplittingType::S111) ++rep.restricted_split;
    }
  });
  for (auto [t, n] : rep.counts) rep.empirical[t] = rep.total ? static_cast<long double>(n) / rep.total : 0;
  rep.predicted = local_densities(p, e);
  return rep;
}

// ---------------------------------------------------------------------------
// uniformity sanity

/// max over f of f^2 #{K : |Disc| < X, F = f} / X^{1.01}.
inline long double uniformity_diagnostic(long double X, const FieldSource& src) {
  src.require(X, "uniformity_diagnostic");
  std::map<i64, i64> byf;
  src.for_each([&](const CubicFieldRecord& r) {
    if (std::llabs(r.disc) < X) ++byf[r.conductor_f];
  });
  long double m = 0;
  for (auto [f, n] : byf) m = std::max(m, static_cast<long double>(f) * f * n / std::pow(X, 1.01L));
  return m;
}

}  // namespace cubic
