#include <gtest/gtest.h>

#include <cmath>

#include "cubic/constants.hpp"

using namespace cubic;

namespace {

SplittingConstraint only(Signature s) {
  SplittingConstraint c;
  c.infinity = {s};
  return c;
}

// mpmath, 30 digits
constexpr long double kDHPlus = 0.0693256143817256223902605232351L;   // 1/(12 zeta(3))
constexpr long double kDHMinus = 0.207976843145176867170781569705L;   // 1/(4 zeta(3))
constexpr long double kPrefactor = -0.543193726054434967594124815631L;
constexpr long double kSecondaryPlus = -0.147685261030334860476410210397L;   // 4 zeta(1/3) / (5 Gamma(2/3)^3 zeta(5/3))
constexpr long double kSecondaryMinus = -0.255798375633611938157230046318L;  // sqrt3 times the above
constexpr long double kProdFrom5 = 0.774218056773092470212158280335L;        // prod_{p>=5} (1+2/p)(1-1/p)^2

}  // namespace

TEST(L1, DiscriminantOrderingConstants) {
  Interval plus = L1(only(Signature::TotallyReal), 2);
  Interval minus = L1(only(Signature::OneComplexPair), 2);
  EXPECT_NEAR(static_cast<double>(plus.value), static_cast<double>(kDHPlus), 1e-10);
  EXPECT_NEAR(static_cast<double>(minus.value), static_cast<double>(kDHMinus), 1e-10);
  EXPECT_TRUE(plus.contains(kDHPlus));
  EXPECT_TRUE(minus.contains(kDHMinus));
}

TEST(L1, LocalFactors) {
  SplittingConstraint all;
  for (u64 p : {5, 7, 11, 13}) {
    long double q = p;
    long double want = (1 - 1 / q) * (1 + 1 / q + std::pow(q, -4.0L / 3));
    EXPECT_NEAR(static_cast<double>(L1_factor(all, p, 4.0L / 3)), static_cast<double>(want), 1e-12) << p;
  }
  EXPECT_NEAR(static_cast<double>(L1_factor(all, 7, 2)), (1 - 1 / 7.0) * (1 + 1 / 7.0 + 1 / 49.0), 1e-15);
  for (u64 p : {5, 7, 101}) {
    long double q = p;
    EXPECT_NEAR(static_cast<double>(L1_factor(all, p, 80)), static_cast<double>(1 - 1 / (q * q)), 1e-15);
  }
  // p = 2, 3 at s = 2: (1/2)(1 + 1/4 + 1/4 + 1/4) and 1 - 1/27
  EXPECT_NEAR(static_cast<double>(L1_factor(all, 2, 2)), 7.0 / 8, 1e-15);
  EXPECT_NEAR(static_cast<double>(L1_factor(all, 3, 2)), 26.0 / 27, 1e-15);
}

TEST(L1, RejectsPoleRegion) {
  SplittingConstraint all;
  EXPECT_THROW(L1(all, 1.0L), std::domain_error);
  EXPECT_THROW(L1(all, 1.005L), std::domain_error);
  EXPECT_THROW(L1(all, 0.5L), std::domain_error);
  EXPECT_NO_THROW(L1(all, 1.02L));
}

TEST(C1, Examples) {
  SplittingConstraint all;
  // f = 1: every factor is 1 - 1/p^2
  Interval c1 = C1_of_f(only(Signature::TotallyReal), 1);
  EXPECT_NEAR(static_cast<double>(c1.value), static_cast<double>(1 / (12 * std::riemann_zetal(2))), 1e-15);
  // f = 6: 2-part (1/2)*1 and 3-part (2/3)*(2/3), both over (1 - 1/p^2)
  Interval c6 = C1_of_f(all, 6);
  long double want = (1.0L / 3) * (0.5L / 0.75L) * ((4.0L / 9) / (8.0L / 9)) / std::riemann_zetal(2);
  EXPECT_NEAR(static_cast<double>(c6.value), static_cast<double>(want), 1e-15);
  // p > 3 dividing f: (1 - 1/p) in place of 1 - 1/p^2
  Interval c5 = C1_of_f(all, 5);
  EXPECT_NEAR(static_cast<double>(c5.value / C1_of_f(all, 1).value), 1 / (1 + 1 / 5.0), 1e-15);
  EXPECT_THROW(C1_of_f(all, 4), std::invalid_argument);
  EXPECT_THROW(C1_of_f(all, 27), std::invalid_argument);
  EXPECT_THROW(C1_of_f(all, 50), std::invalid_argument);
  EXPECT_NO_THROW(C1_of_f(all, 9));
  EXPECT_NO_THROW(C1_of_f(all, 18));
}

TEST(C1, SeriesMatchesProduct) {
  const u64 F0 = 10000;
  for (Signature sig : {Signature::TotallyReal, Signature::OneComplexPair}) {
    SplittingConstraint c = only(sig);
    std::vector<long double> C(F0 + 1, 0);
    long double cmax = 0;
    for (u64 f = 1; f <= F0; ++f) {
      if (!is_admissible_conductor(f)) continue;
      C[f] = C1_of_f(c, f).value;
      cmax = std::max(cmax, C[f]);
    }
    ASSERT_LT(cmax, 1.0L);
    for (long double s : {1.5L, 2.0L, 3.0L}) {
      long double partial = 0;
      for (u64 f = 1; f <= F0; ++f) partial += C[f] * std::pow(static_cast<long double>(f), -s);
      Interval full = L1(c, s);
      // remaining terms are positive and at most cmax sum_{f > F0} f^-s
      long double tail = cmax * std::pow(static_cast<long double>(F0), 1 - s) / (s - 1);
      EXPECT_GE(full.value + full.error, partial) << static_cast<double>(s);
      EXPECT_LE(full.value - full.error, partial + tail) << static_cast<double>(s);
    }
  }
}

TEST(C1, SeriesMatchesProductUnderConstraint) {
  SplittingConstraint c;
  c.add("7:111");
  c.add("5:12,3");
  const u64 F0 = 20000;
  long double partial = 0, cmax = 0;
  for (u64 f = 1; f <= F0; ++f) {
    if (!is_admissible_conductor(f)) continue;
    long double v = C1_of_f(c, f).value;
    cmax = std::max(cmax, v);
    partial += v / (static_cast<long double>(f) * f * f);
  }
  Interval full = L1(c, 3);
  EXPECT_GE(full.value + full.error, partial);
  EXPECT_LE(full.value - full.error, partial + cmax / (2.0L * F0 * F0));
}

TEST(Constants, TruncationStable) {
  SplittingConstraint all, c;
  c.add("5:111");
  auto check = [](Interval a, Interval b, const char* what) {
    EXPECT_LT(std::fabs(a.value - b.value), a.error) << what;
    EXPECT_LT(b.error, a.error) << what;
  };
  check(L1(all, 1.5L, 10000), L1(all, 1.5L, 100000), "L1 1.5");
  check(L1(c, 2, 10000), L1(c, 2, 100000), "L1 constrained");
  check(residue_L1(all, 10000), residue_L1(all, 100000), "residue");
  check(radical_constant(Signature::TotallyReal, 10000), radical_constant(Signature::TotallyReal, 100000), "radical");
  check(L2(all, 5.0L / 3, 10000), L2(all, 5.0L / 3, 100000), "L2");
  check(C2_of_f(all, 6, 10000), C2_of_f(all, 6, 100000), "C2");
}

TEST(Constants, TailBoundsHold) {
  // the declared c p^-sigma bound on each corrected factor
  SplittingConstraint all;
  for (u64 p : primes_up_to(20000)) {
    if (p < 5) continue;
    long double q = p;
    for (long double s : {1.02L, 1.5L, 2.0L, 4.0L}) {
      long double r = L1_factor(all, p, s) * (1 - std::pow(q, -s)) / (1 - 1 / (q * q));
      ASSERT_LE(std::fabs(r - 1), 2 * std::pow(q, -std::min(s + 1, 2 * s)) + 1e-17L) << p;
    }
    long double t3 = std::pow(1 - 1 / (q * q), 3);
    ASSERT_LE(std::fabs((1 - 1 / q) * L1_factor(all, p, 1) / t3 - 1), 3 / (q * q * q) + 1e-17L) << p;
    for (long double s : {0.7L, 1.0L, 5.0L / 3, 3.0L}) {
      long double u = s + 1.0L / 3;
      long double model = (1 - std::pow(q, -5.0L / 3)) * (1 - 1 / (q * q)) * (1 - std::pow(q, -u - 2.0L / 3)) *
                          (1 - std::pow(q, -u - 1)) * (1 - std::pow(q, -2 * u)) / (1 - std::pow(q, -u));
      long double r = L2_factor(all, p, u) / model;
      ASSERT_LE(std::fabs(r - 1), 8 * std::pow(q, -std::min({8.0L / 3, u + 5.0L / 3, 2 * u + 2.0L / 3})) + 1e-17L)
          << p;
    }
  }
}

TEST(Residue, LocalFactors) {
  SplittingConstraint all;
  EXPECT_NEAR(static_cast<double>((1 - 1 / 5.0L) * L1_factor(all, 5, 1)), 112.0 / 125, 1e-15);
  SplittingConstraint split;
  split.add("5:111");
  EXPECT_NEAR(static_cast<double>((1 - 1 / 5.0L) * L1_factor(split, 5, 1)), (1.0 / 6) * 0.8 * 0.8, 1e-15);
  // restricting at 5 only changes the factor at 5
  long double ratio = residue_L1(split).value / residue_L1(all).value;
  EXPECT_NEAR(static_cast<double>(ratio), (1.0 / 6) / (7.0 / 5), 1e-12);
}

TEST(Radical, LocalConstants) {
  EXPECT_EQ(radical_local_constant(2), Rational(3));
  EXPECT_EQ(radical_local_constant(3), Rational(11, 3));
  EXPECT_EQ(radical_local_constant(7), Rational(9, 7));
  for (u64 p : {5, 11, 13, 97}) EXPECT_EQ(radical_local_constant(p), Rational(p + 2, p));
}

TEST(Radical, Constants) {
  Interval plus = radical_constant(Signature::TotallyReal);
  Interval minus = radical_constant(Signature::OneComplexPair);
  EXPECT_NEAR(static_cast<double>(plus.value / minus.value), 1.0 / 3, 1e-15);
  // (1/12) * 3/4 * (11/3)(4/9) * prod_{p>=5}
  EXPECT_NEAR(static_cast<double>(plus.value), static_cast<double>(11.0L / 108 * kProdFrom5), 1e-12);
  EXPECT_LT(plus.error, 1e-10L);
  // the printed closed form is 10/3 times the mass product
  Interval closed = radical_constant_closed_form(Signature::TotallyReal);
  EXPECT_NEAR(static_cast<double>(closed.value / plus.value), 10.0 / 3, 1e-12);
}

TEST(L2, Archimedean) {
  EXPECT_NEAR(static_cast<double>(C_infinity({Signature::TotallyReal})), 1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(static_cast<double>(C_infinity({Signature::OneComplexPair})), 1.0, 1e-15);
  EXPECT_NEAR(static_cast<double>(C_infinity({Signature::TotallyReal, Signature::OneComplexPair})),
              1 + 1 / std::sqrt(3.0), 1e-15);
  EXPECT_THROW(C_infinity({}), std::invalid_argument);
  EXPECT_NEAR(static_cast<double>(secondary_prefactor()), static_cast<double>(kPrefactor), 1e-12);
}

TEST(L2, DiscriminantSecondaryTerms) {
  Interval plus = L2(only(Signature::TotallyReal), 5.0L / 3);
  Interval minus = L2(only(Signature::OneComplexPair), 5.0L / 3);
  EXPECT_TRUE(plus.contains(kSecondaryPlus));
  EXPECT_TRUE(minus.contains(kSecondaryMinus));
  EXPECT_NEAR(static_cast<double>(plus.value), static_cast<double>(kSecondaryPlus), 1e-8);
  EXPECT_NEAR(static_cast<double>(minus.value), static_cast<double>(kSecondaryMinus), 1e-8);
  SplittingConstraint all;
  for (u64 p : {2, 3, 5, 7, 101}) {
    long double q = p;
    EXPECT_NEAR(static_cast<double>(L2_factor(all, p, 2)), static_cast<double>(1 - std::pow(q, -5.0L / 3)), 1e-15)
        << p;
  }
  EXPECT_THROW(L2(all, 0.6L), std::domain_error);
}

TEST(L2, SeriesMatchesProduct) {
  // sum_f C2(f) f^-s against the product at s = 3
  SplittingConstraint c = only(Signature::TotallyReal);
  const u64 F0 = 1000;
  long double partial = 0, err = 0, cmax = 0;
  for (u64 f = 1; f <= F0; ++f) {
    if (!is_admissible_conductor(f)) continue;
    Interval v = C2_of_f(c, f);
    cmax = std::max(cmax, std::fabs(v.value));
    partial += v.value * std::pow(static_cast<long double>(f), -3.0L);
    err += v.error * std::pow(static_cast<long double>(f), -3.0L);
  }
  Interval full = L2(c, 3);
  long double tail = cmax / (2.0L * F0 * F0);
  EXPECT_LT(std::fabs(full.value - partial), full.error + err + tail);
  EXPECT_LT(full.error + err + tail, 1e-3L * std::fabs(full.value));
}
