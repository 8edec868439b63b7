#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cubic/enumerate.hpp"
#include "cubic/forms.hpp"
#include "cubic/hunter.hpp"
#include "cubic/invariants.hpp"

using namespace cubic;

TEST(DiscForm, KnownValues) {
  EXPECT_EQ(disc_form({0, 1, 1, 0}), 1);
  // resultant of x^3 - x - 1 with its derivative
  EXPECT_EQ(disc_form({1, 0, -1, -1}), -23);
  // -4p^3 - 27q^2 with p = q = 1
  EXPECT_EQ(disc_form({1, 0, 1, 1}), -31);
  EXPECT_EQ(disc_form({1, -1, -2, 1}), 49);
}

TEST(DiscForm, WideCoefficientsDoNotOverflow) {
  const i64 big = 1'000'000'000;
  BinaryCubicForm f{big, -big, big, big};
  // -4p^3-27q^2 style identity checked in exact 128-bit arithmetic
  i128 a = big, b = -big, c = big, d = big;
  i128 expect = 18 * a * b * c * d - 4 * a * c * c * c + b * b * c * c - 4 * b * b * b * d - 27 * a * a * d * d;
  EXPECT_TRUE(disc_form(f) == expect);
}

namespace {

Mat2 random_unimodular(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_int_distribution<i64> k(-3, 3);
  Mat2 m{1, 0, 0, 1};
  auto mul = [](const Mat2& x, const Mat2& y) {
    return Mat2{x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11,
                x.m10 * y.m00 + x.m11 * y.m10, x.m10 * y.m01 + x.m11 * y.m11};
  };
  for (int i = 0; i < 4; ++i) {
    i64 t = k(rng);
    switch (pick(rng)) {
      case 0: m = mul(m, Mat2{1, t, 0, 1}); break;
      case 1: m = mul(m, Mat2{1, 0, t, 1}); break;
      case 2: m = mul(m, Mat2{0, 1, 1, 0}); break;
      default: m = mul(m, Mat2{-1, 0, 0, 1}); break;
    }
  }
  return m;
}

BinaryCubicForm random_form(std::mt19937_64& rng) {
  std::uniform_int_distribution<i64> c(-20, 20);
  return {c(rng), c(rng), c(rng), c(rng)};
}

}  // namespace

TEST(DiscForm, InvariantUnderGL2) {
  std::mt19937_64 rng(12345);
  for (int i = 0; i < 100; ++i) {
    BinaryCubicForm f = random_form(rng);
    for (int j = 0; j < 100; ++j) {
      Mat2 g = random_unimodular(rng);
      ASSERT_TRUE(disc_form(act(g, f)) == disc_form(f)) << f;
    }
  }
}

TEST(Action, IsAGroupAction) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    BinaryCubicForm f = random_form(rng);
    Mat2 g = random_unimodular(rng), h = random_unimodular(rng);
    Mat2 gh{g.m00 * h.m00 + g.m01 * h.m10, g.m00 * h.m01 + g.m01 * h.m11,
            g.m10 * h.m00 + g.m11 * h.m10, g.m10 * h.m01 + g.m11 * h.m11};
    // F((x,y) g h) = (act(h, F))((x,y) g)
    EXPECT_EQ(act(gh, f), act(g, act(h, f)));
  }
  EXPECT_EQ(act(Mat2{-1, 0, 0, -1}, BinaryCubicForm{1, 2, 3, 4}), (BinaryCubicForm{-1, -2, -3, -4}));
}

TEST(Reduce, IdempotentAndClassInvariant) {
  std::mt19937_64 rng(99);
  int tested = 0;
  while (tested < 300) {
    BinaryCubicForm f = random_form(rng);
    if (disc_form(f) == 0 || !is_irreducible(f)) continue;
    ++tested;
    BinaryCubicForm r = reduce(f);
    EXPECT_EQ(reduce(r), r);
    EXPECT_NE(reduction_status(r, disc_form(r)), Reduction::NotReduced);
    for (int j = 0; j < 5; ++j) {
      BinaryCubicForm g = act(random_unimodular(rng), f);
      EXPECT_EQ(reduce(g), r) << f << " vs " << g;
    }
  }
}

TEST(Irreducible, Basics) {
  EXPECT_TRUE(is_irreducible({1, 0, -1, -1}));
  EXPECT_FALSE(is_irreducible({1, 0, -1, 0}));
  EXPECT_FALSE(is_irreducible({0, 1, 1, 1}));
  EXPECT_FALSE(is_irreducible({2, -1, -2, 1}));  // (2x - y)(x^2 - y^2)
  EXPECT_FALSE(is_irreducible({6, -5, 1, 0}));
  EXPECT_FALSE(is_irreducible({3, 5, -2, 0}));
  EXPECT_TRUE(is_irreducible({1, 0, 0, -2}));
  EXPECT_TRUE(is_irreducible({4, 0, 0, -8}));
  EXPECT_FALSE(is_irreducible({8, 0, 0, -1}));  // (2x - y)(4x^2 + 2xy + y^2)
}

TEST(Maximality, PureCubics) {
  EXPECT_TRUE(is_maximal({1, 0, 0, -2}));
  // Z[cbrt 12] has index 2 in the maximal order of Q(cbrt 12)
  EXPECT_FALSE(is_maximal_at({1, 0, 0, -12}, 2));
  EXPECT_TRUE(is_maximal_at({1, 0, 0, -12}, 3));
  // 10 = 1 mod 9 fails at 3
  EXPECT_FALSE(is_maximal_at({1, 0, 0, -10}, 3));
  EXPECT_FALSE(is_maximal({2, 0, 0, -4}));
}

TEST(Enumerate, SmallBounds) {
  EXPECT_TRUE(enumerate_fields(23).empty());
  auto c = enumerate_records(24, SignFilter::Negative);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].disc, -23);
  EXPECT_EQ(c[0].signature, Signature::OneComplexPair);
  EXPECT_TRUE(enumerate_fields(24, SignFilter::Positive).empty());
  auto r = enumerate_records(50, SignFilter::Positive);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].disc, 49);
  EXPECT_EQ(r[0].resolvent_d, 1);
  EXPECT_EQ(r[0].conductor_f, 7);
  EXPECT_EQ(stabilizer_order(r[0].form), 3);
}

TEST(Enumerate, RejectsOutOfRangeBounds) {
  EXPECT_THROW(enumerate_fields(kMaxEnumerationBound + 1), CapacityError);
  EXPECT_THROW(enumerate_fields(0), std::invalid_argument);
}

TEST(Enumerate, SortedWithoutDuplicates) {
  auto v = enumerate_fields(20000);
  std::set<BinaryCubicForm> forms;
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_TRUE(forms.insert(v[i].form).second);
    EXPECT_EQ(disc_form(v[i].form), v[i].disc);
    EXPECT_EQ(reduce(v[i].form), v[i].form);
    if (i > 0) {
      EXPECT_LE(std::llabs(v[i - 1].disc), std::llabs(v[i].disc));
    }
  }
  // reduced representatives of distinct fields are never equivalent
  EXPECT_EQ(forms.size(), v.size());
}

TEST(Enumerate, WiderSearchBoxFindsNothingNew) {
  auto base = enumerate_fields(200000);
  auto wide = enumerate_fields(200000, SignFilter::Both, 1.5);
  EXPECT_EQ(base, wide);
}

TEST(Enumerate, AgreesWithHunterOracle) {
  using Key = std::pair<i64, int>;
  std::vector<Key> ours, oracle;
  for (const auto& r : enumerate_records(10000)) ours.push_back({r.disc, static_cast<int>(r.signature)});
  for (const auto& h : hunter::hunter_oracle(10000)) {
    oracle.push_back({h.disc, static_cast<int>(h.disc > 0 ? Signature::TotallyReal : Signature::OneComplexPair)});
  }
  std::sort(ours.begin(), ours.end());
  std::sort(oracle.begin(), oracle.end());
  EXPECT_EQ(ours, oracle);
  // every smaller bound is a prefix, but spot-check a few directly
  for (i64 X : {1, 24, 100, 500, 1000, 3000}) {
    std::vector<i64> a, b;
    for (const auto& f : enumerate_fields(X)) a.push_back(f.disc);
    for (const auto& h : hunter::hunter_oracle(X)) b.push_back(h.disc);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b) << "X=" << X;
  }
}

TEST(Hunter, Limits) {
  EXPECT_TRUE(hunter::hunter_oracle(1).empty());
  auto v = hunter::hunter_oracle(24);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].disc, -23);
  EXPECT_THROW(hunter::hunter_oracle(100001), CapacityError);
}

namespace {
BinaryCubicForm form_of(i64 disc) {
  for (const auto& f : enumerate_fields(std::llabs(disc) + 1))
    if (f.disc == disc) return f.form;
  ADD_FAILURE() << "no field of discriminant " << disc;
  return {};
}
}  // namespace

TEST(Splitting, Examples) {
  EXPECT_EQ(splitting_type(form_of(-108), 2), SplittingType::S13);
  EXPECT_EQ(splitting_type(form_of(-23), 23), SplittingType::S121);
  EXPECT_EQ(splitting_type(form_of(49), 2), SplittingType::S3);
  // trial factorization of x^3 - x^2 - 2x + 1 mod 2: no roots in F_2
  BinaryCubicForm g{1, -1, -2, 1};
  EXPECT_NE(g(0, 1) % 2, 0);
  EXPECT_NE(g(1, 1) % 2, 0);
}

TEST(Splitting, AgreesWithLocalParts) {
  const auto primes = primes_up_to(97);
  for (const auto& r : enumerate_records(100000)) {
    for (u64 p : primes) {
      SplittingType t = splitting_type(r.form, static_cast<i64>(p));
      bool pd = r.resolvent_d % static_cast<i64>(p) == 0;
      bool pf = r.conductor_f % static_cast<i64>(p) == 0;
      if (p != 3) {
        ASSERT_EQ(t == SplittingType::S121, pd) << r.disc << " p=" << p;
        ASSERT_EQ(t == SplittingType::S13, pf) << r.disc << " p=" << p;
      } else {
        // at 3 a wildly ramified cubic can have 3 | D as well as 3 | F
        ASSERT_EQ(t == SplittingType::S13, pf) << r.disc;
        ASSERT_EQ(t == SplittingType::S121, pd && !pf) << r.disc;
      }
    }
    for (const auto& lp : local_parts(r.resolvent_d, r.conductor_f)) {
      ASSERT_TRUE(is_allowed_local_part(lp)) << r.disc << " p=" << lp.p;
    }
  }
}

TEST(Stabilizer, CyclicFieldsHaveOrderThree) {
  for (const auto& r : enumerate_records(20000)) {
    bool cyclic = r.resolvent_d == 1;
    EXPECT_EQ(stabilizer_order(r.form), cyclic ? 3 : 1) << r.disc;
  }
}
