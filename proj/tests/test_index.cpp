#include <gtest/gtest.h>

#include <map>
#include <random>
#include <tuple>

#include "cubic/constants.hpp"
#include "cubic/index.hpp"
#include "cubic/invariants.hpp"

using namespace cubic;

namespace {

const std::vector<FieldForm>& fields() {
  static const std::vector<FieldForm> v = enumerate_fields(100000);
  return v;
}

}  // namespace

TEST(RingModel, CharpolyDiscIsFormSquaredTimesDisc) {
  std::mt19937_64 rng(11);
  const auto& fs = fields();
  for (int i = 0; i < 3000; ++i) {
    const auto& ff = fs[rng() % fs.size()];
    RingModel m(ff.form, 2);
    RingModel::Elt x{static_cast<i128>(rng() % 41) - 20, static_cast<i128>(rng() % 41) - 20,
                     static_cast<i128>(rng() % 41) - 20};
    i128 v = ff.form(x[1], x[2]);
    ASSERT_EQ(m.charpoly_disc(x), v * v * static_cast<i128>(ff.disc)) << ff.form;
  }
}

TEST(RingModel, MultiplicationIsCommutativeAndAssociative) {
  RingModel m({2, -3, 5, 7}, 5);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto r = [&] { return RingModel::Elt{static_cast<i128>(rng() % 9) - 4, static_cast<i128>(rng() % 9) - 4,
                                         static_cast<i128>(rng() % 9) - 4}; };
    auto x = r(), y = r(), z = r();
    ASSERT_EQ(m.mul(x, y), m.mul(y, x));
    ASSERT_EQ(m.mul(m.mul(x, y), z), m.mul(x, m.mul(y, z)));
  }
}

TEST(RingModel, IndexParity) {
  std::mt19937_64 rng(5);
  const auto& fs = fields();
  int checked = 0;
  for (int i = 0; i < 4000; ++i) {
    const auto& ff = fs[rng() % fs.size()];
    for (u64 p : {2, 3, 5, 7}) {
      RingModel m(ff.form, p);
      RingModel::Elt x{static_cast<i128>(rng() % 61) - 30, static_cast<i128>(rng() % 61) - 30,
                       static_cast<i128>(rng() % 61) - 30};
      if (x[1] == 0 && x[2] == 0) continue;
      int g = m.index_valuation_gap(x);
      ASSERT_GE(g, 0);
      ASSERT_EQ(g % 2, 0) << ff.form << " p=" << p;
      ++checked;
    }
  }
  EXPECT_GT(checked, 10000);
}

TEST(RingModel, RejectsComposite) { EXPECT_THROW(RingModel({1, 0, 0, -2}, 6), std::invalid_argument); }

TEST(IndexIntegral, ExponentZeroIsPrimitiveMeasure) {
  for (u64 p : {2, 3, 5, 7, 13}) {
    for (const auto& ff : {fields()[0], fields()[100], fields()[5000]}) {
      long double q = p;
      EXPECT_NEAR(static_cast<double>(index_integral_exact(ff.form, p, 0)), static_cast<double>(1 - 1 / (q * q)),
                  1e-15);
      auto est = local_index_integral(RingModel(ff.form, p), 0, 1e-12L);
      EXPECT_NEAR(static_cast<double>(est.value), static_cast<double>(1 - 1 / (q * q)), 1e-12);
    }
  }
}

TEST(IndexIntegral, TameClosedForms) {
  for (const auto& ff : fields()) {
    for (u64 p : {5, 7, 11, 13}) {
      SplittingType t = splitting_type(ff.form, static_cast<i64>(p));
      ASSERT_NEAR(static_cast<double>(index_integral_exact(ff.form, p)),
                  static_cast<double>(index_integral_tame(t, p)), 1e-15)
          << ff.form << " p=" << p;
    }
  }
}

TEST(IndexIntegral, EstimatorAgreesWithExact) {
  std::mt19937_64 rng(9);
  const auto& fs = fields();
  for (int i = 0; i < 40; ++i) {
    const auto& ff = fs[rng() % fs.size()];
    for (u64 p : {2, 3, 5, 7}) {
      IndexIntegral est = local_index_integral(RingModel(ff.form, p), 2.0L / 3, 1e-9L);
      long double ex = index_integral_exact(ff.form, p);
      EXPECT_NEAR(static_cast<double>(est.value), static_cast<double>(ex), 1e-8) << ff.form << " p=" << p;
      EXPECT_LE(est.lower, ex + 1e-12L);
      EXPECT_GE(est.upper, ex - 1e-12L);
    }
  }
}

TEST(IndexIntegral, EstimatorConvergesAtDoubledDepth) {
  // xy(x - y) is totally split at 5
  RingModel m({0, 1, -1, 0}, 5);
  IndexIntegral r = local_index_integral(m, 2.0L / 3, 1e-3L, 2, 4);
  EXPECT_EQ(r.depth, 4);
  EXPECT_LT(r.lower, r.upper);
  EXPECT_NEAR(static_cast<double>(r.value), static_cast<double>(index_integral_exact({0, 1, -1, 0}, 5)), 1e-12);
}

TEST(IndexIntegral, NonConvergenceIsReported) {
  // x^3: a triple root in a non-maximal ring, the integral diverges
  EXPECT_THROW(local_index_integral(RingModel({1, 0, 0, 0}, 2), 2.0L / 3, 1e-12L, 1, 8), std::runtime_error);
}

TEST(IndexIntegral, ConstantOnEachWildRow) {
  // every enumerated field with the same local invariants at 2 or 3 gives the
  // same integral as the bundled model form for that row
  for (u64 p : {2, 3}) {
    std::map<std::tuple<SplittingType, int, int>, long double> seen;
    for (const auto& ff : fields()) {
      auto r = make_record(ff);
      auto key = std::make_tuple(splitting_type(ff.form, static_cast<i64>(p)), valuation(r.resolvent_d, p),
                                 valuation(r.conductor_f, p));
      long double J = index_integral_exact(ff.form, p);
      auto [it, fresh] = seen.emplace(key, J);
      if (!fresh) {
        ASSERT_NEAR(static_cast<double>(it->second), static_cast<double>(J), 1e-15) << ff.form;
      }
    }
    for (const auto& c : local_classes(p)) {
      auto key = std::make_tuple(c.splitting, c.d_val, c.f_val);
      ASSERT_TRUE(seen.count(key)) << p << " " << to_string(c.splitting);
      long double q = p;
      EXPECT_NEAR(static_cast<double>(class_index_integral(c) * (1 - 1 / (q * q))),
                  static_cast<double>(seen[key]), 1e-15);
    }
  }
}
