#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cubic/enumerate.hpp"
#include "cubic/localmass.hpp"

using namespace cubic;

namespace {
Rational abs_p(u64 p, int v) { return inv_power(p, v); }
}  // namespace

TEST(LocalClasses, TameInventory) {
  for (u64 p : primes_up_to(97)) {
    if (p <= 3) continue;
    const auto& cl = local_classes(p);
    Rational tot_ram, unram;
    int n121 = 0;
    for (const auto& c : cl) {
      if (c.splitting == SplittingType::S13) {
        tot_ram += Rational(c.multiplicity, c.aut_order);
        EXPECT_EQ(c.d_val, 0);
        EXPECT_EQ(c.f_val, 1);
      }
      if (c.splitting == SplittingType::S121) {
        n121 += c.multiplicity;
        EXPECT_EQ(c.aut_order, 2);
        EXPECT_EQ(c.d_val, 1);
      }
      if (c.d_val == 0 && c.f_val == 0) unram += Rational(c.multiplicity, c.aut_order);
    }
    EXPECT_EQ(tot_ram, Rational(1));
    EXPECT_EQ(unram, Rational(1));
    EXPECT_EQ(n121, 2);
  }
}

TEST(LocalClasses, RejectsComposite) { EXPECT_THROW(local_classes(9), std::invalid_argument); }

TEST(MassSum, ShapeIdentity) {
  for (u64 p : primes_up_to(97)) {
    if (p <= 3) continue;
    Rational pp(p);
    auto unram_or_partial = mass_sum_exact(p, all_types(), [&](int d, int f) {
      return f == 0 ? abs_p(p, d) : Rational(0);
    });
    auto total = mass_sum_exact(p, all_types(), [&](int d, int f) {
      return f == 1 ? abs_p(p, d) : Rational(0);
    });
    EXPECT_EQ(unram_or_partial * (Rational(1) - Rational(1, p)), Rational(1) - Rational(1, p * p));
    EXPECT_EQ(total * (Rational(1) - Rational(1, p)), Rational(1) - Rational(1, p));
  }
}

TEST(MassSum, Examples) {
  EXPECT_EQ(mass_sum_exact(5, all_types(), [](int d, int f) { return abs_p(5, d) * Rational(1, f == 0 ? 1 : 5); }),
            Rational(1) + Rational(2, 5));
  long double s = mass_sum(5, all_types(), [](int d, int f) {
    return std::pow(5.0L, -d) * std::pow(5.0L, -4.0L * f / 3);
  });
  EXPECT_NEAR(static_cast<double>(s), 1 + 0.2 + std::pow(5.0, -4.0 / 3), 1e-15);
  EXPECT_EQ(radical_mass(3), Rational(11, 3));
  EXPECT_EQ(radical_mass(2), Rational(3));
  EXPECT_EQ(radical_mass(5), Rational(7, 5));
}

TEST(MassSum, WildTablesSatisfySerreMass) {
  // sum over all classes of |Disc|_p / |Aut| = 1 + 1/p + 1/p^2
  for (u64 p : {2, 3, 5, 7}) {
    auto m = mass_sum_exact(p, all_types(), [p](int d, int f) { return inv_power(p, d + 2 * f); });
    EXPECT_EQ(m, Rational(1) + Rational(1, p) + Rational(1, p * p)) << p;
    auto tr = mass_sum_exact(p, {SplittingType::S13}, [p](int d, int f) { return inv_power(p, d + 2 * f - 2); });
    EXPECT_EQ(tr, Rational(1)) << p;
  }
}

TEST(MassSum, WildTablesMatchQuadraticCounts) {
  // Q_p times a ramified quadratic: 2 fields at 3, 6 at 2
  for (auto [p, n] : {std::pair<u64, int>{2, 6}, {3, 2}}) {
    int count = 0;
    for (const auto& c : local_classes(p))
      if (c.splitting == SplittingType::S121) count += c.multiplicity;
    EXPECT_EQ(count, n);
  }
}

TEST(InfiniteMass, Values) {
  EXPECT_EQ(infinite_mass({Signature::TotallyReal}), Rational(1, 6));
  EXPECT_EQ(infinite_mass({Signature::OneComplexPair}), Rational(1, 2));
  EXPECT_EQ(infinite_mass({Signature::TotallyReal, Signature::OneComplexPair}), Rational(2, 3));
  EXPECT_THROW(infinite_mass({}), std::invalid_argument);
}

TEST(LocalTable, CorruptFilesAreNamed) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "cubic_table_test";
  fs::create_directories(dir);
  fs::path bad = dir / "local_p2.tsv";
  {
    std::ifstream in(data_dir() + "/local_p2.tsv");
    std::ofstream out(bad);
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("2\t121\t3", 0) == 0) line = "2\t121\t3\t0\t2\t5\t1";
      out << line << "\n";
    }
  }
  try {
    load_local_table(bad.string(), 2);
    FAIL() << "corrupt table accepted";
  } catch (const TableLoadError& e) {
    EXPECT_NE(std::string(e.what()).find(bad.string()), std::string::npos);
  }
  EXPECT_THROW(load_local_table((dir / "missing.tsv").string(), 2), TableLoadError);
  fs::remove_all(dir);
}

TEST(SplittingConstraint, Parsing) {
  SplittingConstraint s;
  s.add("5:111");
  s.add("7:12,3");
  s.add("11:111,12,3,121,13");
  EXPECT_EQ(s.P_sigma(), 35u);
  EXPECT_TRUE(s.restricted(7));
  EXPECT_FALSE(s.restricted(11));
  EXPECT_THROW(s.add("4:111"), std::invalid_argument);
  EXPECT_THROW(s.add("5"), std::invalid_argument);
  EXPECT_THROW(s.add("5:22"), std::invalid_argument);
  EXPECT_THROW(s.set_infinity("imaginary"), std::invalid_argument);
}

TEST(Density, TotallySplitAtFiveApproachesMassRatio) {
  // (1/6) / (1 + 1/5 + 1/25); the approach is slowed by the X^{5/6} term,
  // so the relative gap should shrink by roughly 4^{-1/6} per factor 4 in X.
  const double expect = 25.0 / 186.0;
  auto gap = [&](i64 X) {
    i64 total = 0, split = 0;
    for_each_field(X, SignFilter::Both, [&](const FieldForm& f) {
      ++total;
      if (splitting_type(f.form, 5) == SplittingType::S111) ++split;
    });
    return 1.0 - static_cast<double>(split) / static_cast<double>(total) / expect;
  };
  double g1 = gap(250000), g2 = gap(1000000);
  EXPECT_GT(g1, g2);
  EXPECT_GT(g2, 0);
  EXPECT_NEAR(g2 / g1, std::pow(4.0, -1.0 / 6), 0.08);
}
