#pragma once
/**
 * @file acceptance.hpp
 * @brief Desk-scale interpretation of the asymptotic statements: bounds and
 * tolerances used by the acceptance run, versioned as a whole.
 */

#include <array>

#include "cubic/arith.hpp"

namespace cubic::acceptance {

/// Bump whenever any value below changes; reports carry it.
inline constexpr const char* kVersion = "acceptance-v1";

// 1. oracle equivalence
inline constexpr i64 kOracleBound = 10000;
inline constexpr double kOracleSeconds = 60;

// 2. discriminant counts against 1/(12 zeta(3)) X and 1/(4 zeta(3)) X
inline constexpr long double kDHBound = 1e6L;
inline constexpr std::array<double, 2> kDHBandPlus{0.88, 1.01};
inline constexpr std::array<double, 2> kDHBandMinus{0.90, 1.01};
inline constexpr double kDHSeconds = 60;

// 3. Phi coefficients, full family
inline constexpr i64 kExactDmax = 50;
inline constexpr u64 kExactFmax = 500;
inline constexpr double kExactSeconds = 600;

// 4. Phi coefficients with S111 at 7
inline constexpr u64 kSplitPrime = 7;
inline constexpr i64 kSplitDmax = 30;
inline constexpr u64 kSplitFmax = 300;

// 6. per-prime factor of L1(all, 4/3)
inline constexpr std::array<u64, 4> kEulerPrimes{5, 7, 11, 13};
inline constexpr long double kEulerTol = 1e-12L;

// 7. secondary term fit
inline constexpr std::array<long double, 5> kFitExponents10{4, 4.5, 5, 5.5, 6};
inline constexpr double kFitMaxRelDev = 0.02;

// 8. average residue
inline constexpr long double kAverageY = 1e4L;
inline constexpr double kAverageTol = 0.05;
inline constexpr u64 kResiduePmax = 20000;

// 9. radical ordering
inline constexpr std::array<long double, 3> kRadicalExponents10{3, 3.5, 4};
inline constexpr std::array<double, 2> kRadicalBand{0.5, 1.5};
inline constexpr double kRadicalSeconds = 900;

// 10. independence at 5
inline constexpr long double kIndependenceX = 1e6L;
inline constexpr u64 kIndependencePrime = 5;
inline constexpr double kIndependenceTol = 0.05;

// 11. property suites
inline constexpr int kInvarianceForms = 100;
inline constexpr int kInvarianceMatrices = 100;

}  // namespace cubic::acceptance
