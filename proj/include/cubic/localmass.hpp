#pragma once
/**
 * @file localmass.hpp
 * @brief Cubic etale algebras over Q_p, splitting constraints, and mass sums.
 *
 * For p > 3 the inventory is generated: the three unramified algebras, two
 * partially ramified ones (Q_p times a ramified quadratic field) and the tamely
 * totally ramified cubics. For p = 2 and 3 the inventory is read from
 * data/local_p2.tsv and data/local_p3.tsv.
 */

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubic/arith.hpp"
#include "cubic/forms.hpp"
#include "cubic/invariants.hpp"
#include "cubic/rational.hpp"

#ifndef CUBIC_DATA_DIR
#define CUBIC_DATA_DIR "data"
#endif

namespace cubic {

struct LocalAlgebraClass {
  u64 p;
  SplittingType splitting;
  int d_val;
  int f_val;
  int aut_order;
  int multiplicity;
  int rad_val;  // 1 when ramified
};

class TableLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Directory holding the p = 2, 3 tables; CUBIC_DATA_DIR in the environment wins.
inline std::string data_dir() {
  if (const char* env = std::getenv("CUBIC_DATA_DIR"); env && *env) return env;
  return CUBIC_DATA_DIR;
}

inline std::string fnv1a64_hex(const std::vector<std::string>& lines) {
  u64 h = 0xcbf29ce484222325ULL;
  for (const std::string& l : lines) {
    for (unsigned char ch : l + "\n") {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Parses a local table; throws TableLoadError naming the file on any defect.
inline std::vector<LocalAlgebraClass> load_local_table(const std::string& path, u64 expect_p) {
  std::ifstream in(path);
  if (!in) throw TableLoadError("cannot open local table " + path);
  std::string line, checksum;
  std::vector<std::string> rows;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("checksum: fnv1a64 ");
      if (pos != std::string::npos) checksum = line.substr(pos + 18);
      continue;
    }
    if (!header) {
      if (line != "p\tsplitting\td_val\tf_val\taut_order\tmultiplicity\trad_val") {
        throw TableLoadError("bad header in local table " + path);
      }
      header = true;
      continue;
    }
    rows.push_back(line);
  }
  if (!header || rows.empty()) throw TableLoadError("local table " + path + " has no data");
  if (checksum.empty()) throw TableLoadError("local table " + path + " has no checksum line");
  if (fnv1a64_hex(rows) != checksum) throw TableLoadError("checksum mismatch in local table " + path);
  std::vector<LocalAlgebraClass> out;
  for (const std::string& r : rows) {
    std::istringstream ss(r);
    u64 p;
    std::string split;
    LocalAlgebraClass c{};
    if (!(ss >> p >> split >> c.d_val >> c.f_val >> c.aut_order >> c.multiplicity >> c.rad_val)) {
      throw TableLoadError("malformed row in local table " + path + ": " + r);
    }
    if (p != expect_p) throw TableLoadError("wrong prime in local table " + path);
    try {
      c.splitting = parse_splitting_type(split);
    } catch (const std::invalid_argument&) {
      throw TableLoadError("bad splitting type in local table " + path + ": " + split);
    }
    c.p = p;
    out.push_back(c);
  }
  return out;
}

namespace detail {

inline std::vector<LocalAlgebraClass> tame_classes(u64 p) {
  std::vector<LocalAlgebraClass> v{
      {p, SplittingType::S111, 0, 0, 6, 1, 0},
      {p, SplittingType::S12, 0, 0, 2, 1, 0},
      {p, SplittingType::S3, 0, 0, 3, 1, 0},
      {p, SplittingType::S121, 1, 0, 2, 2, 1},
  };
  if (p % 3 == 1) {
    v.push_back({p, SplittingType::S13, 0, 1, 3, 3, 1});
  } else {
    v.push_back({p, SplittingType::S13, 0, 1, 1, 1, 1});
  }
  return v;
}

}  // namespace detail

/// Every isomorphism-class signature of cubic etale algebras over Q_p.
inline const std::vector<LocalAlgebraClass>& local_classes(u64 p) {
  if (!is_prime(p)) throw std::invalid_argument("local_classes: " + std::to_string(p) + " is not prime");
  static std::mutex mu;
  static std::map<u64, std::vector<LocalAlgebraClass>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return it->second;
  std::vector<LocalAlgebraClass> v;
  if (p == 2 || p == 3) {
    v = load_local_table(data_dir() + "/local_p" + std::to_string(p) + ".tsv", p);
  } else {
    v = detail::tame_classes(p);
  }
  return cache.emplace(p, std::move(v)).first->second;
}

using TypeSet = std::set<SplittingType>;

inline const TypeSet& all_types() {
  static const TypeSet all{SplittingType::S111, SplittingType::S12, SplittingType::S3,
                           SplittingType::S121, SplittingType::S13};
  return all;
}

/// Sum over allowed classes of multiplicity * weight(d_val, f_val) / aut_order.
inline long double mass_sum(u64 p, const TypeSet& allowed,
                            const std::function<long double(int, int)>& weight) {
  long double s = 0;
  for (const auto& c : local_classes(p)) {
    if (!allowed.count(c.splitting)) continue;
    s += c.multiplicity * weight(c.d_val, c.f_val) / c.aut_order;
  }
  return s;
}

inline Rational mass_sum_exact(u64 p, const TypeSet& allowed,
                               const std::function<Rational(int, int)>& weight) {
  Rational s;
  for (const auto& c : local_classes(p)) {
    if (!allowed.count(c.splitting)) continue;
    s += Rational(c.multiplicity, c.aut_order) * weight(c.d_val, c.f_val);
  }
  return s;
}

/// Sum of |rad(d f)|_p / |Aut| over all classes.
inline Rational radical_mass(u64 p) {
  return mass_sum_exact(p, all_types(), [p](int d, int f) {
    return (d > 0 || f > 0) ? Rational(1, static_cast<i128>(p)) : Rational(1);
  });
}

using SignatureSet = std::set<Signature>;

inline Rational infinite_mass(const SignatureSet& allowed) {
  if (allowed.empty()) throw std::invalid_argument("infinite-place constraint must be nonempty");
  Rational m;
  if (allowed.count(Signature::TotallyReal)) m += Rational(1, 6);
  if (allowed.count(Signature::OneComplexPair)) m += Rational(1, 2);
  return m;
}

/// Local conditions at finitely many primes plus an archimedean condition.
struct SplittingConstraint {
  std::map<u64, TypeSet> at;
  SignatureSet infinity{Signature::TotallyReal, Signature::OneComplexPair};

  const TypeSet& allowed(u64 p) const {
    auto it = at.find(p);
    return it == at.end() ? all_types() : it->second;
  }

  bool restricted(u64 p) const {
    auto it = at.find(p);
    return it != at.end() && it->second != all_types();
  }

  /// Product of primes whose allowed set is proper.
  u64 P_sigma() const {
    u64 P = 1;
    for (const auto& [p, s] : at)
      if (s != all_types()) P *= p;
    return P;
  }

  std::vector<u64> restricted_primes() const {
    std::vector<u64> v;
    for (const auto& [p, s] : at)
      if (s != all_types()) v.push_back(p);
    return v;
  }

  /// Adds "p:TYPE[,TYPE...]".
  void add(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("expected p:TYPE[,TYPE], got '" + spec + "'");
    u64 p = std::stoull(spec.substr(0, colon));
    if (!is_prime(p)) throw std::invalid_argument("'" + spec.substr(0, colon) + "' is not prime");
    TypeSet s;
    std::stringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) s.insert(parse_splitting_type(tok));
    if (s.empty()) throw std::invalid_argument("empty type list in '" + spec + "'");
    at[p] = s;
  }

  void set_infinity(const std::string& v) {
    if (v == "real") infinity = {Signature::TotallyReal};
    else if (v == "complex") infinity = {Signature::OneComplexPair};
    else if (v == "both") infinity = {Signature::TotallyReal, Signature::OneComplexPair};
    else throw std::invalid_argument("--inf must be real, complex or both");
  }

  bool admits(const CubicFieldRecord& r) const {
    if (!infinity.count(r.signature)) return false;
    for (const auto& [p, s] : at) {
      if (s == all_types()) continue;
      if (!s.count(splitting_type(r.form, static_cast<i64>(p)))) return false;
    }
    return true;
  }
};

}  // namespace cubic
