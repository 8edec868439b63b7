#pragma once
/**
 * @file cli.hpp
 * @brief Command-line front end. run() parses argv, dispatches and returns the
 * exit status; the binary in tools/ is a thin wrapper.
 *
 * Exit status: 0 pass, 1 check failure, 2 usage error, 3 data or capacity error.
 * The human table goes to `out`; --summary FILE writes key=value lines.
 */

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cubic/acceptance.hpp"
#include "cubic/census.hpp"
#include "cubic/constants.hpp"
#include "cubic/datastore.hpp"
#include "cubic/hunter.hpp"
#include "cubic/resolvent.hpp"

namespace cubic::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

/// Default cache directory when --cache is not given.
inline constexpr const char* kCacheEnv = "CUBIC_CACHE_DIR";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  std::string cache;
  std::string summary;
  std::vector<std::string> split;
  std::string inf = "both";
  std::string alpha = "1", beta = "2";
  std::vector<double> X;
  double Y = 0, Z = 0;
  std::string ordering = "generalized";
  bool fit_secondary = false;
  std::vector<double> band;
  u64 P_max = kDefaultPmax;
  // enumerate
  i64 bound = 0;
  std::string out;
  i64 shard_width = 1000000;
  bool oracle = false;
  // invariants
  std::string poly;
  std::vector<i64> form;
  std::vector<u64> primes{2, 3, 5, 7};
  // constants
  std::vector<std::string> s_values{"2", "4/3"};
  // phi-verify
  i64 d = 0;
  u64 zmax = 0;
  // independence
  u64 p = 5;
  i64 restricted_d = -3;
  double tolerance = -1;
  // validate
  std::string list;
  std::string export_path;
  i64 ceiling = 0;
};

/// Report under construction: table lines plus key=value summary.
struct Report {
  std::ostringstream table;
  std::vector<std::pair<std::string, std::string>> summary;
  int checks = 0;
  int failed = 0;
  bool raw = false;  // records already written; no table

  void kv(const std::string& k, const std::string& v) { summary.emplace_back(k, v); }
  void check(const std::string& name, bool ok) {
    ++checks;
    if (!ok) ++failed;
    table << (ok ? "PASS" : "FAIL") << '\t' << name << '\n';
    kv("check." + name, ok ? "PASS" : "FAIL");
  }
};

inline std::string num(long double v, int prec = 10) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

inline SplittingConstraint constraint_of(const RunConfig& cfg) {
  SplittingConstraint c;
  try {
    for (const auto& s : cfg.split) c.add(s);
    c.set_infinity(cfg.inf);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

inline std::string describe(const SplittingConstraint& c) {
  std::ostringstream os;
  for (const auto& [p, s] : c.at) {
    os << p << ':';
    bool first = true;
    for (auto t : s) {
      os << (first ? "" : ",") << to_string(t);
      first = false;
    }
    os << ' ';
  }
  os << "inf:";
  if (c.infinity.size() == 2) os << "both";
  else os << (c.infinity.count(Signature::TotallyReal) ? "real" : "complex");
  return os.str();
}

inline InvariantExponents exponents_of(const RunConfig& cfg) {
  try {
    return InvariantExponents::parse(cfg.alpha, cfg.beta);
  } catch (const std::logic_error& e) {
    throw UsageError(std::string("bad exponents: ") + e.what());
  }
}

/// Cache directory from --cache, else the environment; empty when neither.
inline std::string cache_dir(const RunConfig& cfg) {
  if (!cfg.cache.empty()) return cfg.cache;
  if (const char* env = std::getenv(kCacheEnv)) return env;
  return "";
}

struct OpenedSource {
  std::unique_ptr<FieldSource> src;
  std::string checksum = "none";
  std::string origin = "enumerated";
};

/// The cache if one is configured (it must reach `needed`), else a streaming enumeration to `needed`.
inline OpenedSource open_source(const RunConfig& cfg, long double needed, const std::string& what) {
  OpenedSource o;
  const std::string dir = cache_dir(cfg);
  if (!dir.empty()) {
    LoadedCache c = load_cache(dir);
    o.checksum = c.manifest_sha256;
    o.origin = "cache:" + dir;
    o.src = std::make_unique<RecordSource>(std::move(c.records), c.manifest.ceiling);
  } else {
    if (needed > static_cast<long double>(kMaxEnumerationBound)) {
      throw CapacityError(what + " needs discriminants up to " + num(needed) + ", beyond the enumerator limit");
    }
    o.src = std::make_unique<EnumeratedSource>(static_cast<i64>(std::ceil(needed)) + 1);
  }
  o.src->require(needed, what);
  return o;
}

inline void stamp(Report& r, const RunConfig& cfg, const OpenedSource* s) {
  r.kv("command", cfg.subcommand);
  r.kv("acceptance_version", acceptance::kVersion);
  r.kv("cache_manifest_sha256", s ? s->checksum : "none");
  r.kv("field_source", s ? s->origin : "none");
  if (s) r.kv("field_source_bound", std::to_string(s->src->bound()));
}

inline void check_band(Report& r, const RunConfig& cfg, const std::string& name, long double ratio) {
  if (cfg.band.empty()) return;
  if (cfg.band.size() != 2 || !(cfg.band[0] <= cfg.band[1])) throw UsageError("--band takes lo,hi with lo <= hi");
  r.check(name + "_in_band", ratio >= cfg.band[0] && ratio <= cfg.band[1]);
}

inline void emit_count(Report& r, const std::string& key, const CountReport& c) {
  r.table << key << "\tordering\t" << c.ordering << '\n';
  r.table << key << "\tbound\t" << num(c.bounds.front()) << '\n';
  r.table << key << "\tcount\t" << c.count << '\n';
  r.table << key << "\tpredicted\t" << num(c.predicted.value) << "\t+-" << num(c.predicted.error, 3) << '\n';
  r.table << key << "\tratio\t" << num(c.ratio(), 6) << '\n';
  if (c.secondary) {
    const long double both = c.predicted.value + c.secondary->value;
    r.table << key << "\tsecondary\t" << num(c.secondary->value) << '\n';
    r.table << key << "\tratio_with_secondary\t" << num(both != 0 ? c.count / both : 0, 6) << '\n';
  }
  if (c.borderline) r.table << key << "\tborderline\t" << c.borderline << (c.unreliable ? "\tunreliable" : "") << '\n';
  for (const auto& d : c.dyadic)
    r.table << key << "\tdyadic\t" << num(d.bound) << '\t' << d.count << '\t' << num(d.predicted) << '\t'
            << num(d.ratio(), 6) << '\n';
  for (const auto& n : c.notes) r.table << key << "\tnote\t" << n << '\n';
  r.kv(key + ".count", std::to_string(c.count));
  r.kv(key + ".predicted", num(c.predicted.value));
  r.kv(key + ".ratio", num(c.ratio(), 6));
  if (c.secondary) r.kv(key + ".secondary", num(c.secondary->value));
  r.kv(key + ".borderline", std::to_string(c.borderline));
  r.kv(key + ".unreliable", c.unreliable ? "1" : "0");
}

// ---------------------------------------------------------------------------
// subcommands

inline void cmd_enumerate(const RunConfig& cfg, Report& r, std::ostream& out) {
  if (cfg.bound < 1) throw UsageError("--bound must be at least 1");
  const std::string dir = !cfg.out.empty() ? cfg.out : cache_dir(cfg);
  if (cfg.oracle && dir.empty()) throw UsageError("--oracle needs a cache directory (--out)");
  stamp(r, cfg, nullptr);
  if (cfg.oracle) {
    const i64 X = std::min<i64>(cfg.bound, acceptance::kOracleBound);
    std::map<std::pair<i64, int>, i64> bal;
    for (const auto& f : enumerate_fields(X)) ++bal[{f.disc, f.disc > 0 ? 1 : 0}];
    for (const auto& f : hunter::hunter_oracle(X)) --bal[{f.disc, f.disc > 0 ? 1 : 0}];
    i64 diff = 0;
    for (auto [k, v] : bal) diff += std::llabs(v);
    r.table << "oracle_prefix\t" << X << "\tdifferences\t" << diff << '\n';
    r.check("oracle_prefix", diff == 0);
  }
  if (dir.empty()) {
    // no cache configured: the records go to standard output
    out << records_tsv(enumerate_records(cfg.bound));
    r.raw = true;
    return;
  }
  CacheManifest m = write_cache(dir, cfg.bound, cfg.shard_width);
  r.summary[2].second = manifest_checksum(dir);
  r.table << "fields\t" << m.rows() << '\n';
  r.table << "shards\t" << m.shards.size() << '\n';
  r.table << "cache\t" << dir << '\n';
  r.table << "manifest_sha256\t" << r.summary[2].second << '\n';
  r.kv("fields", std::to_string(m.rows()));
}

inline void cmd_invariants(const RunConfig& cfg, Report& r) {
  const InvariantExponents e = exponents_of(cfg);
  stamp(r, cfg, nullptr);
  auto row = [&](const CubicFieldRecord& x) {
    r.table << x.form << '\t' << x.disc << '\t' << x.resolvent_d << '\t' << x.conductor_f << '\t'
            << radical_C(x.disc) << '\t' << to_string(x.signature) << '\t'
            << num(generalized_disc(x.resolvent_d, x.conductor_f, e));
    for (u64 p : cfg.primes) r.table << '\t' << to_string(splitting_type(x.form, static_cast<i64>(p)));
    r.table << '\n';
  };
  auto header = [&] {
    r.table << "form\tdisc\tD\tF\tC\tsignature\tgeneralized";
    for (u64 p : cfg.primes) r.table << "\ttype@" << p;
    r.table << '\n';
  };
  for (u64 p : cfg.primes)
    if (!is_prime(p)) throw UsageError("--primes: " + std::to_string(p) + " is not prime");
  if (cfg.bound > 0) {
    if (!cfg.poly.empty() || !cfg.form.empty()) throw UsageError("give either --bound or a single polynomial/form");
    header();
    auto recs = enumerate_records(cfg.bound);
    std::sort(recs.begin(), recs.end(), record_order);
    for (const auto& x : recs) row(x);
    r.kv("fields", std::to_string(recs.size()));
    return;
  }
  BinaryCubicForm f;
  if (!cfg.poly.empty()) {
    try {
      f = parse_cubic_polynomial(cfg.poly);
    } catch (const std::invalid_argument& ex) {
      throw UsageError(ex.what());
    }
  } else if (cfg.form.size() == 4) {
    f = {cfg.form[0], cfg.form[1], cfg.form[2], cfg.form[3]};
  } else {
    throw UsageError("invariants needs --poly, --form a,b,c,d or --bound");
  }
  if (!is_irreducible(f)) throw UsageError("the form is reducible; no cubic field");
  const i128 disc = disc_form(f);
  if (abs128(disc) >= static_cast<i128>(kMaxEnumerationBound)) throw CapacityError("discriminant beyond 10^12");
  std::vector<u64> bad;
  for (u64 p : square_prime_divisors(static_cast<u64>(abs128(disc))))
    if (!is_maximal_at(f, static_cast<i64>(p))) bad.push_back(p);
  r.table << "form\t" << f << "\ndisc_form\t" << to_string(disc) << '\n';
  if (!bad.empty()) {
    std::ostringstream os;
    for (u64 p : bad) os << p << ' ';
    r.table << "not_maximal_at\t" << os.str() << '\n';
    r.check("maximal", false);
    return;
  }
  const CubicFieldRecord x = make_record({reduce(f), static_cast<i64>(disc)});
  header();
  row(x);
  r.kv("disc", std::to_string(x.disc));
  r.kv("D", std::to_string(x.resolvent_d));
  r.kv("F", std::to_string(x.conductor_f));
  r.kv("C", std::to_string(radical_C(x.disc)));
  r.kv("generalized", num(generalized_disc(x.resolvent_d, x.conductor_f, e)));
}

inline std::vector<long double> bounds_of(const RunConfig& cfg, std::vector<long double> dflt) {
  if (cfg.X.empty()) return dflt;
  std::vector<long double> v(cfg.X.begin(), cfg.X.end());
  for (long double x : v)
    if (!(x > 0)) throw UsageError("--X must be positive");
  return v;
}

inline void cmd_count(const RunConfig& cfg, Report& r) {
  const SplittingConstraint c = constraint_of(cfg);
  if (cfg.ordering == "rect") {
    if (!(cfg.Y > 0) || !(cfg.Z > 0)) throw UsageError("rect ordering needs --Y and --Z");
    if (cfg.fit_secondary) throw UsageError("--fit-secondary applies to the generalized ordering only");
    OpenedSource s = open_source(cfg, static_cast<long double>(cfg.Y) * cfg.Z * cfg.Z, "count_rect");
    stamp(r, cfg, &s);
    r.kv("constraint", describe(c));
    CountReport rep = count_rect(c, cfg.Y, cfg.Z, *s.src);
    emit_count(r, "rect", rep);
    check_band(r, cfg, "ratio", rep.ratio());
    return;
  }
  if (cfg.ordering != "generalized") throw UsageError("--ordering must be generalized or rect");
  const InvariantExponents e = exponents_of(cfg);
  if (cfg.fit_secondary && !(e.beta / e.alpha > 1.4)) {
    throw UsageError("--fit-secondary needs beta/alpha > 7/5; got beta/alpha = " + num(e.beta / e.alpha, 6));
  }
  std::vector<long double> dflt{1e5L};
  if (cfg.fit_secondary) dflt.assign({1e4L, std::pow(10.0L, 4.5L), 1e5L, std::pow(10.0L, 5.5L), 1e6L});
  const std::vector<long double> Xs = bounds_of(cfg, dflt);
  if (cfg.fit_secondary && Xs.size() < 4) throw UsageError("--fit-secondary needs at least four --X values");
  const long double Xmax = *std::max_element(Xs.begin(), Xs.end());
  OpenedSource s = open_source(cfg, generalized_ceiling(e, Xmax), "count_generalized");
  stamp(r, cfg, &s);
  r.kv("constraint", describe(c));
  r.kv("alpha", cfg.alpha);
  r.kv("beta", cfg.beta);
  const auto reps = count_generalized_multi(c, e, Xs, *s.src);
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const std::string key = "X" + std::to_string(i);
    emit_count(r, key, reps[i]);
    check_band(r, cfg, key + "_ratio", reps[i].ratio());
  }
  if (cfg.fit_secondary) {
    std::vector<long double> sorted = Xs;
    std::sort(sorted.begin(), sorted.end());
    SecondaryFit f = fit_secondary(c, e, sorted, *s.src);
    r.table << "fit\tcoefficient\t" << num(f.coefficient) << "\t+-" << num(f.std_error, 3) << '\n';
    if (f.predicted) r.table << "fit\tpredicted\t" << num(f.predicted->value) << '\n';
    r.table << "fit\tmax_rel_dev_main\t" << num(f.max_rel_dev_main, 6) << '\n';
    r.table << "fit\tmax_rel_dev_fit\t" << num(f.max_rel_dev_fit, 6) << '\n';
    r.table << "fit\tresidual_share\t" << num(f.residual_share, 6) << '\n';
    r.kv("fit.coefficient", num(f.coefficient));
    if (f.predicted) r.kv("fit.predicted", num(f.predicted->value));
    r.kv("fit.max_rel_dev_fit", num(f.max_rel_dev_fit, 6));
    r.check("fit_negative", f.coefficient < 0);
    r.check("fit_within_2pct", f.max_rel_dev_fit < acceptance::kFitMaxRelDev);
  }
}

inline void cmd_constants(const RunConfig& cfg, Report& r) {
  const SplittingConstraint c = constraint_of(cfg);
  stamp(r, cfg, nullptr);
  r.kv("constraint", describe(c));
  r.table << "name\tparameters\tvalue\terror\tP_max\n";
  auto line = [&](const std::string& name, const std::string& params, const Interval& v) {
    r.table << name << '\t' << params << '\t' << num(v.value, 15) << '\t' << num(v.error, 3) << '\t' << v.P_max
            << '\n';
    r.kv(name + (params.empty() ? "" : "(" + params + ")"), num(v.value, 15));
  };
  for (const auto& sv : cfg.s_values) {
    long double s;
    try {
      s = static_cast<long double>(InvariantExponents::parse(sv, "1").alpha);
    } catch (const std::logic_error&) {
      throw UsageError("bad --s value '" + sv + "'");
    }
    line("L1", "s=" + sv, L1(c, s, cfg.P_max));
  }
  line("residue_L1", "s=1", residue_L1(c, cfg.P_max));
  line("L2", "s=5/3", L2(c, 5.0L / 3, cfg.P_max));
  const long double z3 = std::riemann_zetal(3);
  line("dh_plus", "1/(12 zeta(3))", {1 / (12 * z3), 0, 0});
  line("dh_minus", "1/(4 zeta(3))", {1 / (4 * z3), 0, 0});
  line("radical_constant", "real", radical_constant(Signature::TotallyReal, cfg.P_max));
  line("radical_constant", "complex", radical_constant(Signature::OneComplexPair, cfg.P_max));
  for (u64 p : {2, 3}) {
    std::ostringstream os;
    os << radical_local_constant(p);
    r.table << "radical_local\tp=" << p << '\t' << os.str() << "\t0\texact\n";
    r.kv("radical_local(p=" + std::to_string(p) + ")", os.str());
  }
}

inline void cmd_phi_verify(const RunConfig& cfg, Report& r) {
  if (!is_fundamental_discriminant(cfg.d)) throw UsageError("--d must be a fundamental discriminant (or 1)");
  if (cfg.zmax < 1) throw UsageError("--zmax must be at least 1");
  const SplittingConstraint c = constraint_of(cfg);
  const long double need = static_cast<long double>(std::llabs(cfg.d)) * cfg.zmax * cfg.zmax;
  OpenedSource s = open_source(cfg, need, "phi-verify");
  stamp(r, cfg, &s);
  r.kv("d", std::to_string(cfg.d));
  r.kv("zmax", std::to_string(cfg.zmax));
  r.kv("constraint", describe(c));
  const FieldIndex idx(mirror_bound(cfg.d, c));
  const PhiSeries S = build_phi(cfg.d, c, idx);
  const std::vector<i64> want = phi_coefficients(S, cfg.zmax);
  std::vector<i64> got(cfg.zmax + 1, 0);
  s.src->for_each([&](const CubicFieldRecord& x) {
    if (x.resolvent_d == cfg.d && x.conductor_f <= static_cast<i64>(cfg.zmax) && c.admits(x)) ++got[x.conductor_f];
  });
  r.table << "f\tpredicted\tenumerated\n";
  i64 mismatches = 0, total = 0;
  for (u64 f = 1; f <= cfg.zmax; ++f) {
    if (want[f] == 0 && got[f] == 0) continue;
    r.table << f << '\t' << want[f] << '\t' << got[f] << (want[f] != got[f] ? "\t*" : "") << '\n';
    if (want[f] != got[f]) ++mismatches;
    total += got[f];
  }
  if (S.vanishing) r.table << "note\tseries vanishes identically\n";
  for (const auto& a : S.anomalies) r.table << "anomaly\t" << a << '\n';
  r.kv("fields", std::to_string(total));
  r.kv("mismatches", std::to_string(mismatches));
  r.check("phi_coefficients", mismatches == 0);
}

inline void cmd_radical(const RunConfig& cfg, Report& r) {
  const SplittingConstraint c = constraint_of(cfg);
  if (!c.at.empty()) throw UsageError("radical takes --inf only, no --split");
  const std::vector<long double> Xs = bounds_of(cfg, {1000});
  const long double Xmax = *std::max_element(Xs.begin(), Xs.end());
  OpenedSource s = open_source(cfg, Xmax * Xmax / 3, "count_radical");
  stamp(r, cfg, &s);
  const auto counts = radical_counts(Xs, *s.src);
  for (std::size_t i = 0; i < Xs.size(); ++i) {
    for (Signature sig : {Signature::TotallyReal, Signature::OneComplexPair}) {
      if (!c.infinity.count(sig)) continue;
      const std::string key =
          std::string(sig == Signature::TotallyReal ? "plus" : "minus") + "_X" + std::to_string(i);
      const CountReport rep = radical_report(sig, Xs[i], counts[i][sig == Signature::TotallyReal ? 0 : 1],
                                             s.src->bound());
      emit_count(r, key, rep);
      check_band(r, cfg, key + "_ratio", rep.ratio());
    }
  }
}

inline void cmd_independence(const RunConfig& cfg, Report& r) {
  const SplittingConstraint c = constraint_of(cfg);
  const InvariantExponents e = exponents_of(cfg);
  if (!is_prime(cfg.p)) throw UsageError("--p must be prime");
  if (cfg.tolerance >= 0 && e.alpha > e.beta) throw UsageError("no product prediction for alpha > beta; drop --tolerance");
  const long double X = bounds_of(cfg, {1e6L}).front();
  OpenedSource s = open_source(cfg, generalized_ceiling(e, X), "independence");
  stamp(r, cfg, &s);
  r.kv("p", std::to_string(cfg.p));
  r.kv("constraint", describe(c));
  const IndependenceReport rep = independence_report(cfg.p, c, e, X, *s.src, cfg.restricted_d);
  r.table << "type\tcount\tempirical\tpredicted\n";
  bool within = true;
  for (SplittingType t :
       {SplittingType::S111, SplittingType::S12, SplittingType::S3, SplittingType::S121, SplittingType::S13}) {
    auto cn = rep.counts.find(t);
    auto em = rep.empirical.find(t);
    auto pr = rep.predicted.find(t);
    const long double emp = em == rep.empirical.end() ? 0 : em->second;
    r.table << to_string(t) << '\t' << (cn == rep.counts.end() ? 0 : cn->second) << '\t' << num(emp, 8) << '\t'
            << (pr == rep.predicted.end() ? "-" : num(pr->second, 8)) << '\n';
    r.kv(std::string("empirical.") + to_string(t), num(emp, 8));
    if (pr != rep.predicted.end()) {
      r.kv(std::string("predicted.") + to_string(t), num(pr->second, 8));
      if (pr->second > 0 && std::fabs(emp / pr->second - 1) > cfg.tolerance) within = false;
    }
  }
  r.table << "total\t" << rep.total << '\n';
  r.table << "restricted_d\t" << rep.restricted_d << "\tfields\t" << rep.restricted_total << "\tsplit\t"
          << rep.restricted_split << '\n';
  r.kv("restricted_total", std::to_string(rep.restricted_total));
  r.kv("restricted_split", std::to_string(rep.restricted_split));
  if (cfg.tolerance >= 0) {
    r.check("independence_within_tolerance", within);
  }
}

inline void cmd_report(const RunConfig& cfg, Report& r) {
  const long double X = bounds_of(cfg, {1e5L}).front();
  const InvariantExponents e(1, 2);
  OpenedSource s = open_source(cfg, generalized_ceiling(e, X), "report");
  stamp(r, cfg, &s);
  for (const char* inf : {"real", "complex"}) {
    SplittingConstraint c;
    c.set_infinity(inf);
    emit_count(r, inf, count_generalized(c, e, X, *s.src));
  }
  const long double u = uniformity_diagnostic(X, *s.src);
  r.table << "uniformity\t" << num(u, 6) << '\n';
  r.kv("uniformity", num(u, 6));
}

inline void cmd_validate(const RunConfig& cfg, Report& r) {
  if (!cfg.export_path.empty()) {
    if (cfg.ceiling < 1) throw UsageError("--export needs --ceiling");
    OpenedSource s = open_source(cfg, static_cast<long double>(cfg.ceiling), "validate");
    stamp(r, cfg, &s);
    std::vector<CubicFieldRecord> recs;
    s.src->for_each([&](const CubicFieldRecord& x) { recs.push_back(x); });
    const ExternalFieldList L = export_external(recs, cfg.ceiling);
    write_atomic(cfg.export_path, external_text(L));
    r.table << "exported\t" << L.records.size() << '\t' << cfg.export_path << '\n';
    r.kv("exported", std::to_string(L.records.size()));
    return;
  }
  if (cfg.list.empty()) throw UsageError("validate needs --list FILE (or --export FILE)");
  const ExternalFieldList L = ingest_external(cfg.list);
  const i64 ceiling = cfg.ceiling > 0 ? std::min(cfg.ceiling, L.range()) : L.range();
  OpenedSource s = open_source(cfg, static_cast<long double>(ceiling), "validate");
  stamp(r, cfg, &s);
  std::vector<CubicFieldRecord> recs;
  s.src->for_each([&](const CubicFieldRecord& x) { recs.push_back(x); });
  const DiffReport d = cross_validate(L, recs, ceiling);
  r.table << "source\t" << L.source << '\n';
  if (!L.provenance.empty()) r.table << "provenance\t" << L.provenance << '\n';
  r.table << "range\t" << d.range << "\nlisted\t" << d.compared_list << "\nenumerated\t" << d.compared_cache << '\n';
  for (const auto& rej : L.rejects) r.table << "rejected\tline " << rej.line_no << '\t' << rej.reason << '\n';
  for (i64 x : d.missing) r.table << "missing\t" << x << '\n';
  for (i64 x : d.extra) r.table << "extra\t" << x << '\n';
  r.kv("range", std::to_string(d.range));
  r.kv("rejects", std::to_string(L.rejects.size()));
  r.kv("diff_size", std::to_string(d.size()));
  r.check("cross_validation", d.pass());
}

// ---------------------------------------------------------------------------

inline void add_constraint_flags(CLI::App* s, RunConfig& cfg) {
  s->add_option("--split", cfg.split, "local condition p:TYPE[,TYPE...], repeatable; types 111 12 3 121 13");
  s->add_option("--inf", cfg.inf, "archimedean condition")->check(CLI::IsMember({"real", "complex", "both"}));
}

inline void add_cache_flags(CLI::App* s, RunConfig& cfg) {
  s->add_option("--cache", cfg.cache, std::string("cache directory (default $") + kCacheEnv + ", else enumerate)");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Cubic field enumeration, generalized-discriminant counts and their constants"};
  app.require_subcommand(1);
  app.add_option("--summary", cfg.summary, "write key=value summary to this file");

  auto* en = app.add_subcommand("enumerate", "enumerate fields with |disc| < bound into a cache");
  en->add_option("--bound", cfg.bound, "exclusive |disc| bound")->required();
  en->add_option("--out", cfg.out, std::string("cache directory (default $") + kCacheEnv + ", else TSV on stdout)");
  en->add_option("--shard-width", cfg.shard_width, "discriminants per shard")->check(CLI::PositiveNumber);
  en->add_flag("--oracle", cfg.oracle, "also compare the 10^4 prefix with the polynomial oracle");

  auto* inv = app.add_subcommand("invariants", "Disc, D, F, C and |D|^alpha F^beta");
  inv->add_option("--poly", cfg.poly, "defining polynomial, e.g. x^3-x-1");
  inv->add_option("--form", cfg.form, "binary cubic form a,b,c,d")->delimiter(',')->expected(4);
  inv->add_option("--bound", cfg.bound, "list every field with |disc| < bound");
  inv->add_option("--alpha", cfg.alpha);
  inv->add_option("--beta", cfg.beta);
  inv->add_option("--primes", cfg.primes, "splitting types at these primes")->delimiter(',');

  auto* cnt = app.add_subcommand("count", "empirical count against the predicted main term");
  cnt->add_option("--ordering", cfg.ordering, "generalized or rect");
  cnt->add_option("--alpha", cfg.alpha, "exponent of |D| (decimal or p/q)");
  cnt->add_option("--beta", cfg.beta, "exponent of F (decimal or p/q)");
  cnt->add_option("--X", cfg.X, "bound(s)")->delimiter(',');
  cnt->add_option("--Y", cfg.Y, "rect: |D| < Y");
  cnt->add_option("--Z", cfg.Z, "rect: F < Z");
  cnt->add_flag("--fit-secondary", cfg.fit_secondary, "regress the X^{5/(6 alpha)} term");
  cnt->add_option("--band", cfg.band, "fail unless lo <= ratio <= hi")->delimiter(',');
  add_constraint_flags(cnt, cfg);
  add_cache_flags(cnt, cfg);

  auto* con = app.add_subcommand("constants", "Euler-product constants with error bounds");
  con->add_option("--s", cfg.s_values, "L1 evaluation points")->delimiter(',');
  con->add_option("--pmax", cfg.P_max, "Euler product truncation")->check(CLI::Range(u64{100}, u64{10000000}));
  add_constraint_flags(con, cfg);

  auto* phi = app.add_subcommand("phi-verify", "Phi coefficients against enumerated counts");
  phi->add_option("--d", cfg.d, "fundamental discriminant")->required();
  phi->add_option("--zmax", cfg.zmax, "largest conductor")->required();
  add_constraint_flags(phi, cfg);
  add_cache_flags(phi, cfg);

  auto* rad = app.add_subcommand("radical", "count by rad(Disc) against the radical constant");
  rad->add_option("--X", cfg.X, "bound(s)")->delimiter(',');
  rad->add_option("--inf", cfg.inf)->check(CLI::IsMember({"real", "complex", "both"}));
  rad->add_option("--band", cfg.band, "fail unless lo <= ratio <= hi")->delimiter(',');
  add_cache_flags(rad, cfg);

  auto* ind = app.add_subcommand("independence", "splitting-type frequencies at one prime");
  ind->add_option("--p", cfg.p, "prime");
  ind->add_option("--alpha", cfg.alpha);
  ind->add_option("--beta", cfg.beta);
  ind->add_option("--X", cfg.X, "bound");
  ind->add_option("--restricted-d", cfg.restricted_d, "resolvent subfamily reported separately");
  ind->add_option("--tolerance", cfg.tolerance, "fail if any frequency is off by more than this (relative)");
  add_constraint_flags(ind, cfg);
  add_cache_flags(ind, cfg);

  auto* rep = app.add_subcommand("report", "discriminant-ordering census at one bound");
  rep->add_option("--X", cfg.X, "bound");
  add_cache_flags(rep, cfg);

  auto* val = app.add_subcommand("validate", "cross-validate an external field list");
  val->add_option("--list", cfg.list, "external list: 'polynomial, disc' per line");
  val->add_option("--export", cfg.export_path, "write the enumerated fields as an external list instead");
  val->add_option("--ceiling", cfg.ceiling, "compare |disc| below this");
  add_cache_flags(val, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  Report r;
  try {
    if (cfg.subcommand == "enumerate") cmd_enumerate(cfg, r, out);
    else if (cfg.subcommand == "invariants") cmd_invariants(cfg, r);
    else if (cfg.subcommand == "count") cmd_count(cfg, r);
    else if (cfg.subcommand == "constants") cmd_constants(cfg, r);
    else if (cfg.subcommand == "phi-verify") cmd_phi_verify(cfg, r);
    else if (cfg.subcommand == "radical") cmd_radical(cfg, r);
    else if (cfg.subcommand == "independence") cmd_independence(cfg, r);
    else if (cfg.subcommand == "report") cmd_report(cfg, r);
    else cmd_validate(cfg, r);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kExitData;
  } catch (const IntegrityError& e) {
    err << "integrity error: " << e.what() << '\n';
    return kExitData;
  } catch (const TableLoadError& e) {
    err << "table error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  const std::string result = r.checks == 0 ? "NONE" : (r.failed == 0 ? "PASS" : "FAIL");
  r.kv("checks", std::to_string(r.checks));
  r.kv("failed", std::to_string(r.failed));
  r.kv("result", result);
  if (!r.raw) {
    out << "# " << cfg.subcommand << '\n';
    for (std::size_t i = 0; i < 3 && i < r.summary.size(); ++i)
      out << "# " << r.summary[i].first << '\t' << r.summary[i].second << '\n';
    out << r.table.str();
    if (r.checks > 0) out << result << '\n';
  }
  if (!cfg.summary.empty()) {
    std::ostringstream os;
    for (const auto& [k, v] : r.summary) os << k << '=' << v << '\n';
    try {
      write_atomic(cfg.summary, os.str());
    } catch (const DataError& e) {
      err << "data error: " << e.what() << '\n';
      return kExitData;
    }
  }
  return r.failed == 0 ? kExitPass : kExitCheckFailed;
}

}  // namespace cubic::cli
