#pragma once
/**
 * @file datastore.hpp
 * @brief Sharded field cache (TSV + manifest), external field lists and
 * cross-validation.
 *
 * Cache directory:
 *   MANIFEST          key<TAB>value lines, then one "shard" line per file
 *   pos_<lo>_<hi>.tsv fields with lo <= disc < hi
 *   neg_<lo>_<hi>.tsv fields with lo <= -disc < hi
 *   LOCK              present while a writer is active
 * Shard files have the header a b c d disc resolvent_d conductor_f signature,
 * rows sorted by |disc| then form.
 */

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubic/enumerate.hpp"
#include "cubic/invariants.hpp"

namespace cubic {

/// Unreadable, corrupt or inconsistent data on disk.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCacheSchemaVersion = 1;
inline constexpr const char* kReductionConvention = "twisted-gl2-root-domain-v1";
inline constexpr const char* kMaximalityTest = "dedekind-criterion-v1";
inline constexpr const char* kCacheHeader = "a\tb\tc\td\tdisc\tresolvent_d\tconductor_f\tsignature";

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr)) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Writes to a sibling temporary and renames over the target.
inline void write_atomic(const std::filesystem::path& p, const std::string& bytes) {
  const std::filesystem::path tmp = p.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << bytes;
    out.flush();
    if (!out) throw DataError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot rename " + tmp.string() + " to " + p.string() + ": " + ec.message());
  }
}

/// Exclusive writer lock on a cache directory (O_EXCL lock file).
class CacheLock {
 public:
  explicit CacheLock(const std::filesystem::path& dir) : path_(dir / "LOCK") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) throw DataError("cache " + dir.string() + " is locked by another writer (" + path_.string() + ")");
    const std::string pid = std::to_string(::getpid()) + "\n";
    if (::write(fd_, pid.data(), pid.size()) < 0) {
      // the lock holds regardless of the note
    }
  }
  ~CacheLock() {
    ::close(fd_);
    std::filesystem::remove(path_);
  }
  CacheLock(const CacheLock&) = delete;
  CacheLock& operator=(const CacheLock&) = delete;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

// ---------------------------------------------------------------------------
// records as text

inline std::string record_line(const CubicFieldRecord& r) {
  std::ostringstream os;
  os << r.form.a << '\t' << r.form.b << '\t' << r.form.c << '\t' << r.form.d << '\t' << r.disc << '\t'
     << r.resolvent_d << '\t' << r.conductor_f << '\t' << to_string(r.signature);
  return os.str();
}

/// Parses and checks one cache row.
inline CubicFieldRecord parse_record_line(const std::string& line) {
  std::istringstream in(line);
  CubicFieldRecord r;
  std::string sig, extra;
  if (!(in >> r.form.a >> r.form.b >> r.form.c >> r.form.d >> r.disc >> r.resolvent_d >> r.conductor_f >> sig) ||
      (in >> extra)) {
    throw DataError("malformed cache row: " + line);
  }
  r.signature = parse_signature(sig);
  if (disc_form(r.form) != r.disc) throw DataError("row discriminant does not match its form: " + line);
  if (r.resolvent_d * r.conductor_f * r.conductor_f != r.disc) throw DataError("row has D F^2 != disc: " + line);
  if ((r.disc > 0) != (r.signature == Signature::TotallyReal)) throw DataError("row signature mismatch: " + line);
  return r;
}

inline bool record_order(const CubicFieldRecord& x, const CubicFieldRecord& y) {
  const i64 ax = std::llabs(x.disc), ay = std::llabs(y.disc);
  if (ax != ay) return ax < ay;
  if ((x.disc > 0) != (y.disc > 0)) return x.disc > 0;
  return x.form < y.form;
}

/// Single-file cache in the shared column format.
inline std::string records_tsv(std::vector<CubicFieldRecord> recs) {
  std::sort(recs.begin(), recs.end(), record_order);
  std::string s = std::string(kCacheHeader) + "\n";
  for (const auto& r : recs) s += record_line(r) + "\n";
  return s;
}

inline std::vector<CubicFieldRecord> parse_records_tsv(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCacheHeader) throw DataError("bad header in " + what);
  std::vector<CubicFieldRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_record_line(line));
  }
  return out;
}

// ---------------------------------------------------------------------------
// sharded cache

struct ShardInfo {
  char sign = '+';  // '+' or '-'
  i64 lo = 1;       // lo <= |disc| < hi
  i64 hi = 1;
  std::string file;
  std::string sha256;
  i64 rows = 0;
};

struct CacheManifest {
  int schema = kCacheSchemaVersion;
  i64 ceiling = 0;  // |disc| < ceiling
  std::string reduction = kReductionConvention;
  std::string maximality = kMaximalityTest;
  std::vector<ShardInfo> shards;

  std::string text() const {
    std::ostringstream os;
    os << "schema\t" << schema << "\nceiling\t" << ceiling << "\nreduction\t" << reduction << "\nmaximality\t"
       << maximality << "\n";
    for (const auto& s : shards)
      os << "shard\t" << s.sign << '\t' << s.lo << '\t' << s.hi << '\t' << s.rows << '\t' << s.sha256 << '\t' << s.file
         << "\n";
    return os.str();
  }

  i64 rows() const {
    i64 n = 0;
    for (const auto& s : shards) n += s.rows;
    return n;
  }

  /// Shards must tile [1, ceiling) for each sign.
  void check_partition() const {
    for (char sign : {'+', '-'}) {
      std::vector<std::pair<i64, i64>> r;
      for (const auto& s : shards)
        if (s.sign == sign) r.push_back({s.lo, s.hi});
      std::sort(r.begin(), r.end());
      i64 at = 1;
      for (auto [lo, hi] : r) {
        if (lo != at || hi <= lo) throw DataError(std::string("shards for sign ") + sign + " do not tile the range");
        at = hi;
      }
      if (at != ceiling) throw DataError(std::string("shards for sign ") + sign + " stop short of the ceiling");
    }
  }

  static CacheManifest parse(const std::string& text) {
    CacheManifest m;
    m.shards.clear();
    std::istringstream in(text);
    std::string line;
    bool have_ceiling = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      std::string key;
      std::getline(ls, key, '\t');
      std::string rest;
      std::getline(ls, rest);
      try {
        if (key == "schema") m.schema = std::stoi(rest);
        else if (key == "ceiling") {
          m.ceiling = std::stoll(rest);
          have_ceiling = true;
        } else if (key == "reduction") m.reduction = rest;
        else if (key == "maximality") m.maximality = rest;
        else if (key == "shard") {
          std::istringstream ss(rest);
          ShardInfo s;
          std::string sign;
          if (!(ss >> sign >> s.lo >> s.hi >> s.rows >> s.sha256 >> s.file) || (sign != "+" && sign != "-")) {
            throw DataError("malformed shard line in manifest: " + line);
          }
          s.sign = sign[0];
          m.shards.push_back(s);
        } else {
          throw DataError("unknown manifest key '" + key + "'");
        }
      } catch (const std::logic_error&) {
        throw DataError("malformed manifest line: " + line);
      }
    }
    if (!have_ceiling) throw DataError("manifest has no ceiling");
    if (m.schema != kCacheSchemaVersion) {
      throw DataError("cache schema " + std::to_string(m.schema) + " is not the supported " +
                      std::to_string(kCacheSchemaVersion));
    }
    if (m.reduction != kReductionConvention || m.maximality != kMaximalityTest) {
      throw DataError("cache was generated with different conventions (" + m.reduction + ", " + m.maximality + ")");
    }
    m.check_partition();
    return m;
  }
};

inline std::string shard_name(char sign, i64 lo, i64 hi) {
  return std::string(sign == '+' ? "pos_" : "neg_") + std::to_string(lo) + "_" + std::to_string(hi) + ".tsv";
}

/**
 * Enumerates 0 < |disc| < ceiling into dir, shard_width discriminants per shard
 * and sign. Shards go first, the manifest last; each file is written atomically
 * under the directory lock. Returns the manifest.
 */
inline CacheManifest write_cache(const std::filesystem::path& dir, i64 ceiling, i64 shard_width = 1000000) {
  if (ceiling < 1) throw std::invalid_argument("ceiling must be at least 1");
  if (shard_width < 1) throw std::invalid_argument("shard width must be positive");
  std::filesystem::create_directories(dir);
  CacheLock lock(dir);
  std::map<std::pair<char, i64>, std::vector<CubicFieldRecord>> buckets;
  for_each_field(ceiling, SignFilter::Both, [&](const FieldForm& ff) {
    const CubicFieldRecord r = make_record(ff);
    const i64 a = std::llabs(r.disc);
    buckets[{r.disc > 0 ? '+' : '-', (a - 1) / shard_width}].push_back(r);
  });
  CacheManifest m;
  m.ceiling = ceiling;
  const std::string old_manifest = std::filesystem::exists(dir / "MANIFEST") ? read_file(dir / "MANIFEST") : "";
  for (char sign : {'+', '-'}) {
    for (i64 k = 0; k * shard_width + 1 < ceiling || (k == 0 && ceiling == 1); ++k) {
      if (ceiling == 1) break;
      ShardInfo s;
      s.sign = sign;
      s.lo = k * shard_width + 1;
      s.hi = std::min(ceiling, (k + 1) * shard_width + 1);
      s.file = shard_name(sign, s.lo, s.hi);
      auto it = buckets.find({sign, k});
      const std::string body = records_tsv(it == buckets.end() ? std::vector<CubicFieldRecord>{} : it->second);
      s.rows = it == buckets.end() ? 0 : static_cast<i64>(it->second.size());
      s.sha256 = sha256_hex(body);
      write_atomic(dir / s.file, body);
      m.shards.push_back(s);
    }
  }
  write_atomic(dir / "MANIFEST", m.text());
  // shards of an earlier, different layout are no longer referenced
  if (!old_manifest.empty()) {
    std::set<std::string> keep;
    for (const auto& s : m.shards) keep.insert(s.file);
    try {
      for (const auto& s : CacheManifest::parse(old_manifest).shards)
        if (!keep.count(s.file)) std::filesystem::remove(dir / s.file);
    } catch (const DataError&) {
    }
  }
  return m;
}

inline std::string manifest_checksum(const std::filesystem::path& dir) { return sha256_hex(read_file(dir / "MANIFEST")); }

struct LoadedCache {
  CacheManifest manifest;
  std::string manifest_sha256;
  std::vector<CubicFieldRecord> records;  // sorted by |disc|, then sign, then form
};

/// Loads every shard, refusing the whole cache on any checksum or row defect.
inline LoadedCache load_cache(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / "MANIFEST")) throw DataError("no cache manifest in " + dir.string());
  LoadedCache out;
  const std::string mtext = read_file(dir / "MANIFEST");
  out.manifest = CacheManifest::parse(mtext);
  out.manifest_sha256 = sha256_hex(mtext);
  for (const auto& s : out.manifest.shards) {
    const std::string body = read_file(dir / s.file);
    if (sha256_hex(body) != s.sha256) throw DataError("checksum mismatch in shard " + s.file + "; cache refused");
    auto recs = parse_records_tsv(body, s.file);
    if (static_cast<i64>(recs.size()) != s.rows) throw DataError("row count mismatch in shard " + s.file);
    for (const auto& r : recs) {
      const i64 a = std::llabs(r.disc);
      if ((r.disc > 0 ? '+' : '-') != s.sign || a < s.lo || a >= s.hi) {
        throw DataError("row outside its shard range in " + s.file + ": " + record_line(r));
      }
    }
    out.records.insert(out.records.end(), recs.begin(), recs.end());
  }
  std::sort(out.records.begin(), out.records.end(), record_order);
  return out;
}

// ---------------------------------------------------------------------------
// external lists: "polynomial, discriminant" per line, # comments

struct ExternalRecord {
  BinaryCubicForm poly;  // a x^3 + b x^2 + c x + d
  i64 disc = 0;
};

struct RejectedLine {
  std::size_t line_no = 0;
  std::string text;
  std::string reason;
};

struct ExternalFieldList {
  std::string source;
  std::string provenance;
  std::optional<i64> bound;  // declared |disc| bound, exclusive
  std::vector<ExternalRecord> records;
  std::vector<RejectedLine> rejects;

  /// Declared bound, or one past the largest |disc|.
  i64 range() const {
    if (bound) return *bound;
    i64 m = 0;
    for (const auto& r : records) m = std::max<i64>(m, std::llabs(r.disc));
    return m + 1;
  }
};

/// Parses a cubic polynomial in x such as "x^3-x-1" or "2*x^3 + 3x - 7".
inline BinaryCubicForm parse_cubic_polynomial(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '*') s += ch;
  if (s.empty()) throw std::invalid_argument("empty polynomial");
  i64 coef[4] = {0, 0, 0, 0};
  bool seen[4] = {false, false, false, false};
  std::size_t i = 0;
  while (i < s.size()) {
    int sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1 : 1;
      ++i;
    } else if (i != 0) {
      throw std::invalid_argument("expected + or - in '" + text + "'");
    }
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    const bool has_num = j > i;
    i64 c = has_num ? std::stoll(s.substr(i, j - i)) : 1;
    i = j;
    int deg = 0;
    if (i < s.size() && s[i] == 'x') {
      ++i;
      deg = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::size_t k = i;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        if (k == i) throw std::invalid_argument("missing exponent in '" + text + "'");
        deg = std::stoi(s.substr(i, k - i));
        i = k;
      }
    } else if (!has_num) {
      throw std::invalid_argument("bad term in '" + text + "'");
    }
    if (deg > 3) throw std::invalid_argument("degree above 3 in '" + text + "'");
    if (seen[deg]) throw std::invalid_argument("repeated degree in '" + text + "'");
    seen[deg] = true;
    coef[deg] = sign * c;
  }
  if (coef[3] == 0) throw std::invalid_argument("not a cubic: '" + text + "'");
  return {coef[3], coef[2], coef[1], coef[0]};
}

inline std::string format_cubic_polynomial(const BinaryCubicForm& f) {
  const i64 c[4] = {f.d, f.c, f.b, f.a};
  std::string out;
  for (int deg = 3; deg >= 0; --deg) {
    i64 v = c[deg];
    if (v == 0) continue;
    if (!out.empty()) out += v < 0 ? "-" : "+";
    else if (v < 0) out += "-";
    const i64 a = v < 0 ? -v : v;
    if (a != 1 || deg == 0) out += std::to_string(a);
    if (deg >= 1) out += "x";
    if (deg >= 2) out += "^" + std::to_string(deg);
  }
  return out;
}

inline constexpr double kMaxRejectFraction = 0.01;

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

/// Empty string when fine, otherwise the reason.
inline std::string check_external(const ExternalRecord& r) {
  if (r.disc == 0) return "zero discriminant";
  const i64 m4 = ((r.disc % 4) + 4) % 4;
  if (m4 != 0 && m4 != 1) return "discriminant not 0 or 1 mod 4";
  if (!is_irreducible(r.poly)) return "polynomial is reducible";
  const i128 pd = disc_form(r.poly);
  if (pd % r.disc != 0) return "polynomial discriminant not divisible by the field discriminant";
  const i128 q = pd / r.disc;
  if (q <= 0 || q > static_cast<i128>(std::numeric_limits<u64>::max()) || !is_square(static_cast<u64>(q))) {
    return "polynomial discriminant / field discriminant is not a square";
  }
  return "";
}

}  // namespace detail

/// Reads a list; malformed lines go to rejects, more than 1% of them is a DataError.
inline ExternalFieldList parse_external(std::istream& in, const std::string& label) {
  ExternalFieldList L;
  L.source = label;
  std::string line;
  std::size_t n = 0, data_lines = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string body = detail::trim(t.substr(1));
      auto kv = [&](const std::string& key) -> std::optional<std::string> {
        if (body.rfind(key + ":", 0) == 0) return detail::trim(body.substr(key.size() + 1));
        return std::nullopt;
      };
      if (auto v = kv("source")) L.source = *v;
      else if (auto v2 = kv("provenance")) L.provenance = *v2;
      else if (auto v3 = kv("bound")) {
        try {
          L.bound = std::stoll(*v3);
        } catch (const std::logic_error&) {
          L.rejects.push_back({n, line, "bad bound"});
        }
      }
      continue;
    }
    ++data_lines;
    const auto comma = t.rfind(',');
    if (comma == std::string::npos) {
      L.rejects.push_back({n, line, "expected 'polynomial, discriminant'"});
      continue;
    }
    ExternalRecord r;
    try {
      r.poly = parse_cubic_polynomial(t.substr(0, comma));
      std::size_t used = 0;
      const std::string ds = detail::trim(t.substr(comma + 1));
      r.disc = std::stoll(ds, &used);
      if (used != ds.size()) throw std::invalid_argument("trailing text after discriminant");
    } catch (const std::exception& e) {
      L.rejects.push_back({n, line, e.what()});
      continue;
    }
    const std::string why = detail::check_external(r);
    if (!why.empty()) {
      L.rejects.push_back({n, line, why});
      continue;
    }
    L.records.push_back(r);
  }
  if (data_lines > 0 && static_cast<double>(L.rejects.size()) / data_lines > kMaxRejectFraction) {
    std::ostringstream os;
    os << L.rejects.size() << " of " << data_lines << " lines malformed in " << label << " (limit 1%); first: line "
       << L.rejects.front().line_no << ": " << L.rejects.front().reason;
    throw DataError(os.str());
  }
  return L;
}

inline ExternalFieldList ingest_external(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read external list " + path.string());
  return parse_external(in, path.filename().string());
}

/// Canonical text of a list; ingest of this text gives it back unchanged.
inline std::string external_text(const ExternalFieldList& L) {
  std::ostringstream os;
  os << "# source: " << L.source << "\n";
  if (!L.provenance.empty()) os << "# provenance: " << L.provenance << "\n";
  if (L.bound) os << "# bound: " << *L.bound << "\n";
  for (const auto& r : L.records) os << format_cubic_polynomial(r.poly) << ", " << r.disc << "\n";
  return os.str();
}

/// Cache records as an external list (the form read as a x^3 + b x^2 + c x + d).
inline ExternalFieldList export_external(const std::vector<CubicFieldRecord>& recs, i64 bound,
                                         const std::string& source = "cubic-cache") {
  ExternalFieldList L;
  L.source = source;
  L.provenance = "enumerated binary cubic forms, reduced";
  L.bound = bound;
  std::vector<CubicFieldRecord> sorted = recs;
  std::sort(sorted.begin(), sorted.end(), record_order);
  for (const auto& r : sorted)
    if (std::llabs(r.disc) < bound) L.records.push_back({r.form, r.disc});
  return L;
}

struct DiffReport {
  i64 range = 0;                 // compared |disc| < range
  std::vector<i64> missing;      // enumerated, absent from the list
  std::vector<i64> extra;        // listed, not enumerated
  std::size_t compared_list = 0;
  std::size_t compared_cache = 0;
  bool pass() const { return missing.empty() && extra.empty(); }
  std::size_t size() const { return missing.size() + extra.size(); }
};

/// Symmetric difference of discriminant multisets on the common range.
inline DiffReport cross_validate(const ExternalFieldList& L, const std::vector<CubicFieldRecord>& cache,
                                 i64 ceiling) {
  DiffReport rep;
  rep.range = std::min(ceiling, L.range());
  std::map<i64, i64> bal;
  for (const auto& r : L.records)
    if (std::llabs(r.disc) < rep.range) {
      ++bal[r.disc];
      ++rep.compared_list;
    }
  for (const auto& r : cache)
    if (std::llabs(r.disc) < rep.range) {
      --bal[r.disc];
      ++rep.compared_cache;
    }
  for (auto [d, n] : bal) {
    for (i64 i = 0; i < n; ++i) rep.extra.push_back(d);
    for (i64 i = 0; i < -n; ++i) rep.missing.push_back(d);
  }
  return rep;
}

}  // namespace cubic
