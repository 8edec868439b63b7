#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cubic/cli.hpp"

using namespace cubic;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "cubic_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int s = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {s, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cubic_cli_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

/// A cache to 10^5, shared by the tests that read one.
const fs::path& cache() {
  static const fs::path dir = [] {
    fs::path d = scratch("cache");
    write_cache(d, 100000, 25000);
    return d;
  }();
  return dir;
}

}  // namespace

TEST(Cli, PhiVerifyMinusTwentyThree) {
  Outcome r = run({"phi-verify", "--d", "-23", "--zmax", "500"});
  EXPECT_EQ(r.status, cli::kExitPass) << r.err;
  EXPECT_NE(r.out.find("f\tpredicted\tenumerated"), std::string::npos);
  EXPECT_EQ(r.out.substr(r.out.size() - 5), "PASS\n");
}

TEST(Cli, PhiVerifySplitVanishing) {
  // (-23/7) = -1: nothing splits completely at 7
  Outcome r = run({"phi-verify", "--d", "-23", "--zmax", "50", "--split", "7:111"});
  EXPECT_EQ(r.status, cli::kExitPass) << r.err;
  EXPECT_NE(r.out.find("vanishes"), std::string::npos);
}

TEST(Cli, FitSecondaryRegimeIsUsageError) {
  Outcome r = run({"count", "--alpha", "1", "--beta", "1.3", "--fit-secondary"});
  EXPECT_EQ(r.status, cli::kExitUsage);
  EXPECT_NE(r.err.find("7/5"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({"count", "--no-such-flag"}).status, cli::kExitUsage);
  EXPECT_EQ(run({}).status, cli::kExitUsage);
  EXPECT_EQ(run({"count", "--split", "4:111"}).status, cli::kExitUsage);
  EXPECT_EQ(run({"count", "--split", "7:1111"}).status, cli::kExitUsage);
  EXPECT_EQ(run({"phi-verify", "--d", "-4", "--zmax", "5"}).status, cli::kExitPass);
  EXPECT_EQ(run({"phi-verify", "--d", "9", "--zmax", "5"}).status, cli::kExitUsage);
  EXPECT_EQ(run({"count", "--alpha", "-1"}).status, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).status, cli::kExitPass);
}

TEST(Cli, EnumerateEchoesCount) {
  const fs::path d = scratch("enum");
  Outcome r = run({"enumerate", "--bound", "20000", "--out", d.string(), "--oracle"});
  EXPECT_EQ(r.status, cli::kExitPass) << r.err;
  const auto recs = enumerate_records(20000);
  EXPECT_NE(r.out.find("fields\t" + std::to_string(recs.size()) + "\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("PASS\toracle_prefix"), std::string::npos);
  EXPECT_EQ(load_cache(d).records.size(), recs.size());
  fs::remove_all(d);
}

TEST(Cli, EnumerateToStdout) {
  Outcome r = run({"enumerate", "--bound", "100"});
  EXPECT_EQ(r.status, cli::kExitPass);
  EXPECT_EQ(r.out, records_tsv(enumerate_records(100)));
}

TEST(Cli, DeterministicAndStamped) {
  const fs::path s1 = scratch("s1"), s2 = scratch("s2");
  Outcome a = run({"--summary", s1.string(), "count", "--X", "1e5", "--cache", cache().string()});
  ::setenv(cli::kCacheEnv, cache().c_str(), 1);
  Outcome b = run({"--summary", s2.string(), "count", "--X", "1e5"});
  ::unsetenv(cli::kCacheEnv);
  ASSERT_EQ(a.status, cli::kExitPass) << a.err;
  EXPECT_EQ(a.out, b.out);
  const std::string sa = read_file(s1), sb = read_file(s2);
  EXPECT_EQ(sa, sb);
  EXPECT_NE(sa.find("cache_manifest_sha256=" + manifest_checksum(cache())), std::string::npos) << sa;
  EXPECT_NE(sa.find(std::string("acceptance_version=") + acceptance::kVersion), std::string::npos);
  EXPECT_NE(a.out.find(manifest_checksum(cache())), std::string::npos);
  fs::remove(s1);
  fs::remove(s2);
}

TEST(Cli, CapacityAndDataErrors) {
  EXPECT_EQ(run({"count", "--X", "1e6", "--cache", cache().string()}).status, cli::kExitData);
  EXPECT_EQ(run({"count", "--cache", scratch("missing").string()}).status, cli::kExitData);
  EXPECT_EQ(run({"validate", "--list", scratch("nolist").string()}).status, cli::kExitData);
}

TEST(Cli, BandCheckFails) {
  Outcome r = run({"count", "--X", "1e5", "--inf", "real", "--band", "0.99,1.01", "--cache", cache().string()});
  EXPECT_EQ(r.status, cli::kExitCheckFailed);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(run({"count", "--X", "1e5", "--band", "0.5,1.5", "--cache", cache().string()}).status, cli::kExitPass);
}

TEST(Cli, ValidateRoundTrip) {
  const fs::path list = scratch("list.txt");
  ASSERT_EQ(run({"validate", "--export", list.string(), "--ceiling", "5000", "--cache", cache().string()}).status,
            cli::kExitPass);
  Outcome ok = run({"validate", "--list", list.string(), "--cache", cache().string()});
  EXPECT_EQ(ok.status, cli::kExitPass) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("range\t5000"), std::string::npos);
  // corrupt one discriminant into another genuine field's
  std::string text = read_file(list);
  const auto end = text.find(", -23\n");
  ASSERT_NE(end, std::string::npos);
  const auto start = text.rfind('\n', end) + 1;
  text.replace(start, end + 6 - start, "x^3+x+1, -31\n");
  write_atomic(list, text);
  Outcome bad = run({"validate", "--list", list.string(), "--cache", cache().string()});
  EXPECT_EQ(bad.status, cli::kExitCheckFailed);
  EXPECT_NE(bad.out.find("missing\t-23"), std::string::npos);
  EXPECT_NE(bad.out.find("extra\t-31"), std::string::npos);
  fs::remove(list);
}

TEST(Cli, Invariants) {
  Outcome r = run({"invariants", "--poly", "x^3-x-1"});
  EXPECT_EQ(r.status, cli::kExitPass) << r.err;
  EXPECT_NE(r.out.find("\t-23\t-23\t1\t23\tOneComplexPair\t"), std::string::npos) << r.out;
  // x^3 - 7x - 7: cyclic, disc 49 = 1 * 7^2
  Outcome c = run({"invariants", "--poly", "x^3-7x-7"});
  EXPECT_NE(c.out.find("\t49\t1\t7\t7\tTotallyReal"), std::string::npos) << c.out;
  // x^3 - 8 and x^3 + 8 are reducible; 4x^3 - 2 (disc -1728) is not maximal at 2
  EXPECT_EQ(run({"invariants", "--poly", "x^3-8"}).status, cli::kExitUsage);
  EXPECT_EQ(run({"invariants", "--form", "1,0,0,8"}).status, cli::kExitUsage);
  Outcome nm = run({"invariants", "--form", "4,0,0,-2"});
  EXPECT_EQ(nm.status, cli::kExitCheckFailed) << nm.out << nm.err;
}

TEST(Cli, ConstantsTable) {
  Outcome r = run({"constants", "--pmax", "1000"});
  EXPECT_EQ(r.status, cli::kExitPass) << r.err;
  EXPECT_NE(r.out.find("radical_local\tp=2\t3\t"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("radical_local\tp=3\t11/3\t"), std::string::npos);
  EXPECT_NE(r.out.find("name\tparameters\tvalue\terror\tP_max"), std::string::npos);
}

TEST(Cli, RadicalAndIndependence) {
  Outcome r = run({"radical", "--X", "100,300", "--cache", cache().string()});
  EXPECT_EQ(r.status, cli::kExitPass) << r.err;
  EXPECT_NE(r.out.find("minus_X1\tcount\t"), std::string::npos);
  Outcome i = run({"independence", "--X", "1e5", "--cache", cache().string()});
  EXPECT_EQ(i.status, cli::kExitPass) << i.err;
  EXPECT_NE(i.out.find("restricted_d\t-3\tfields\t"), std::string::npos);
  EXPECT_NE(i.out.find("\tsplit\t0\n"), std::string::npos) << i.out;
  EXPECT_EQ(run({"independence", "--alpha", "2", "--beta", "1", "--X", "1000", "--tolerance", "0.1"}).status,
            cli::kExitUsage);
}

TEST(Cli, Report) {
  Outcome r = run({"report", "--X", "1e5", "--cache", cache().string()});
  EXPECT_EQ(r.status, cli::kExitPass) << r.err;
  EXPECT_NE(r.out.find("real\tcount\t"), std::string::npos);
  EXPECT_NE(r.out.find("uniformity\t"), std::string::npos);
}
