#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ulab/harness.hpp"
#include "ulab_cli/cli.hpp"

namespace ulab::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "ulab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Value of `key=` in a key=value report.
std::string field(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return {};
}

class CliDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ulab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    unsetenv("ULAB_THREADS");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    unsetenv("ULAB_THREADS");
  }
  std::string out(const std::string& sub = "") const { return (dir_ / sub).string(); }
  fs::path dir_;
};

TEST(Thresholds, TenByTenRankOne) {
  const Result r = invoke({"thresholds", "--n", "10", "--r", "1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(field(r.out, "strong"), "36");
  EXPECT_EQ(field(r.out, "weak"), "20");
  EXPECT_EQ(field(r.out, "nuclear_ref"), "38");
  EXPECT_EQ(field(r.out, "manifold_dim_2r"), "36");
  EXPECT_EQ(field(r.out, "unit_manifold_dim_2r"), "35");
}

TEST(Thresholds, EightByEightRankOne) {
  const Result r = invoke({"thresholds", "--n", "8", "--r", "1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(field(r.out, "strong"), "28");
  EXPECT_EQ(field(r.out, "weak"), "16");
}

TEST(Thresholds, RankZeroIsUsageError) {
  const Result r = invoke({"thresholds", "--n", "10", "--r", "0"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Thresholds, RankAboveHalfWarns) {
  const Result r = invoke({"thresholds", "--n", "4", "--r", "3"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(field(r.out, "strong"), "n/a");
  EXPECT_EQ(field(r.out, "weak"), "16");
}

TEST(Thresholds, RankAboveSideIsUsageError) {
  EXPECT_EQ(invoke({"thresholds", "--n", "3", "--r", "4"}).code, kExitUsage);
}

TEST(Usage, MalformedInput) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"bogus"},
           {"thresholds", "--n", "ten", "--r", "1"},
           {"thresholds", "--n", "10"},
           {"recover", "--n", "4", "--r", "1", "--m", "4", "--bogus"},
           {"recover", "--n", "4", "--r", "1", "--m", "4", "--method", "sdp"},
           {"recover", "--n", "3", "--r", "1", "--m", "10"},
           {"--threads", "0", "thresholds", "--n", "4", "--r", "1"}}) {
    const Result r = invoke(args);
    EXPECT_EQ(r.code, kExitUsage) << testing::PrintToString(args);
    EXPECT_NE(r.err.find("Usage"), std::string::npos) << testing::PrintToString(args);
  }
}

TEST(Usage, HelpExitsCleanly) {
  const Result r = invoke({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("phase"), std::string::npos);
}

TEST(Recover, SquareOperatorSucceedsForEveryMethod) {
  for (const char* method : {"rank_min", "nuclear_min", "unicity_search"}) {
    const Result r = invoke({"recover", "--n", "4", "--r", "1", "--m", "16", "--method", method});
    EXPECT_EQ(r.code, kExitOk) << method << ": " << r.err;
  }
}

TEST(Recover, PrintsOneCsvRow) {
  const Result r = invoke({"recover", "--n", "4", "--r", "1", "--m", "16"});
  std::istringstream in(r.out);
  const PhaseTable t = read_csv(in);
  ASSERT_EQ(t.records().size(), 1u);
  EXPECT_EQ(t.records().front().m, 16u);
  EXPECT_TRUE(t.records().front().success);
  EXPECT_EQ(t.records().front().wall_time_s, 0.0);
}

TEST(Recover, WeakThresholdWithDefaultSeed) {
  EXPECT_EQ(invoke({"recover", "--n", "8", "--r", "1", "--m", "16"}).code, kExitOk);
}

TEST(Recover, UnderdeterminedIsNegative) {
  EXPECT_EQ(invoke({"recover", "--n", "8", "--r", "1", "--m", "8"}).code, kExitNegative);
}

TEST(Recover, SeedChangesTheTrial) {
  const Result a = invoke({"--seed", "1", "recover", "--n", "5", "--r", "1", "--m", "12"});
  const Result b = invoke({"recover", "--n", "5", "--r", "1", "--m", "12", "--seed", "2"});
  EXPECT_NE(a.out, b.out);
  EXPECT_EQ(a.out, invoke({"recover", "--n", "5", "--r", "1", "--m", "12", "--seed", "1"}).out);
}

TEST_F(CliDir, MinimalPhaseGrid) {
  const Result r = invoke({"phase", "--n", "4", "--r", "1", "--m", "10", "--trials", "1", "--out", out()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir_)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, (std::vector<std::string>{"crossings.csv", "phase_rank_min_4_1.svg",
                                             "summary.csv", "trials.csv"}));
  const std::string svg = slurp(dir_ / "phase_rank_min_4_1.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("weak 8"), std::string::npos);
  EXPECT_NE(svg.find("strong 12"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST_F(CliDir, RankMinCrossingBelowWeakThreshold) {
  const Result r = invoke({"phase", "--n", "8", "--r", "1", "--m-min", "8", "--m-max", "20",
                           "--trials", "20", "--out", out()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(slurp(dir_ / "crossings.csv"));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::vector<std::string> cols;
  std::stringstream rs(row);
  for (std::string c; std::getline(rs, c, ',');) cols.push_back(c);
  ASSERT_EQ(cols.size(), 7u);
  EXPECT_EQ(cols[0], "rank_min");
  ASSERT_FALSE(cols[3].empty());
  EXPECT_LE(std::stod(cols[3]), 16.0);
  EXPECT_EQ(cols[4], "16");
}

TEST_F(CliDir, RerunIsByteIdentical) {
  const std::vector<std::string> grid{"phase", "--n", "5", "--r", "1", "--m", "8,12,16",
                                      "--method", "rank_min,nuclear_min", "--trials", "3"};
  auto with_out = [&](const std::string& d, std::vector<std::string> extra) {
    auto args = grid;
    args.insert(args.end(), {"--out", d});
    args.insert(args.end(), extra.begin(), extra.end());
    return invoke(args).code;
  };
  ASSERT_EQ(with_out(out("a"), {"--threads", "1"}), kExitOk);
  ASSERT_EQ(with_out(out("b"), {"--threads", "1"}), kExitOk);
  setenv("ULAB_THREADS", "4", 1);
  ASSERT_EQ(with_out(out("c"), {"--threads", "1"}), kExitOk);
  for (const char* f : {"trials.csv", "summary.csv", "crossings.csv", "phase_rank_min_5_1.svg",
                        "phase_nuclear_min_5_1.svg"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "c" / f)) << f;
  }
}

TEST_F(CliDir, InvalidThreadEnvironmentIsUsageError) {
  setenv("ULAB_THREADS", "many", 1);
  EXPECT_EQ(invoke({"phase", "--n", "4", "--r", "1", "--m", "4", "--out", out()}).code, kExitUsage);
}

TEST_F(CliDir, EmptyGridIsUsageError) {
  EXPECT_EQ(invoke({"phase", "--n", "2", "--r", "1", "--m", "9", "--out", out()}).code, kExitUsage);
  EXPECT_EQ(invoke({"phase", "--n", "4", "--r", "1", "--out", out()}).code, kExitUsage);
}

TEST(Unicity, NoMeasurementsFindsIntersection) {
  const Result r = invoke({"unicity", "--n", "8", "--r", "1", "--m", "0"});
  EXPECT_EQ(r.out.rfind("FOUND", 0), 0u) << r.out;
  EXPECT_EQ(r.code, kExitNegative);
}

TEST(Unicity, StrongThresholdReportsNotFound) {
  const Result r = invoke({"unicity", "--n", "8", "--r", "1", "--m", "28"});
  EXPECT_EQ(r.out.rfind("NOT FOUND", 0), 0u) << r.out;
  EXPECT_EQ(r.code, kExitOk);
}

TEST(Unicity, FullRankSearchUsesExactCertificate) {
  const Result r = invoke({"unicity", "--n", "4", "--r", "1", "--m", "10", "--k", "4"});
  EXPECT_EQ(r.out.rfind("FOUND", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("k=4"), std::string::npos);
}

TEST(Unicity, RankOverrideOutOfRange) {
  EXPECT_EQ(invoke({"unicity", "--n", "4", "--r", "1", "--m", "10", "--k", "5"}).code, kExitUsage);
}

TEST(SmallBall, MatchesGaussianReference) {
  const Result a = invoke({"smallball", "--eps", "0.1"});
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_NEAR(std::stod(field(a.out, "estimate")), 0.0796557, 0.003);
  EXPECT_EQ(field(a.out, "reference"), "0.0796557");
  const Result b = invoke({"smallball", "--eps", "1.0"});
  EXPECT_NEAR(std::stod(field(b.out, "estimate")), 0.682689, 0.005);
  EXPECT_EQ(field(b.out, "reference"), "0.682689");
}

TEST(SmallBall, ZeroTrialsIsUsageError) {
  EXPECT_EQ(invoke({"smallball", "--eps", "0.1", "--trials", "0"}).code, kExitUsage);
  EXPECT_EQ(invoke({"smallball", "--eps", "0"}).code, kExitUsage);
}

}  // namespace
}  // namespace ulab::cli
