#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iafb/cli.hpp"

namespace iafb::cli {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  for (std::string f; std::getline(is, f, ',');) out.push_back(f);
  return out;
}

TEST(ParseSnrGrid, InclusiveStop) {
  EXPECT_EQ(parse_snr_grid("0:50:10"), (std::vector<double>{0, 10, 20, 30, 40, 50}));
  EXPECT_EQ(parse_snr_grid("0:45:10"), (std::vector<double>{0, 10, 20, 30, 40}));
  EXPECT_EQ(parse_snr_grid("30"), (std::vector<double>{30}));
  EXPECT_EQ(parse_snr_grid("-10:0:5"), (std::vector<double>{-10, -5, 0}));
  EXPECT_THROW(parse_snr_grid("0:10"), InvalidArgument);
  EXPECT_THROW(parse_snr_grid("0:10:0"), InvalidArgument);
  EXPECT_THROW(parse_snr_grid("a:b:c"), InvalidArgument);
}

TEST(FormatFixed6, SixDecimalsDotSeparator) {
  EXPECT_EQ(format_fixed6(1.0), "1.000000");
  EXPECT_EQ(format_fixed6(-2.5), "-2.500000");
  EXPECT_EQ(format_fixed6(12.1234567), "12.123457");
}

TEST(Sweep, ScaledPolicyEmitsSixRowsWithExactHeader) {
  const auto r = invoke({"sweep", "--snr", "0:50:10", "--policy", "scaled", "--tau", "2",
                         "--a-sum", "4.5", "--trials", "50", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 7u);
  EXPECT_EQ(ls[0], "snr_db,bits,mean_sum_pfb,mean_sum_lfb,mean_sum_delta,stderr_sum_lfb");
  const std::vector<std::string> expected_bits{"3", "6", "9", "13", "16", "19"};
  for (std::size_t k = 1; k < ls.size(); ++k) {
    const auto f = fields(ls[k]);
    ASSERT_EQ(f.size(), 6u);
    EXPECT_EQ(f[1], expected_bits[k - 1]);
  }
  EXPECT_EQ(fields(ls[4])[0], "30.000000");
  EXPECT_EQ(fields(ls[4])[1], "13");
}

TEST(Sweep, FixedPolicyHasConstantBitsColumn) {
  const auto r = invoke({"sweep", "--snr", "0:50:10", "--policy", "fixed", "--bits", "10",
                         "--trials", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 7u);
  for (std::size_t k = 1; k < ls.size(); ++k) EXPECT_EQ(fields(ls[k])[1], "10");
}

TEST(Sweep, ByteIdenticalAcrossRuns) {
  const std::vector<std::string> args{"sweep", "--snr", "0:30:10", "--trials", "40",
                                      "--seed", "99"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  EXPECT_EQ(invoke(threaded).out, a.out);
}

TEST(Sweep, WritesToFile) {
  const auto path = std::filesystem::temp_directory_path() / "iafb_sweep_test.csv";
  const auto r = invoke({"sweep", "--snr", "10", "--trials", "10", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  EXPECT_EQ(lines(content.str()).size(), 2u);
  std::filesystem::remove(path);
}

TEST(Sweep, PerUserGainsSetTheScaledConstant) {
  const auto a = invoke({"sweep", "--snr", "30", "--trials", "5", "--a", "1,1,1"});
  ASSERT_EQ(a.code, 0) << a.err;
  // log2(1000) + log2(3) = 11.55 -> 12
  EXPECT_EQ(fields(lines(a.out)[1])[1], "12");
}

TEST(Sweep, BadFlagsExitTwo) {
  EXPECT_EQ(invoke({"sweep", "--policy", "adaptive"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--snr", "1:2"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--m", "3"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--trials", "0"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--tau", "1", "--snr", "10"}).code, 2);
  EXPECT_EQ(invoke({"sweep", "--bogus"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  const auto r = invoke({"sweep", "--policy", "adaptive"});
  EXPECT_FALSE(r.err.empty());
}

TEST(Bits, SpotValues) {
  auto r = invoke({"bits", "--snr-db", "30", "--tau", "2", "--a-sum", "4.5", "--m", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "13\n");
  r = invoke({"bits", "--snr-db", "0", "--tau", "2", "--a-sum", "1.0", "--m", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0\n");
}

TEST(Bits, TauOfOneExitsTwo) {
  const auto r = invoke({"bits", "--snr-db", "30", "--tau", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("tau"), std::string::npos);
}

TEST(Bound, SpotValues) {
  auto r = invoke({"bound", "--snr-db", "30", "--bits", "1000000"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.000000\n");
  r = invoke({"bound", "--snr-db", "-200", "--bits", "0"});
  EXPECT_EQ(r.out, "0.000000\n");
  // Without --bits the real-valued scaling-law count is used.
  r = invoke({"bound", "--snr-db", "30", "--tau", "2", "--a", "1.5,1.5,1.5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1.000000\n");
  // Rounded-up bit count: log2(1 + 1000 * 4.5 * 2^-13).
  r = invoke({"bound", "--snr-db", "30", "--bits", "13"});
  EXPECT_EQ(r.out, format_fixed6(std::log2(1.0 + 4500.0 / 8192.0)) + "\n");
}

TEST(Bound, BadFlagsExitTwo) {
  EXPECT_EQ(invoke({"bound", "--snr-db", "30", "--a", "1,2"}).code, 2);
  EXPECT_EQ(invoke({"bound", "--snr-db", "30", "--tau", "0.5"}).code, 2);
  EXPECT_EQ(invoke({"bound"}).code, 2);
}

TEST(Verify, OnlyRunsOneCheck) {
  const auto r = invoke({"verify", "--only", "isotropy-combiner"});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 1u);
  EXPECT_EQ(ls[0].rfind("isotropy-combiner", 0), 0u);
  EXPECT_NE(ls[0].find("PASS"), std::string::npos);
}

TEST(Verify, UnknownCheckExitsTwo) {
  EXPECT_EQ(invoke({"verify", "--only", "no-such-check"}).code, 2);
}

TEST(Verify, DefaultSuiteAllPass) {
  const auto r = invoke({"verify"});
  EXPECT_EQ(r.code, 0) << r.out;
  const auto ls = lines(r.out);
  EXPECT_GE(ls.size(), 6u);
  for (const auto& l : ls) EXPECT_NE(l.find("PASS"), std::string::npos) << l;
}

TEST(Help, ExitsZero) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

}  // namespace
}  // namespace iafb::cli
