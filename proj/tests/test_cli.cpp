#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli_app.hpp"

namespace fs = std::filesystem;
using jjchain::io::Json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = jjchain::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("jjchain_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SpectrumJson) {
  const auto r = run({"spectrum", "--n", "9", "--N", "138", "--lj", "4.75e-9", "--fp", "13.66e9",
                      "--zc", "16200", "--modes", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["schema_version"], "jjchain.result/1");
  EXPECT_EQ(j["command"], "spectrum");
  EXPECT_TRUE(j.contains("payload"));
  EXPECT_EQ(j["inputs_digest"].get<std::string>().size(), 16u);
}

TEST_F(Cli, SpectrumCsvToFile) {
  const auto r = run({"spectrum", "--n", "1", "--N", "20", "--lj", "1e-9", "--cj", "50e-15", "--cg",
                      "1e-15", "--format", "csv", "-o", path("s.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const std::string text = jjchain::io::read_file(path("s.csv"));
  EXPECT_FALSE(text.empty());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 20);  // header + 19 modes
}

TEST_F(Cli, SynthThenFitModes) {
  auto s = run({"synth", "peaks", "--fp", "13.66e9", "--f1", "1.40e9", "--N", "138", "--first", "3",
                "--last", "40", "-o", path("peaks.csv")});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto r = run({"fit-modes", path("peaks.csv"), "--N", "138", "--n", "9", "--anchor-lj", "4.75e-9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto p = Json::parse(r.out)["payload"];
  EXPECT_EQ(p["dispersion"]["index_offset"], 2);
}

TEST_F(Cli, SynthRequiresSeedWithNoise) {
  const auto r = run({"synth", "peaks", "--fp", "13.66e9", "--f1", "1.40e9", "--N", "138", "--last",
                      "10", "--noise", "0.01"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(Json::parse(r.err)["error"], "InvalidParameter");
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"dc-fit", path("missing.csv"), "--jcts-per-stack", "1"}).code, 1);
  EXPECT_EQ(run({"spectrum", "--bogus"}).code, 1);
  jjchain::io::write_file(path("bad.csv"), "nope\n");
  EXPECT_EQ(run({"dc-fit", path("bad.csv"), "--jcts-per-stack", "1"}).code, 1);
  jjchain::io::write_file(path("deg.csv"), "stack_count,resistance_ohm\n4,100\n4,110\n");
  const auto d = run({"dc-fit", path("deg.csv"), "--jcts-per-stack", "1"});
  EXPECT_EQ(d.code, 2);
  EXPECT_EQ(Json::parse(d.err)["error"], "DegenerateData");
  EXPECT_EQ(run({"geometry", "--side", "1e-7", "--pitch", "1e-7", "--layers", "9", "--angle", "30"}).code, 2);
  EXPECT_EQ(run({"design", "--target-zc", "16200", "--target-ltot", "5.9e-6", "--anchor-lj", "4.75e-9",
                 "--n-max", "9", "--N-max", "10"}).code, 2);
}

TEST_F(Cli, AmbiguousOffsetExitCode) {
  ASSERT_EQ(run({"synth", "peaks", "--fp", "8e9", "--f1", "1e9", "--N", "200", "--first", "3", "--last",
                 "6", "--noise", "0.05", "--seed", "3", "-o", path("p.csv")}).code, 0);
  const auto r = run({"fit-modes", path("p.csv"), "--N", "200"});
  EXPECT_EQ(r.code, 3);
  const auto e = Json::parse(r.err);
  EXPECT_EQ(e["error"], "AmbiguousOffset");
  EXPECT_EQ(e["candidates"].size(), 2u);
}

TEST_F(Cli, FitS11AndPlot) {
  ASSERT_EQ(run({"synth", "s11", "--f0", "4.074e9", "--q-c", "5530", "--q-i", "8295", "--noise",
                 "0.01", "--seed", "7", "-o", path("s.csv")}).code, 0);
  const auto r = run({"fit-s11", path("s.csv"), "--device", "ZA", "--mode", "3", "--plot", path("s.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto p = Json::parse(r.out)["payload"];
  EXPECT_NEAR(p["resonance"]["q_tot"].get<double>(), 3318.0, 0.02 * 3318.0);
  EXPECT_TRUE(fs::exists(path("s.svg")));
}

TEST_F(Cli, GeometryDefaults) {
  const auto r = run({"geometry", "--side", "1e-6", "--pitch", "20e-9", "--layers", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto p = Json::parse(r.out)["payload"];
  EXPECT_EQ(p["layers"].size(), 9u);
}

TEST_F(Cli, DigestTracksInputs) {
  const auto a = run({"geometry", "--side", "1e-6", "--pitch", "20e-9", "--layers", "9"});
  const auto b = run({"geometry", "--side", "1e-6", "--pitch", "20e-9", "--layers", "8"});
  EXPECT_NE(Json::parse(a.out)["inputs_digest"], Json::parse(b.out)["inputs_digest"]);
  EXPECT_EQ(a.out, run({"geometry", "--side", "1e-6", "--pitch", "20e-9", "--layers", "9"}).out);
}
