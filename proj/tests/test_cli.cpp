#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "wavebench/csv.hpp"

using namespace wavebench;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "wavebench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

const std::string kSpec = std::string(WAVEBENCH_CONFIG_DIR) + "/a100.spec";

}  // namespace

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(invoke({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(invoke({"run", "--help"}).code, cli::kExitOk);
}

TEST(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(invoke({}).code, cli::kExitConfig);
  EXPECT_EQ(invoke({"bogus"}).code, cli::kExitConfig);
  EXPECT_EQ(invoke({"run", "--grid", "0"}).code, cli::kExitConfig);
  EXPECT_EQ(invoke({"run", "--variant", "nope"}).code, cli::kExitConfig);
  EXPECT_EQ(invoke({"run", "--steps", "abc"}).code, cli::kExitConfig);
  EXPECT_EQ(invoke({"run", "--grid", "16", "--halo", "9"}).code, cli::kExitConfig);
  EXPECT_EQ(invoke({"roofline"}).code, cli::kExitConfig);
  EXPECT_EQ(invoke({"sweep", "--sizes", "16,8"}).code, cli::kExitConfig);
}

TEST(Cli, RunWritesCsvRow) {
  const auto csv = temp("wavebench_cli_run.csv");
  const Outcome o = invoke({"run", "--grid", "16", "--steps", "3", "--variant", "tiled3d",
                            "--block", "8,8,8", "--schedule", "fine", "--lanes", "2", "--reps",
                            "2", "--csv", csv.string()});
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  const auto rows = read_csv(csv);
  ASSERT_EQ(rows.size(), 1U);
  EXPECT_EQ(rows[0].variant, "tiled3d");
  EXPECT_EQ(rows[0].schedule, "fine:2");
  EXPECT_EQ(rows[0].nx, 16);
  EXPECT_EQ(rows[0].steps, 3);
  EXPECT_EQ(rows[0].reps, 2);
  EXPECT_EQ(rows[0].status, "ok");
  std::filesystem::remove(csv);
}

TEST(Cli, BlowupExitsThree) {
  const auto csv = temp("wavebench_cli_blowup.csv");
  const Outcome o = invoke({"run", "--grid", "16", "--steps", "2", "--noise", "1e308", "--csv",
                            csv.string()});
  EXPECT_EQ(o.code, cli::kExitBlowup);
  const auto rows = read_csv(csv);
  ASSERT_EQ(rows.size(), 1U);
  EXPECT_EQ(rows[0].status, "blowup");
  std::filesystem::remove(csv);
}

TEST(Cli, VerifyBreachExitsOne) {
  EXPECT_EQ(invoke({"verify", "--grid", "16"}).code, cli::kExitOk);
  const Outcome o = invoke({"verify", "--grid", "16", "--inject-fault", "stream-fixed"});
  EXPECT_EQ(o.code, cli::kExitBreach);
  EXPECT_NE(o.out.find("FAIL kernel   stream-fixed"), std::string::npos) << o.out;
}

TEST(Cli, SweepWritesEveryCell) {
  const auto csv = temp("wavebench_cli_sweep.csv");
  const auto svg = temp("wavebench_cli_sweep.svg");
  const Outcome o = invoke({"sweep", "--sizes", "8,12", "--steps", "2", "--reps", "1",
                            "--schedule", "serial", "--schedule", "fine", "--csv", csv.string(),
                            "--svg", svg.string()});
  ASSERT_EQ(o.code, cli::kExitOk) << o.err;
  EXPECT_EQ(read_csv(csv).size(), 4U);
  EXPECT_TRUE(std::filesystem::exists(svg));
  std::filesystem::remove(csv);
  std::filesystem::remove(svg);
}

TEST(Cli, RooflineAndModel) {
  const auto svg = temp("wavebench_cli_roof.svg");
  const Outcome r = invoke({"roofline", "--machine-spec", kSpec, "--point", "tiled:0.88:381.254",
                            "--svg", svg.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("1368.4"), std::string::npos) << r.out;
  EXPECT_TRUE(std::filesystem::exists(svg));
  std::filesystem::remove(svg);
  EXPECT_EQ(invoke({"roofline", "--machine-spec", kSpec, "--point", "bad"}).code,
            cli::kExitConfig);

  const Outcome m = invoke({"model", "--grid", "32", "--block", "16,16,16"});
  ASSERT_EQ(m.code, cli::kExitOk) << m.err;
  EXPECT_NE(m.out.find("10240"), std::string::npos) << m.out;
  EXPECT_NE(m.out.find("1/9"), std::string::npos) << m.out;
}
