#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "restless/io.hpp"

using namespace restless;
namespace fs = std::filesystem;

namespace {

const std::string kCli = RESTLESS_CLI_PATH;
const std::string kSource = RESTLESS_SOURCE_DIR;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("restless_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, const std::string& out = "out") const {
    const std::string cmd = "'" + kCli + "' --out-dir '" + (dir_ / out).string() + "' " + args + " > '" +
                            (dir_ / "stdout.txt").string() + "' 2> '" + (dir_ / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out(const std::string& name, const std::string& sub = "out") const {
    return read_file((dir_ / sub / name).string());
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("bogus"), 1);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("--config /nonexistent/cfg.json timing"), 2);
  std::ofstream(dir_ / "bad.json") << "{\n  \"rng\": {\"algorithm\": \"mt19937_64/restless-v1\", \"master_seed\": 1},\n"
                                       "  \"physics\": {\"p_s_c\": 2}\n}\n";
  EXPECT_EQ(run("--config '" + (dir_ / "bad.json").string() + "' timing"), 2);
  EXPECT_NE(read_file((dir_ / "stderr.txt").string()).find(":3:"), std::string::npos);
  EXPECT_EQ(run("gst-fcl /nonexistent/gates.json"), 5);
  std::ofstream(dir_ / "blocker") << "x";
  EXPECT_EQ(run("timing", "blocker/sub"), 5);
  EXPECT_EQ(run("--config '" + kSource + "/config/default.json' timing"), 0);
}

TEST_F(Cli, TimingJson) {
  ASSERT_EQ(run("--config '" + kSource + "/config/default.json' timing"), 0);
  const json j = json::parse(out("timing.json"));
  EXPECT_EQ(j.at("n_cl").get<int>(), 300);
  ASSERT_EQ(j.at("bars").size(), 4u);
  for (const auto& b : j.at("bars")) {
    if (b.at("pipeline") == "improved" && b.at("mode") == "restless") {
      EXPECT_NEAR(b.at("acquire_s").get<double>(), 0.124, 1e-12);
    }
  }
  const auto cfg = load_config(kSource + "/config/default.json");
  EXPECT_EQ(j.at("provenance").at("config_hash").get<std::string>(), config_hash(cfg.document));
  EXPECT_EQ(j.at("provenance").at("master_seed").get<std::uint64_t>(), 20171016u);
}

TEST_F(Cli, GstOnIdealGateSet) {
  std::ofstream(dir_ / "ideal.json") << gate_set_to_json(GateSet::ideal()).dump();
  ASSERT_EQ(run("gst-fcl '" + (dir_ / "ideal.json").string() + "'"), 0);
  const json j = json::parse(out("gst_fcl.json"));
  EXPECT_EQ(j.at("f_cl").get<double>(), 1.0);
  EXPECT_EQ(j.at("negative_rotations"), "error_transfer");
  std::ofstream(dir_ / "broken.json") << R"({"I": [1, 0]})";
  EXPECT_EQ(run("gst-fcl '" + (dir_ / "broken.json").string() + "'"), 2);
}

TEST_F(Cli, RbRerunsAreByteIdenticalAcrossJobs) {
  const std::string args = "--mode conventional rb --n-cl 2 50 200 --repetitions 2";
  ASSERT_EQ(run("--jobs 1 " + args, "a"), 0);
  ASSERT_EQ(run("--jobs 2 " + args, "b"), 0);
  EXPECT_EQ(out("rb_conventional.csv", "a"), out("rb_conventional.csv", "b"));
  EXPECT_EQ(out("rb_conventional_fit.json", "a"), out("rb_conventional_fit.json", "b"));
  ASSERT_EQ(run("--seed 5 " + args, "c"), 0);
  EXPECT_NE(out("rb_conventional.csv", "a"), out("rb_conventional.csv", "c"));

  const auto csv = out("rb_conventional.csv", "a");
  EXPECT_EQ(csv.rfind("# tool: restless", 0), 0u);
  EXPECT_NE(csv.find("# config_hash: "), std::string::npos);
  EXPECT_NE(csv.find("# master_seed: 1\n"), std::string::npos);
}

TEST_F(Cli, SnrModelOnlyColumns) {
  ASSERT_EQ(run("--config '" + kSource + "/config/default.json' snr --model-only"), 0);
  const auto csv = out("snr.csv");
  std::string header;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') {
      header = line;
      break;
    }
  EXPECT_NE(header.find("model_"), std::string::npos) << header;
  EXPECT_NE(header.find("monte_carlo_"), std::string::npos) << header;
  const json s = json::parse(out("snr_summary.json"));
  EXPECT_TRUE(s.contains("provenance"));
}
