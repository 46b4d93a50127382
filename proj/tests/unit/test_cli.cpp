#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string tool() {
  const char* t = std::getenv("CAMTT_TOOL");
  return t ? t : "";
}

int run(const std::string& args) {
  const std::string cmd = "\"" + tool() + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("camtt_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const std::string kSmall =
    " --set scenario.num_scans=3 --set dataset.runs=1 --set dataset.scr=0 --set nn.epochs_step1=1"
    " --set nn.epochs_step2=1 --set experiment.workers=1";

}  // namespace

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    if (tool().empty()) GTEST_SKIP() << "CAMTT_TOOL not set";
  }
};

TEST_F(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("track --runs notanumber"), 1);
  EXPECT_EQ(run("track --set detector.bogus=1 --out " + dir.string()), 1);
  EXPECT_EQ(run("track --config /nonexistent.ini --out " + dir.string()), 1);
  EXPECT_EQ(run("track --methods NEMP --out " + dir.string()), 1);
  EXPECT_EQ(run("track --methods NEMP --weights /nonexistent.bin --out " + dir.string()), 2);
  EXPECT_EQ(run("report --out " + (dir / "empty").string()), 2);
  EXPECT_EQ(run("train --dataset /nonexistent --out " + dir.string()), 2);
  fs::remove_all(dir);
}

TEST_F(Cli, EndToEndIsReproducible) {
  const auto a = scratch("a"), b = scratch("b");
  for (const auto& d : {a, b}) {
    ASSERT_EQ(run("gen-dataset --seed 4" + kSmall + " --out " + d.string()), 0);
    ASSERT_EQ(run("train --seed 4" + kSmall + " --out " + d.string()), 0);
    ASSERT_EQ(run("track --seed 4 --scr 0,8 --runs 2 --methods MP,MP-NN,NEMP --verbose" + kSmall + " --weights " +
                  (d / "classifier.bin").string() + " --out " + (d / "sweep").string()),
              0);
  }
  for (const char* f : {"dataset/patches.bin", "dataset/labels.csv", "dataset/dataset.json", "classifier.bin",
                        "loss_curve.csv", "sweep/results.csv", "sweep/summary.csv", "sweep/per_scan.csv",
                        "sweep/tracks.csv", "sweep/diagnostics.jsonl"}) {
    SCOPED_TRACE(f);
    ASSERT_TRUE(fs::exists(a / f));
    EXPECT_EQ(slurp(a / f), slurp(b / f));
  }
  std::istringstream results(slurp(a / "sweep/results.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(results, line)) ++lines;
  EXPECT_EQ(lines, 1 + 3 * 2 * 2);

  const auto summary = slurp(a / "sweep/summary.csv");
  ASSERT_EQ(run("report --out " + (a / "sweep").string()), 0);
  EXPECT_EQ(slurp(a / "sweep/summary.csv"), summary);

  // The written config reproduces the sweep on its own.
  const auto c = scratch("c");
  ASSERT_EQ(run("track --config " + (a / "sweep/config.ini").string() + " --weights " +
                (a / "classifier.bin").string() + " --out " + c.string()),
            0);
  EXPECT_EQ(slurp(c / "results.csv"), slurp(a / "sweep/results.csv"));
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}
