// Copyright 2026 The seltext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <random>
#include <string>

#include "seltext/checkpoint.hpp"
#include "seltext/image.hpp"
#include "seltext/manifest.hpp"
#include "seltext/style_net.hpp"
#include "test_util.hpp"

namespace seltext {
namespace {

using testing::TempDir;

int RunCli(const std::string& args) {
  const std::string cmd = std::string(SELTEXT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_("cli") {
    NetworkConfig c;
    c.num_styles = 4;
    c.seed = 8;
    StyleNetwork net(c);
    int k = 0;
    for (auto& p : net.Parameters()) {
      if (p.name.find("norm") == std::string::npos) continue;
      for (double& v : p.tensor->values()) v = static_cast<float>(v + 0.05 * ((k++ % 9) - 4));
    }
    SaveCheckpoint(dir_ / "net.json", net);
    std::mt19937_64 rng(70);
    SaveImage(dir_ / "in.png", testing::RandomImage8(12, 10, rng));
  }
  TempDir dir_;
};

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli(""), 2);
  EXPECT_EQ(RunCli("no-such-command"), 2);
  EXPECT_EQ(RunCli("stylize --in x.png"), 2);
  EXPECT_EQ(RunCli("stylize --checkpoint a --in b --out c --style-index 1 --style-weights 1,0"), 2);
}

TEST_F(CliTest, OperationFailureExitsOne) {
  EXPECT_EQ(RunCli("stylize --checkpoint " + Q(dir_ / "missing.json") + " --in " + Q(dir_ / "in.png") +
                " --out " + Q(dir_ / "o.png")),
            1);
}

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(RunCli("--help"), 0); }

TEST_F(CliTest, GradcheckPasses) { EXPECT_EQ(RunCli("gradcheck"), 0); }

TEST_F(CliTest, StyleIndexEqualsOneHotWeights) {
  const std::string base = "stylize --checkpoint " + Q(dir_ / "net.json") + " --in " + Q(dir_ / "in.png");
  ASSERT_EQ(RunCli(base + " --out " + Q(dir_ / "a.png") + " --style-index 3"), 0);
  ASSERT_EQ(RunCli(base + " --out " + Q(dir_ / "b.png") + " --style-weights 0,0,0,1"), 0);
  ASSERT_EQ(RunCli(base + " --out " + Q(dir_ / "c.png") + " --style-index 0"), 0);
  EXPECT_EQ(LoadImage(dir_ / "a.png"), LoadImage(dir_ / "b.png"));
  EXPECT_NE(LoadImage(dir_ / "a.png"), LoadImage(dir_ / "c.png"));
}

TEST_F(CliTest, BlendWithZeroProbmapReproducesInput) {
  std::mt19937_64 rng(71);
  SaveImage(dir_ / "styl.png", testing::RandomImage8(12, 10, rng));
  SaveProbMap(dir_ / "zero.png", TextProbMap(12, 10, 0.0));
  ASSERT_EQ(RunCli("blend --content " + Q(dir_ / "in.png") + " --stylized " + Q(dir_ / "styl.png") +
                " --probmap " + Q(dir_ / "zero.png") + " --out " + Q(dir_ / "out.png")),
            0);
  EXPECT_EQ(LoadImage(dir_ / "out.png"), LoadImage(dir_ / "in.png"));
}

TEST_F(CliTest, ConfigFileAndOverride) {
  WriteFileBytes(dir_ / "run.ini", "checkpoint = " + (dir_ / "net.json").string() +
                                       "\nin = " + (dir_ / "in.png").string() +
                                       "\nstyle-index = 3\n");
  ASSERT_EQ(RunCli("stylize --config " + Q(dir_ / "run.ini") + " --out " + Q(dir_ / "cfg.png")), 0);
  ASSERT_EQ(RunCli("stylize --config " + Q(dir_ / "run.ini") + " --out " + Q(dir_ / "cfg0.png") +
                " --style-index 0"),
            0);
  const std::string base = "stylize --checkpoint " + Q(dir_ / "net.json") + " --in " + Q(dir_ / "in.png");
  ASSERT_EQ(RunCli(base + " --out " + Q(dir_ / "d3.png") + " --style-index 3"), 0);
  ASSERT_EQ(RunCli(base + " --out " + Q(dir_ / "d0.png") + " --style-index 0"), 0);
  EXPECT_EQ(ReadFileBytes(dir_ / "cfg.png"), ReadFileBytes(dir_ / "d3.png"));
  EXPECT_EQ(ReadFileBytes(dir_ / "cfg0.png"), ReadFileBytes(dir_ / "d0.png"));
}

TEST_F(CliTest, AugmentAndTrainDistill) {
  testing::WriteSyntheticIcdarDataset(dir_.path() / "data", 3, 8, 5);
  ASSERT_EQ(RunCli("augment --manifest " + Q(dir_ / "data/manifest.json") + " --out " +
                Q(dir_ / "aug") + " --checkpoint " + Q(dir_ / "net.json") +
                " --styles-per-image 2 --seed 4"),
            0);
  EXPECT_EQ(LoadManifest(dir_ / "aug/manifest.json").entries.size(), 9u);
  ASSERT_EQ(RunCli("train-distill --teacher " + Q(dir_ / "net.json") + " --manifest " +
                Q(dir_ / "data/manifest.json") + " --out " + Q(dir_ / "student.json") +
                " --phase1-epochs 1 --phase2-epochs 1 --trace " + Q(dir_ / "d.csv")),
            0);
  EXPECT_EQ(LoadCheckpoint(dir_ / "student.json").num_styles(), 4);
  EXPECT_EQ(RunCli("train-distill --teacher " + Q(dir_ / "net.json") + " --manifest " +
                Q(dir_ / "data/manifest.json") + " --out " + Q(dir_ / "s2.json") +
                " --lambda-text 1 --lambda-bg 1"),
            1);
}

TEST_F(CliTest, TrainStyle) {
  testing::WriteSyntheticIcdarDataset(dir_.path() / "data", 2, 8, 5);
  std::mt19937_64 rng(72);
  SaveImage(dir_ / "s0.png", testing::RandomImage8(9, 9, rng));
  SaveImage(dir_ / "s1.png", testing::RandomImage8(9, 9, rng));
  ASSERT_EQ(RunCli("train-style --content-manifest " + Q(dir_ / "data/manifest.json") + " --style " +
                Q(dir_ / "s0.png") + " --style " + Q(dir_ / "s1.png") + " --out " +
                Q(dir_ / "trained.json") + " --steps 2 --image-size 8 --batch-size 1"),
            0);
  EXPECT_EQ(LoadCheckpoint(dir_ / "trained.json").num_styles(), 2);
}

}  // namespace
}  // namespace seltext
