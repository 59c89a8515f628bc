// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "cloudcast/io.hpp"
#include "cloudcast/npy.hpp"
#include "test_util.hpp"

namespace cloudcast {
namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(CLOUDCAST_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

TEST(Cli, ExitCodes) {
  testing::TempDir dir("cli_exit");
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("forecast --input " + q(dir / "missing.npy") + " --output " + q(dir.path())), 2);
  EXPECT_EQ(cli("synth --flow shear:1 --output " + q(dir.path())), 1);
  EXPECT_EQ(cli("synth --frames 4 --size 32 --output " + q(dir.path())), 0);
  EXPECT_EQ(cli("forecast --method magic --input " + q(dir / "synthetic.npy") + " --output " +
                q(dir / "f")),
            1);
}

TEST(Cli, SynthForecastEval) {
  testing::TempDir dir("cli_e2e");
  ASSERT_EQ(cli("synth --flow translation:2,0 --frames 20 --size 64 --seed 3 --output " +
                q(dir / "syn")),
            0);
  const LabelSequence syn = load_sequence(dir / "syn/synthetic.npy", dir / "syn/synthetic.json");
  EXPECT_EQ(syn.size(), 20u);
  EXPECT_EQ(syn.height(), 64u);
  const npy::Array flow = npy::read(dir / "syn/true_flow.npy");
  EXPECT_EQ(flow.shape, (std::vector<std::size_t>{2, 64, 64}));

  const std::string in = " --input " + q(dir / "syn/synthetic.npy");
  ASSERT_EQ(cli("forecast --method persistence" + in + " --output " + q(dir / "pers")), 0);
  ASSERT_EQ(cli("forecast --method tvl1" + in + " --output " + q(dir / "tvl1")), 0);

  const nlohmann::json index = parse_json_file(dir / "tvl1/forecasts.json");
  ASSERT_FALSE(index["forecasts"].empty());
  const std::string stem = index["forecasts"][0]["array"].get<std::string>();
  const npy::Array arr = npy::read(dir / "tvl1" / stem);
  EXPECT_EQ(arr.shape, (std::vector<std::size_t>{16, 64, 64}));

  ASSERT_EQ(cli("eval --input " + q(dir / "pers") + in + " --output " + q(dir / "ep")), 0);
  ASSERT_EQ(cli("eval --input " + q(dir / "tvl1") + in + " --output " + q(dir / "et")), 0);
  const nlohmann::json mp = parse_json_file(dir / "ep/metrics.json");
  const nlohmann::json mt = parse_json_file(dir / "et/metrics.json");
  EXPECT_LT(mp["mean_accuracy"].get<double>(), 1.0);
  EXPECT_NEAR(mp["brier_skill_score"].get<double>(), 0.0, 1e-12);
  EXPECT_GT(mt["mean_accuracy"].get<double>(), mp["mean_accuracy"].get<double>());
  EXPECT_EQ(mt["per_step_accuracy"].size(), 16u);
  EXPECT_EQ(mt["hourly_accuracy"].size(), 4u);
  EXPECT_TRUE(std::filesystem::exists(dir / "et/per_step.csv"));
}

TEST(Cli, EvalOfTruthAgainstItselfIsPerfect) {
  testing::TempDir dir("cli_self");
  ASSERT_EQ(cli("synth --flow translation:1,1 --frames 3 --size 32 --output " + q(dir.path())), 0);
  const std::string s = q(dir / "synthetic.npy");
  ASSERT_EQ(cli("eval --input " + s + " --input " + s + " --output " + q(dir / "ev")), 0);
  const nlohmann::json m = parse_json_file(dir / "ev/metrics.json");
  EXPECT_EQ(m["mean_accuracy"].get<double>(), 1.0);
  EXPECT_EQ(m["frequency_bias"].get<double>(), 1.0);
  EXPECT_EQ(m["brier_score"].get<double>(), 0.0);
}

TEST(Cli, PipelineCommands) {
  testing::TempDir dir("cli_pipe");
  ASSERT_EQ(cli("synth --frames 8 --size 40 --output " + q(dir.path())), 0);
  const std::string in = " --input " + q(dir / "synthetic.npy");
  EXPECT_EQ(cli("split --fraction 0.75" + in + " --output " + q(dir / "sp")), 0);
  EXPECT_EQ(load_sequence(dir / "sp/train.npy", dir / "sp/train.json").size(), 6u);
  EXPECT_EQ(cli("crop --size 20" + in + " --output " + q(dir / "cr")), 0);
  EXPECT_EQ(load_sequence(dir / "cr/cropped.npy", dir / "cr/cropped.json").width(), 20u);
  EXPECT_EQ(cli("downsample --factor 5" + in + " --output " + q(dir / "ds")), 0);
  EXPECT_EQ(load_sequence(dir / "ds/downsampled.npy", dir / "ds/downsampled.json").width(), 8u);
  EXPECT_EQ(cli("repair" + in + " --output " + q(dir / "rp")), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "rp/gap_report.json"));
  EXPECT_EQ(cli("reduce" + in + " --output " + q(dir / "rd")), 0);
  EXPECT_EQ(cli("render" + in + " --output " + q(dir / "png")), 0);
  std::size_t pngs = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "png")) pngs += e.path().extension() == ".png";
  EXPECT_EQ(pngs, 8u);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  testing::TempDir dir("cli_cfg");
  write_text(dir / "cfg.json", R"({"synthetic": {"frames": 5, "height": 24, "width": 24}})");
  ASSERT_EQ(cli("synth --config " + q(dir / "cfg.json") + " --output " + q(dir / "a")), 0);
  EXPECT_EQ(load_sequence(dir / "a/synthetic.npy", dir / "a/synthetic.json").size(), 5u);
  ASSERT_EQ(cli("synth --config " + q(dir / "cfg.json") + " --frames 3 --output " + q(dir / "b")), 0);
  const LabelSequence b = load_sequence(dir / "b/synthetic.npy", dir / "b/synthetic.json");
  EXPECT_EQ(b.size(), 3u);
  EXPECT_EQ(b.width(), 24u);
  write_text(dir / "bad.json", R"({"tvl1": {"lamda": 1}})");
  EXPECT_EQ(cli("synth --config " + q(dir / "bad.json") + " --output " + q(dir / "c")), 1);
  write_text(dir / "junk.json", "{ not json");
  EXPECT_EQ(cli("synth --config " + q(dir / "junk.json") + " --output " + q(dir / "c")), 1);
}

TEST(Cli, RerunsAreByteIdentical) {
  testing::TempDir dir("cli_det");
  for (const char* run : {"r1", "r2"}) {
    const std::filesystem::path out = dir / run;
    ASSERT_EQ(cli("synth --flow rotation:32,32,0.02 --frames 18 --size 64 --seed 5 --output " + q(out)), 0);
    ASSERT_EQ(cli("forecast --method tvl1 --input " + q(out / "synthetic.npy") + " --output " + q(out / "f")), 0);
    ASSERT_EQ(cli("eval --input " + q(out / "f") + " --input " + q(out / "synthetic.npy") + " --output " + q(out / "e")), 0);
  }
  for (const char* rel : {"synthetic.npy", "synthetic.json", "f/forecasts.json", "e/metrics.json", "e/per_step.csv"}) {
    EXPECT_EQ(read_text(dir / "r1" / rel), read_text(dir / "r2" / rel)) << rel;
  }
  for (const auto& e : std::filesystem::directory_iterator(dir / "r1/f")) {
    EXPECT_EQ(read_text(e.path()), read_text(dir / "r2/f" / e.path().filename())) << e.path();
  }
}

}  // namespace
}  // namespace cloudcast
