// Copyright 2026 The qfselect Authors.
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

#include "qfs/cli.h"

#include <gtest/gtest.h>

#include <sstream>

#include "qfs/dataset_io.h"
#include "qfs/synthetic.h"
#include "test_util.h"

namespace qfs {
namespace {

using testing::TempDir;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qfselect");
  std::ostringstream out;
  std::ostringstream err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const std::filesystem::path& p) {
  const auto bytes = ReadFileBytes(p);
  return std::string(bytes.begin(), bytes.end());
}

TEST(CliTest, UsageErrorsExitTwo) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"demo", "--bogus"},
           {"calibrate"},
           {"calibrate", "--manifest", "m.csv", "--threshold", "1.5"},
           {"compress", "--manifest", "m.csv", "--strategy", "best"},
           {"compress", "--manifest", "m.csv"},
           {"demo", "--parallel", "0"},
           {"demo", "--form", "three"},
           {"evaluate", "--manifest", "m.csv", "--ranks", "r.jsonl"},
       }) {
    const CliRun r = Cli(args);
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    EXPECT_EQ(r.code, 2) << joined;
    EXPECT_NE(r.err.find("sage"), std::string::npos) << joined << "\n" << r.err;
    EXPECT_TRUE(r.out.empty()) << joined;
  }
}

TEST(CliTest, HelpExitsZero) {
  const CliRun r = Cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("calibrate"), std::string::npos);
}

TEST(CliTest, RuntimeErrorLine) {
  TempDir dir;
  const CliRun r = Cli({"calibrate", "--manifest", (dir / "none.csv").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: code=MissingFile message=\"", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(CliTest, PipelineStagesAreDeterministicAndPure) {
  TempDir dir;
  SyntheticConfig cfg;
  cfg.num_images = 30;
  WriteSyntheticCorpus(dir / "train", cfg);
  cfg.seed = 43;
  WriteSyntheticCorpus(dir / "eval", cfg);
  const std::string train = (dir / "train/manifest.csv").string();
  const std::string eval = (dir / "eval/manifest.csv").string();
  auto p = [&](const char* leaf) { return (dir / leaf).string(); };
  const std::string manifest_before = Slurp(train);

  ASSERT_EQ(Cli({"calibrate", "--manifest", train, "--threshold", "0.8", "--floor", "0.9",
                 "--out", p("calibration.json")}).code, 0);
  ASSERT_EQ(Cli({"build-ranks", "--manifest", train, "--classifier", p("clf.json"),
                 "--out", p("train_ranks.jsonl")}).code, 0);
  ASSERT_TRUE(std::filesystem::exists(dir / "clf.json"));
  ASSERT_EQ(Cli({"build-ranks", "--manifest", eval, "--classifier", p("clf.json"),
                 "--out", p("eval_ranks.jsonl"), "--parallel", "3"}).code, 0);
  ASSERT_EQ(Cli({"label", "--manifest", train, "--ranks", p("train_ranks.jsonl"),
                 "--calibration", p("calibration.json"), "--out", p("labels.jsonl")}).code, 0);
  for (const char* out : {"model_a.json", "model_b.json"}) {
    ASSERT_EQ(Cli({"train", "--manifest", train, "--labels", p("labels.jsonl"),
                   "--calibration", p("calibration.json"), "--epochs", "30",
                   "--form", "two", "--out", p(out)}).code, 0);
  }
  EXPECT_EQ(Slurp(dir / "model_a.json"), Slurp(dir / "model_b.json"));

  const CliRun c = Cli({"compress", "--manifest", eval, "--model", p("model_a.json"),
                     "--out", p("compressed")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.err.find("stage=compress"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "compressed/selection_log.jsonl"));
  ASSERT_EQ(Cli({"compress", "--manifest", eval, "--strategy", "fixed:30",
                 "--out", p("fixed")}).code, 0);
  ASSERT_EQ(Cli({"compress", "--manifest", eval, "--strategy", "oracle", "--ranks",
                 p("eval_ranks.jsonl"), "--out", p("oracle")}).code, 0);

  for (const char* out : {"report_a", "report_b"}) {
    const CliRun e = Cli({"evaluate", "--manifest", eval, "--ranks", p("eval_ranks.jsonl"),
                       "--train-manifest", train, "--labels", p("labels.jsonl"),
                       "--calibration", p("calibration.json"), "--epochs", "20",
                       "--pr-grid", "0.3,0.6", "--dt-grid", "0.5,0.9", "--out", p(out)});
    ASSERT_EQ(e.code, 0) << e.err;
  }
  const std::string csv = Slurp(dir / "report_a/report.csv");
  EXPECT_EQ(csv, Slurp(dir / "report_b/report.csv"));
  EXPECT_EQ(Slurp(dir / "report_a/report.svg"), Slurp(dir / "report_b/report.svg"));
  // 9 fixed + 4 learned + oracle + original.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 9 + 4 + 2);

  const CliRun fixed_model = Cli({"evaluate", "--manifest", eval, "--ranks",
                               p("eval_ranks.jsonl"), "--model", p("model_a.json"),
                               "--out", p("report_c")});
  ASSERT_EQ(fixed_model.code, 0) << fixed_model.err;
  EXPECT_EQ(Slurp(train), manifest_before);
}

TEST(CliTest, DemoSmoke) {
  TempDir dir;
  const CliRun r = Cli({"demo", "--seed", "42", "--images", "30", "--epochs", "20",
                     "--pr-grid", "0.3", "--dt-grid", "0.5", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("cr,top1,top5,strategy,pr,dt,qf\n", 0), 0u);
  for (const char* f : {"model.json", "report.csv", "report.svg", "calibration.json",
                        "compressed/selection_log.jsonl"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
}

}  // namespace
}  // namespace qfs
