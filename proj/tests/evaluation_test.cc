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

#include "qfs/evaluation.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "corpus_fixture.h"
#include "qfs/jpeg_codec.h"
#include "test_util.h"

namespace qfs {
namespace {

using testing::CorpusTest;
using testing::TempDir;

Manifest TwoImages(uint64_t a, uint64_t b) {
  Manifest m;
  m.num_classes = 2;
  m.records.push_back({"x", "", 0, a});
  m.records.push_back({"y", "", 1, b});
  return m;
}

SelectionResult Logged(const std::string& id, uint64_t bytes) {
  SelectionResult r;
  r.image_id = id;
  r.chosen_qf = 50;
  r.strategy = Strategy::Fixed(50);
  r.compressed_bytes = bytes;
  return r;
}

TEST(CompressionRatioTest, Arithmetic) {
  EXPECT_DOUBLE_EQ(CompressionRatio(TwoImages(1000, 1000), {Logged("x", 100), Logged("y", 100)}),
                   10.0);
  EXPECT_DOUBLE_EQ(CompressionRatio(TwoImages(700, 300), {Logged("y", 300), Logged("x", 700)}),
                   1.0);
  // Ratio of sums, not mean of ratios.
  EXPECT_DOUBLE_EQ(CompressionRatio(TwoImages(1000, 100), {Logged("x", 100), Logged("y", 100)}),
                   5.5);
}

TEST(CompressionRatioTest, Coverage) {
  EXPECT_QFS_ERROR(CompressionRatio(TwoImages(1, 1), {Logged("x", 1)}),
                   ErrorCode::kCoverageMismatch);
  EXPECT_QFS_ERROR(CompressionRatio(TwoImages(1, 1), {Logged("x", 1), Logged("x", 1)}),
                   ErrorCode::kCoverageMismatch);
  EXPECT_QFS_ERROR(CompressionRatio(TwoImages(1, 1), {Logged("x", 1), Logged("z", 1)}),
                   ErrorCode::kCoverageMismatch);
}

TEST(TopKTest, Counts) {
  const std::vector<int> r = {1, 2, 6, 1};
  EXPECT_DOUBLE_EQ(TopKAccuracy(r, 5), 0.75);
  EXPECT_DOUBLE_EQ(TopKAccuracy(std::vector<int>(7, 1), 1), 1.0);
  EXPECT_QFS_ERROR(TopKAccuracy(r, 0), ErrorCode::kInvalidArgument);
  EXPECT_QFS_ERROR(TopKAccuracy({}, 1), ErrorCode::kEmptyInput);
}

TEST(SweepGridTest, DefaultCardinality) {
  EXPECT_EQ(SweepGrid{}.Pairs().size(), 30u);
}

TEST(SweepGridTest, DuplicatesDroppedWithWarning) {
  SweepGrid g;
  g.pr = {0.2, 0.2, 0.5};
  g.dt = {0.6};
  std::vector<std::string> warnings;
  const auto pairs = g.Pairs(&warnings);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0], std::make_pair(0.2, 0.6));
  EXPECT_EQ(pairs[1], std::make_pair(0.5, 0.6));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("duplicate"), std::string::npos);
}

TEST(SweepGridTest, ParseList) {
  EXPECT_EQ(SweepGrid::ParseList("0.2, 0.5"), (std::vector<double>{0.2, 0.5}));
  EXPECT_QFS_ERROR(SweepGrid::ParseList("0.2,,0.5"), ErrorCode::kInvalidArgument);
  EXPECT_QFS_ERROR(SweepGrid::ParseList("abc"), ErrorCode::kInvalidArgument);
  SweepGrid g;
  g.dt = {1.0};
  EXPECT_QFS_ERROR(g.Pairs(), ErrorCode::kInvalidArgument);
}

std::vector<RaPoint> SamplePoints(int baseline, int adaptive) {
  std::vector<RaPoint> out;
  for (int i = 0; i < baseline; ++i) {
    out.push_back({3.0 - 0.1 * i, 0.5 + 0.01 * i, 0.9, "fixed:" + std::to_string(10 * (i + 1)),
                   0.0, 0.0, 10 * (i + 1)});
  }
  for (int i = 0; i < adaptive; ++i) {
    out.push_back({2.0 + 1.0 / (i + 3), 0.6 + 0.001 * i, 0.95, "learned",
                   0.2 + 0.1 * (i / 5), 0.5 + 0.1 * (i % 5), 0});
  }
  return out;
}

TEST(ReportTest, CsvRowsAndRoundTrip) {
  const std::vector<RaPoint> pts = SamplePoints(9, 30);
  const std::string csv = ReportCsv(pts);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 40);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "cr,top1,top5,strategy,pr,dt,qf");
  EXPECT_EQ(ParseReportCsv(csv), pts);
}

TEST(ReportTest, DeterministicFiles) {
  const std::vector<RaPoint> all = SamplePoints(9, 30);
  const std::vector<RaPoint> base(all.begin(), all.begin() + 9);
  const std::vector<RaPoint> adaptive(all.begin() + 9, all.end());
  TempDir a;
  TempDir b;
  EmitReport(base, adaptive, a / "r.csv", a / "r.svg");
  EmitReport(base, adaptive, b / "r.csv", b / "r.svg");
  EXPECT_EQ(ReadFileBytes(a / "r.csv"), ReadFileBytes(b / "r.csv"));
  EXPECT_EQ(ReadFileBytes(a / "r.svg"), ReadFileBytes(b / "r.svg"));
  const auto svg = ReadFileBytes(a / "r.svg");
  const std::string text(svg.begin(), svg.end());
  EXPECT_EQ(text.rfind("<svg", 0), 0u);
  EXPECT_NE(text.find("stroke-dasharray"), std::string::npos);
}

TEST(ReportTest, NoData) {
  TempDir d;
  EXPECT_QFS_ERROR(EmitReport({}, {}, d / "r.csv", d / "r.svg"), ErrorCode::kNoData);
  EXPECT_FALSE(std::filesystem::exists(d / "r.csv"));
}

TEST(ReportTest, MalformedCsv) {
  EXPECT_QFS_ERROR(ParseReportCsv("x,y\n"), ErrorCode::kMalformedRow);
  EXPECT_QFS_ERROR(ParseReportCsv("cr,top1,top5,strategy,pr,dt,qf\n1,2\n"),
                   ErrorCode::kMalformedRow);
}

TEST_F(CorpusTest, BaselineCurve) {
  const CorpusCache cache = BuildCorpusCache(manifest_, qf_set_, 2);
  const std::vector<RaPoint> curve = BaselineCurve(manifest_, qf_set_, ranks_, cache);
  ASSERT_EQ(curve.size(), 9u);
  for (size_t j = 0; j < curve.size(); ++j) {
    EXPECT_EQ(curve[j].qf, qf_set_[j]);
    EXPECT_LE(curve[j].top1, curve[j].top5);
    if (j > 0) EXPECT_LE(curve[j].cr, curve[j - 1].cr);
    std::vector<int> r;
    for (const auto& rec : manifest_.records) {
      r.push_back(ranks_.Get(rec.image_id, Variant::Qf(qf_set_[j])));
    }
    EXPECT_DOUBLE_EQ(curve[j].top1, TopKAccuracy(r, 1));
    EXPECT_DOUBLE_EQ(curve[j].top5, TopKAccuracy(r, 5));
  }
}

TEST_F(CorpusTest, SingleQfBaselineEqualsFixedRun) {
  const QfSet one({50});
  const CorpusCache cache = BuildCorpusCache(manifest_, one);
  const auto curve = BaselineCurve(manifest_, one, ranks_, cache);
  ASSERT_EQ(curve.size(), 1u);
  SelectorInputs in;
  in.pruned_set = qf_set_;
  RaPoint direct = ScoreSelection(
      manifest_, CompressCorpus(manifest_, Strategy::Fixed(50), in), ranks_, "fixed:50");
  direct.qf = 50;
  EXPECT_EQ(curve[0], direct);
}

TEST_F(CorpusTest, CacheSelectionEqualsCompressCorpus) {
  const CorpusCache cache = BuildCorpusCache(manifest_, qf_set_);
  SelectorInputs in;
  in.pruned_set = qf_set_;
  in.model = &model_;
  EXPECT_EQ(SelectLearned(manifest_, cache, model_),
            CompressCorpus(manifest_, Strategy::Learned(), in));
}

TEST_F(CorpusTest, AccuracyMatchesRescoringDecodedFiles) {
  TempDir out;
  SelectorInputs in;
  in.pruned_set = qf_set_;
  in.model = &model_;
  const auto log = CompressCorpus(manifest_, Strategy::Learned(), in, out.path());
  const RaPoint p = ScoreSelection(manifest_, log, ranks_, "learned");
  int top1 = 0;
  int top5 = 0;
  for (const auto& rec : manifest_.records) {
    const RasterImage dec = Decode(ReadFileBytes(out / (rec.image_id + ".jpg")));
    const int r = RankOf(clf_, dec, rec.gt_label);
    top1 += r <= 1;
    top5 += r <= 5;
  }
  const double n = static_cast<double>(manifest_.records.size());
  EXPECT_DOUBLE_EQ(p.top1, top1 / n);
  EXPECT_DOUBLE_EQ(p.top5, top5 / n);
}

TEST_F(CorpusTest, OracleNotBelowOriginalMinusFallback) {
  SelectorInputs in;
  in.pruned_set = qf_set_;
  in.ranks = &ranks_;
  const auto log = CompressCorpus(manifest_, Strategy::Oracle(), in);
  double fallback = 0.0;
  for (const auto& r : log) fallback += r.fallback_used;
  fallback /= log.size();
  const RaPoint oracle = ScoreSelection(manifest_, log, ranks_, "oracle");
  const RaPoint original = OriginalPoint(manifest_, ranks_);
  EXPECT_EQ(original.cr, 1.0);
  EXPECT_GE(oracle.top1, original.top1 - fallback);
  EXPECT_GE(oracle.top5, original.top5 - fallback);
}

TEST_F(CorpusTest, AdaptiveCurveGrid) {
  const CorpusCache cache = BuildCorpusCache(manifest_, qf_set_);
  TrainConfig tc;
  tc.epochs = 10;
  const auto pts = AdaptiveCurve(manifest_, cache, ranks_, data_, qf_set_, tc, SweepGrid{});
  ASSERT_EQ(pts.size(), 30u);
  for (size_t i = 0; i < pts.size(); ++i) {
    EXPECT_EQ(pts[i].strategy, "learned");
    EXPECT_LE(pts[i].top1, pts[i].top5);
    if (i > 0) EXPECT_LE(pts[i - 1].cr, pts[i].cr);
  }
  // Same model, rising dt: chosen QFs never fall.
  SelectorModel m = model_;
  std::vector<int> previous(manifest_.records.size(), 0);
  for (double dt : SweepGrid{}.dt) {
    m.SetDecisionThreshold(dt);
    const auto log = SelectLearned(manifest_, cache, m);
    for (size_t i = 0; i < log.size(); ++i) {
      EXPECT_GE(log[i].chosen_qf, previous[i]);
      previous[i] = log[i].chosen_qf;
    }
  }
}

}  // namespace
}  // namespace qfs
