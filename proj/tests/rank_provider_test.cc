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

#include "qfs/rank_provider.h"

#include <gtest/gtest.h>

#include "qfs/jpeg_codec.h"
#include "qfs/synthetic.h"
#include "test_images.h"
#include "test_util.h"

namespace qfs {
namespace {

using testing::TempDir;
using testing::WriteCorpus;

// Two classes: bright left half vs bright right half, with per-image jitter.
Manifest SeparableCorpus(const std::filesystem::path& dir, int n) {
  std::vector<RasterImage> images;
  std::vector<int> labels;
  testing::Lcg rng(5);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    const double lo = 30 + 40 * rng.Uniform();
    const double hi = 170 + 60 * rng.Uniform();
    RasterImage img(24, 24);
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < 24; ++y) {
        for (int x = 0; x < 24; ++x) {
          const bool left = x < 12;
          const double v = (left == (label == 0) ? hi : lo) + 8 * rng.Uniform();
          img.at(c, x, y) = testing::Clamp8(v);
        }
      }
    }
    images.push_back(std::move(img));
    labels.push_back(label);
  }
  return WriteCorpus(dir, images, labels, 2);
}

TEST(RankTableTest, ParseTwoRows) {
  const RankTable t = ParseRankTable(
      "{\"image_id\":\"a\",\"variant\":\"orig\",\"rank\":2}\n"
      "{\"image_id\":\"a\",\"variant\":\"qf10\",\"rank\":1}\n");
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.Get("a", Variant::Original()), 2);
  EXPECT_EQ(t.Get("a", Variant::Qf(10)), 1);
  EXPECT_FALSE(t.Find("a", Variant::Qf(20)).has_value());
  EXPECT_QFS_ERROR(t.Get("b", Variant::Original()), ErrorCode::kMissingRank);
}

TEST(RankTableTest, DuplicateKey) {
  EXPECT_QFS_ERROR(ParseRankTable("{\"image_id\":\"a\",\"variant\":\"orig\",\"rank\":2}\n"
                                  "{\"image_id\":\"a\",\"variant\":\"orig\",\"rank\":3}\n"),
                   ErrorCode::kDuplicateKey);
}

TEST(RankTableTest, ZeroRank) {
  EXPECT_QFS_ERROR(ParseRankTable("{\"image_id\":\"a\",\"variant\":\"orig\",\"rank\":0}\n"),
                   ErrorCode::kInvalidRank);
}

TEST(RankTableTest, MalformedRows) {
  EXPECT_QFS_ERROR(ParseRankTable("not json\n"), ErrorCode::kMalformedRow);
  EXPECT_QFS_ERROR(ParseRankTable("{\"image_id\":\"a\",\"variant\":\"q10\",\"rank\":1}\n"),
                   ErrorCode::kMalformedRow);
}

TEST(RankTableTest, JsonlRoundTrip) {
  RankTable t;
  t.Insert("b", Variant::Original(), 3);
  t.Insert("a", Variant::Qf(40), 1);
  const std::string text = t.ToJsonl();
  EXPECT_EQ(ParseRankTable(text).ToJsonl(), text);
}

TEST(VariantTest, Strings) {
  EXPECT_EQ(Variant::Parse("orig"), Variant::Original());
  EXPECT_EQ(Variant::Parse("qf70"), Variant::Qf(70));
  EXPECT_EQ(Variant::Qf(5).ToString(), "qf5");
  EXPECT_QFS_ERROR(Variant::Qf(0), ErrorCode::kInvalidArgument);
}

TEST(RankOfTest, StrictArgmax) {
  const std::vector<double> s = {0.1, 0.7, 0.2};
  EXPECT_EQ(RankOf(s, 1), 1);
}

TEST(RankOfTest, TiesWithLowerIndexRankFirst) {
  const std::vector<double> s = {0.5, 0.5};
  EXPECT_EQ(RankOf(s, 1), 2);
  EXPECT_EQ(RankOf(s, 0), 1);
  const std::vector<double> t = {0.2, 0.7, 0.7, 0.7};
  EXPECT_EQ(RankOf(t, 3), 3);
}

TEST(RankOfTest, CountsGreaterScores) {
  const std::vector<double> s = {0.1, 0.9, 0.3};
  EXPECT_EQ(RankOf(s, 2), 2);
  EXPECT_EQ(RankOf(s, 0), 3);
  EXPECT_QFS_ERROR(RankOf(s, 3), ErrorCode::kLabelOutOfRange);
}

TEST(ToyClassifierTest, SeparableReachesFullAccuracy) {
  TempDir dir;
  const Manifest m = SeparableCorpus(dir.path(), 40);
  const ToyClassifier clf = TrainToyClassifier(m, {});
  for (const auto& rec : m.records) {
    EXPECT_EQ(RankOf(clf, LoadImage(rec), rec.gt_label), 1) << rec.image_id;
  }
}

TEST(ToyClassifierTest, DeterministicWeights) {
  TempDir dir;
  const Manifest m = SeparableCorpus(dir.path(), 20);
  const ToyClassifier a = TrainToyClassifier(m, {}, 1);
  const ToyClassifier b = TrainToyClassifier(m, {}, 4);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(a.bias(), b.bias());
  EXPECT_EQ(a.ToJson(), b.ToJson());
  EXPECT_EQ(ToyClassifier::FromJson(a.ToJson()).ToJson(), a.ToJson());
}

TEST(ToyClassifierTest, SingleClassManifest) {
  TempDir dir;
  const Manifest m = WriteCorpus(dir.path(), {RasterImage(16, 16, 3)}, {0}, 1);
  EXPECT_QFS_ERROR(TrainToyClassifier(m, {}), ErrorCode::kDegenerateLabels);
}

TEST(ToyClassifierTest, ConstantImageFeaturesAreZero) {
  for (double f : ToyClassifier::Features(RasterImage(20, 20, 90))) EXPECT_EQ(f, 0.0);
}

TEST(BuildRankTableTest, Cardinality) {
  TempDir dir;
  const Manifest m = SeparableCorpus(dir.path(), 4);
  const ToyClassifier clf = TrainToyClassifier(m, {});
  Manifest one = m;
  one.records.resize(1);
  const RankTable t = BuildRankTable(one, clf, QfSet({10, 90}));
  EXPECT_EQ(t.size(), 3u);
}

TEST(BuildRankTableTest, ConstantImageSameRankEverywhere) {
  TempDir dir;
  const Manifest train = SeparableCorpus(dir.path(), 10);
  const ToyClassifier clf = TrainToyClassifier(train, {});
  TempDir other;
  const Manifest m = WriteCorpus(other.path(), {RasterImage(24, 24, 128)}, {1}, 2);
  const RankTable t = BuildRankTable(m, clf, QfSet::Default());
  const int orig = t.Get(m.records[0].image_id, Variant::Original());
  for (int q : QfSet::Default()) {
    EXPECT_EQ(t.Get(m.records[0].image_id, Variant::Qf(q)), orig);
  }
}

TEST(BuildRankTableTest, MatchesBruteForceLoop) {
  TempDir dir;
  SyntheticConfig cfg;
  cfg.num_images = 30;
  const Manifest m = WriteSyntheticCorpus(dir.path(), cfg);
  const ToyClassifier clf = TrainToyClassifier(m, {});
  const QfSet set = QfSet::Default();
  const RankTable table = BuildRankTable(m, clf, set, 3);
  ASSERT_EQ(table.size(), m.records.size() * (set.size() + 1));
  for (const auto& rec : m.records) {
    const RasterImage img = LoadImage(rec);
    const std::vector<double> s = clf.Scores(img);
    int rank = 1;
    for (double v : s) rank += v > s[rec.gt_label] ? 1 : 0;
    EXPECT_EQ(table.Get(rec.image_id, Variant::Original()), rank);
    for (int q : set) {
      const JpegBytes j = Encode(img, QualityFactor(q));
      const std::vector<double> sq = clf.Scores(Decode(j.bytes));
      int rq = 1;
      for (double v : sq) rq += v > sq[rec.gt_label] ? 1 : 0;
      EXPECT_EQ(table.Get(rec.image_id, Variant::Qf(q)), rq);
    }
  }
  // Deterministic and independent of thread count.
  EXPECT_EQ(BuildRankTable(m, clf, set, 1).ToJsonl(), table.ToJsonl());
}

TEST(BuildRankTableTest, RanksInRange) {
  TempDir dir;
  SyntheticConfig cfg;
  cfg.num_images = 20;
  const Manifest m = WriteSyntheticCorpus(dir.path(), cfg);
  const RankTable t = BuildRankTable(m, TrainToyClassifier(m, {}), QfSet({10, 50}));
  for (const auto& rec : m.records) {
    for (Variant v : {Variant::Original(), Variant::Qf(10), Variant::Qf(50)}) {
      const int r = t.Get(rec.image_id, v);
      EXPECT_GE(r, 1);
      EXPECT_LE(r, m.num_classes);
    }
  }
}

}  // namespace
}  // namespace qfs
