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

// Ground-truth label ranks under a reference classifier, for originals and
// for every compressed variant. External classifiers integrate through the
// JSONL rank-table format:
//
//   {"image_id": "a", "variant": "orig", "rank": 2}
//   {"image_id": "a", "variant": "qf10", "rank": 1}
//
// The in-process ToyClassifier is a small multinomial logistic model used
// when no external table is available.

#ifndef QFS_RANK_PROVIDER_H_
#define QFS_RANK_PROVIDER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qfs/dataset_io.h"
#include "qfs/image.h"
#include "qfs/qf_set.h"

namespace qfs {

// Original image, or its JPEG round trip at a quality factor.
class Variant {
 public:
  static Variant Original() { return Variant(0); }
  static Variant Qf(int qf);
  // "orig" or "qf<N>".
  static Variant Parse(std::string_view text);

  bool is_original() const { return qf_ == 0; }
  int qf() const { return qf_; }
  std::string ToString() const;

  auto operator<=>(const Variant&) const = default;

 private:
  explicit Variant(int qf) : qf_(qf) {}
  int qf_;
};

class RankTable {
 public:
  // Throws kInvalidRank for rank < 1 and kDuplicateKey for a repeated key.
  void Insert(const std::string& image_id, Variant variant, int rank);

  std::optional<int> Find(const std::string& image_id, Variant variant) const;
  // Throws kMissingRank.
  int Get(const std::string& image_id, Variant variant) const;

  size_t size() const { return order_.size(); }

  // Rows in insertion order.
  std::string ToJsonl() const;

 private:
  using Key = std::pair<std::string, Variant>;
  std::map<Key, int> ranks_;
  std::vector<Key> order_;
};

RankTable ParseRankTable(std::string_view jsonl);
RankTable LoadRankTable(const std::filesystem::path& path);

// 1 + number of classes scoring strictly higher than the ground truth, plus
// the number of lower-indexed classes tying with it. Throws
// kLabelOutOfRange.
int RankOf(std::span<const double> scores, int gt_label);

struct ToyClassifierConfig {
  double learning_rate = 0.5;
  int epochs = 400;
  double l2 = 1e-4;
  uint64_t seed = 42;
};

class ToyClassifier {
 public:
  static constexpr int kGrid = 16;
  static constexpr int kFeatureDim = kGrid * kGrid;

  ToyClassifier() = default;
  ToyClassifier(int num_classes, std::vector<double> weights,
                std::vector<double> bias);

  // 16x16 box-averaged luma, standardized to zero mean and unit variance
  // (all zeros for a constant image).
  static std::vector<double> Features(const RasterImage& img);

  int num_classes() const { return num_classes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }

  std::vector<double> ScoresFromFeatures(std::span<const double> f) const;
  std::vector<double> Scores(const RasterImage& img) const;

  std::string ToJson() const;
  static ToyClassifier FromJson(std::string_view text);

 private:
  int num_classes_ = 0;
  std::vector<double> weights_;  // num_classes x kFeatureDim, row-major
  std::vector<double> bias_;
};

// Full-batch gradient descent on softmax cross-entropy. Throws
// kDegenerateLabels when fewer than two classes are present.
ToyClassifier TrainToyClassifier(const std::vector<std::vector<double>>& features,
                                 std::span<const int> labels, int num_classes,
                                 const ToyClassifierConfig& config);
ToyClassifier TrainToyClassifier(const Manifest& manifest,
                                 const ToyClassifierConfig& config,
                                 int parallelism = 1);

int RankOf(const ToyClassifier& clf, const RasterImage& img, int gt_label);

// Rank at the original and at Decode(Encode(x, qf)) for every qf, in
// manifest order.
RankTable BuildRankTable(const Manifest& manifest, const ToyClassifier& clf,
                         const QfSet& qf_set, int parallelism = 1);

}  // namespace qfs

#endif  // QFS_RANK_PROVIDER_H_
