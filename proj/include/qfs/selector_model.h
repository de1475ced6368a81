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

// A bank of independent binary classifiers, one per candidate quality
// factor, each predicting whether its QF keeps the ground-truth rank of an
// image. Head j outputs p_j = sigmoid(h_j(features)) and declares its QF
// feasible when p_j >= dt_j.
//
// Two layouts:
//   Form::kOne  one shared, fixed feature standardization and a logistic
//               (linear) head per QF.
//   Form::kTwo  each QF owns its standardization and a one-hidden-layer MLP
//               (16 tanh units), trained fully independently.
//
// Heads minimize the weighted binary cross-entropy
//   L = -(1/N) sum_i [ pr * q_i * log p_i + (1 - q_i) * log(1 - p_i) ]
// where the precision constant pr < 1 down-weights positives and pushes the
// head toward higher precision and lower recall.

#ifndef QFS_SELECTOR_MODEL_H_
#define QFS_SELECTOR_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qfs/feasibility.h"
#include "qfs/image.h"
#include "qfs/qf_set.h"

namespace qfs {

// ---------------------------------------------------------------------------
// Features ("dct-stats-v1", 26 values):
//   [0, 15)  mean log(1 + |c|) of orthonormal 8x8 luma DCT coefficients,
//            grouped by anti-diagonal band u + v = 0..14 (band 0 is DC)
//   15, 16   luma mean, luma standard deviation
//   17       mean central-difference gradient magnitude (interior pixels)
//   [18, 26) 8-bin luma histogram, fractions of pixels
inline constexpr int kFeatureDim = 26;
inline constexpr int kHiddenUnits = 16;
inline constexpr std::string_view kFeatureSpecId = "dct-stats-v1";

// Unstandardized features. Only whole 8x8 blocks feed the DCT bands.
// Throws kImageTooSmall below 8x8.
std::vector<double> ExtractRawFeatures(const RasterImage& img);

// Number of ExtractRawFeatures calls made by this process.
uint64_t FeatureExtractionCount();

struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> scale;  // 1 where the training spread is ~0

  static FeatureStats Identity();
  static FeatureStats Fit(const std::vector<std::vector<double>>& raw);
  std::vector<double> Apply(std::span<const double> raw) const;
};

struct FeatureExtractor {
  std::string spec_id{kFeatureSpecId};
  FeatureStats stats = FeatureStats::Identity();

  std::vector<double> Extract(const RasterImage& img) const {
    return stats.Apply(ExtractRawFeatures(img));
  }
};

// ---------------------------------------------------------------------------

enum class Form { kOne, kTwo };

std::string_view FormName(Form form);
Form ParseForm(std::string_view text);

// Numerically stable logistic function.
double Sigmoid(double logit);

inline constexpr double kProbabilityClamp = 1e-12;
double ClampProbability(double p);

struct LabeledExample {
  std::span<const double> features;
  uint8_t q = 0;
};

class BinaryHead {
 public:
  BinaryHead() = default;
  // Zero-initialized parameters.
  BinaryHead(Form form, double pr, double dt);

  static size_t ParamCount(Form form);

  Form form() const { return form_; }
  double pr() const { return pr_; }
  double dt() const { return dt_; }
  // Throws kInvalidArgument unless 0 < dt < 1.
  void set_dt(double dt);
  void set_pr(double pr);

  // Form kOne: [w_0..w_{F-1}, b].
  // Form kTwo: [W1 (H x F row-major), b1 (H), w2 (H), b2].
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Standardization owned by a kTwo head.
  FeatureStats& own_stats() { return own_stats_; }
  const FeatureStats& own_stats() const { return own_stats_; }

  double Logit(std::span<const double> features) const;
  double Forward(std::span<const double> features) const {
    return Sigmoid(Logit(features));
  }

  // Adds g * d(logit)/d(params) into grad.
  void AccumulateLogitGradient(std::span<const double> features, double g,
                               std::vector<double>& grad) const;

 private:
  Form form_ = Form::kOne;
  double pr_ = 1.0;
  double dt_ = 0.5;
  std::vector<double> params_;
  FeatureStats own_stats_ = FeatureStats::Identity();
};

// Weighted BCE with p clamped to [1e-12, 1 - 1e-12]. Throws kEmptyInput.
double Loss(const BinaryHead& head, std::span<const LabeledExample> batch);

// Analytic gradient of Loss with respect to params(). Samples whose p falls
// in the clamped region contribute zero. Throws kEmptyInput.
std::vector<double> Grad(const BinaryHead& head,
                         std::span<const LabeledExample> batch);

// ---------------------------------------------------------------------------

struct TrainConfig {
  Form form = Form::kOne;
  std::vector<double> pr = {0.5};  // one value, or one per head
  std::vector<double> dt = {0.5};  // one value, or one per head
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 0.1;
  uint64_t seed = 42;
  int parallelism = 1;
};

struct HeadTrainingReport {
  int qf = 0;
  double final_loss = 0.0;
  int positives = 0;
  int total = 0;
};

class SelectorModel {
 public:
  SelectorModel() = default;

  Form form() const { return form_; }
  const FeatureExtractor& extractor() const { return extractor_; }
  const QfSet& qf_set() const { return qf_set_; }
  const std::vector<BinaryHead>& heads() const { return heads_; }
  std::vector<BinaryHead>& mutable_heads() { return heads_; }
  const std::vector<HeadTrainingReport>& reports() const { return reports_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const TrainConfig& config() const { return config_; }

  void SetDecisionThreshold(double dt);

  // p_j for every head, from one raw feature vector.
  std::vector<double> ProbabilitiesFromRaw(std::span<const double> raw) const;
  std::vector<double> Probabilities(const RasterImage& img) const;

  // y_j = 1 iff p_j >= dt_j.
  std::vector<uint8_t> PredictFromRaw(std::span<const double> raw) const;
  std::vector<uint8_t> PredictFeasible(const RasterImage& img) const;

  std::string ToJson() const;
  static SelectorModel FromJson(std::string_view text);

 private:
  friend SelectorModel Train(const std::vector<std::vector<double>>&,
                             const std::vector<FeasibilityRecord>&,
                             const QfSet&, const TrainConfig&);

  Form form_ = Form::kOne;
  FeatureExtractor extractor_;
  QfSet qf_set_;
  std::vector<BinaryHead> heads_;
  std::vector<HeadTrainingReport> reports_;
  std::vector<std::string> warnings_;
  TrainConfig config_;
};

// Trains one head on column `column` of the labels. Heads never share
// state; identical inputs give bit-identical parameters.
BinaryHead TrainHead(const std::vector<std::vector<double>>& raw_features,
                     const std::vector<FeasibilityRecord>& labels, size_t column,
                     const TrainConfig& config,
                     HeadTrainingReport* report = nullptr);

// raw_features[i] pairs with labels[i]. Throws kEmptyInput for an empty
// training set and kModelMismatch when label widths differ from the QF set.
// A column whose labels are all equal still trains; a warning is recorded.
SelectorModel Train(const std::vector<std::vector<double>>& raw_features,
                    const std::vector<FeasibilityRecord>& labels,
                    const QfSet& qf_set, const TrainConfig& config);

}  // namespace qfs

#endif  // QFS_SELECTOR_MODEL_H_
