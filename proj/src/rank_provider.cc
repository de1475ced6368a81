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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qfs/jpeg_codec.h"
#include "qfs/parallel.h"
#include "qfs/random.h"
#include "qfs/status.h"

namespace qfs {

using nlohmann::json;

Variant Variant::Qf(int qf) {
  if (qf < 1 || qf > 100) {
    Fail(ErrorCode::kInvalidArgument, "variant QF out of range: " + std::to_string(qf));
  }
  return Variant(qf);
}

Variant Variant::Parse(std::string_view text) {
  if (text == "orig") return Original();
  if (text.size() > 2 && text.substr(0, 2) == "qf") {
    int qf = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data() + 2, end, qf);
    if (ec == std::errc() && ptr == end && qf >= 1 && qf <= 100) return Variant(qf);
  }
  Fail(ErrorCode::kMalformedRow, "bad variant '" + std::string(text) + "'");
}

std::string Variant::ToString() const {
  return is_original() ? "orig" : "qf" + std::to_string(qf_);
}

void RankTable::Insert(const std::string& image_id, Variant variant, int rank) {
  if (rank < 1) {
    Fail(ErrorCode::kInvalidRank, "InvalidRank: " + std::to_string(rank) +
                                      " for (" + image_id + ", " +
                                      variant.ToString() + ")");
  }
  Key key{image_id, variant};
  if (!ranks_.emplace(key, rank).second) {
    Fail(ErrorCode::kDuplicateKey,
         "DuplicateKey: (" + image_id + ", " + variant.ToString() + ")");
  }
  order_.push_back(std::move(key));
}

std::optional<int> RankTable::Find(const std::string& image_id,
                                   Variant variant) const {
  auto it = ranks_.find(Key{image_id, variant});
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

int RankTable::Get(const std::string& image_id, Variant variant) const {
  auto r = Find(image_id, variant);
  if (!r) {
    Fail(ErrorCode::kMissingRank,
         "MissingRank: (" + image_id + ", " + variant.ToString() + ")");
  }
  return *r;
}

std::string RankTable::ToJsonl() const {
  std::string out;
  for (const auto& key : order_) {
    json row = {{"image_id", key.first},
                {"variant", key.second.ToString()},
                {"rank", ranks_.at(key)}};
    out += row.dump();
    out += '\n';
  }
  return out;
}

RankTable ParseRankTable(std::string_view jsonl) {
  RankTable table;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (row.is_discarded() || !row.is_object() || !row.contains("image_id") ||
        !row["image_id"].is_string() || !row.contains("variant") ||
        !row["variant"].is_string() || !row.contains("rank") ||
        !row["rank"].is_number_integer()) {
      Fail(ErrorCode::kMalformedRow,
           "malformed rank-table row at line " + std::to_string(line_no));
    }
    table.Insert(row["image_id"].get<std::string>(),
                 Variant::Parse(row["variant"].get<std::string>()),
                 row["rank"].get<int>());
  }
  return table;
}

RankTable LoadRankTable(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  return ParseRankTable(std::string_view(
      reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

int RankOf(std::span<const double> scores, int gt_label) {
  if (gt_label < 0 || gt_label >= static_cast<int>(scores.size())) {
    Fail(ErrorCode::kLabelOutOfRange,
         "gt_label " + std::to_string(gt_label) + " outside [0," +
             std::to_string(scores.size()) + ")");
  }
  const double gt = scores[gt_label];
  int rank = 1;
  for (int c = 0; c < static_cast<int>(scores.size()); ++c) {
    if (scores[c] > gt || (scores[c] == gt && c < gt_label)) ++rank;
  }
  return rank;
}

ToyClassifier::ToyClassifier(int num_classes, std::vector<double> weights,
                             std::vector<double> bias)
    : num_classes_(num_classes),
      weights_(std::move(weights)),
      bias_(std::move(bias)) {
  if (num_classes_ < 1 ||
      weights_.size() != static_cast<size_t>(num_classes_) * kFeatureDim ||
      bias_.size() != static_cast<size_t>(num_classes_)) {
    Fail(ErrorCode::kInvalidArgument, "toy classifier shape mismatch");
  }
}

std::vector<double> ToyClassifier::Features(const RasterImage& img) {
  const auto luma = LumaPlane(img);
  const int w = img.width();
  const int h = img.height();
  std::vector<double> f(kFeatureDim);
  for (int gy = 0; gy < kGrid; ++gy) {
    const int y0 = gy * h / kGrid;
    const int y1 = std::max(y0 + 1, (gy + 1) * h / kGrid);
    for (int gx = 0; gx < kGrid; ++gx) {
      const int x0 = gx * w / kGrid;
      const int x1 = std::max(x0 + 1, (gx + 1) * w / kGrid);
      double sum = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) sum += luma[static_cast<size_t>(y) * w + x];
      }
      f[gy * kGrid + gx] = sum / ((y1 - y0) * (x1 - x0));
    }
  }
  double mean = 0.0;
  for (double v : f) mean += v;
  mean /= kFeatureDim;
  double var = 0.0;
  for (double v : f) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / kFeatureDim);
  for (double& v : f) v = sd > 1e-9 ? (v - mean) / sd : 0.0;
  return f;
}

std::vector<double> ToyClassifier::ScoresFromFeatures(
    std::span<const double> f) const {
  std::vector<double> s(static_cast<size_t>(num_classes_));
  for (int c = 0; c < num_classes_; ++c) {
    const double* w = weights_.data() + static_cast<size_t>(c) * kFeatureDim;
    double acc = bias_[c];
    for (int i = 0; i < kFeatureDim; ++i) acc += w[i] * f[i];
    s[c] = acc;
  }
  return s;
}

std::vector<double> ToyClassifier::Scores(const RasterImage& img) const {
  return ScoresFromFeatures(Features(img));
}

std::string ToyClassifier::ToJson() const {
  json doc = {{"format", "toy-classifier/1"},
              {"num_classes", num_classes_},
              {"feature", "luma16x16-standardized"},
              {"weights", weights_},
              {"bias", bias_}};
  return doc.dump(1) + "\n";
}

ToyClassifier ToyClassifier::FromJson(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || doc.value("format", "") != "toy-classifier/1") {
    Fail(ErrorCode::kMalformedRow, "not a toy-classifier/1 document");
  }
  try {
    return ToyClassifier(doc.at("num_classes").get<int>(),
                         doc.at("weights").get<std::vector<double>>(),
                         doc.at("bias").get<std::vector<double>>());
  } catch (const json::exception& e) {
    Fail(ErrorCode::kMalformedRow, std::string("bad toy classifier: ") + e.what());
  }
}

ToyClassifier TrainToyClassifier(const std::vector<std::vector<double>>& features,
                                 std::span<const int> labels, int num_classes,
                                 const ToyClassifierConfig& config) {
  if (features.size() != labels.size() || features.empty()) {
    Fail(ErrorCode::kEmptyInput, "toy classifier needs matching non-empty data");
  }
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    Fail(ErrorCode::kDegenerateLabels,
         "DegenerateLabels: training data covers fewer than two classes");
  }
  for (int l : labels) {
    if (l < 0 || l >= num_classes) Fail(ErrorCode::kLabelOutOfRange, "label out of range");
  }
  constexpr int kF = ToyClassifier::kFeatureDim;
  const size_t n = features.size();
  const size_t C = static_cast<size_t>(num_classes);
  Rng rng(config.seed);
  std::vector<double> w(C * kF);
  for (double& v : w) v = rng.Uniform(-0.01, 0.01);
  std::vector<double> b(C, 0.0);
  std::vector<double> gw(C * kF), gb(C), p(C);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      const auto& f = features[i];
      double mx = -1e300;
      for (size_t c = 0; c < C; ++c) {
        double acc = b[c];
        const double* wc = w.data() + c * kF;
        for (int k = 0; k < kF; ++k) acc += wc[k] * f[k];
        p[c] = acc;
        mx = std::max(mx, acc);
      }
      double z = 0.0;
      for (size_t c = 0; c < C; ++c) z += (p[c] = std::exp(p[c] - mx));
      for (size_t c = 0; c < C; ++c) {
        const double d = p[c] / z - (static_cast<int>(c) == labels[i] ? 1.0 : 0.0);
        gb[c] += d;
        double* g = gw.data() + c * kF;
        for (int k = 0; k < kF; ++k) g[k] += d * f[k];
      }
    }
    const double scale = config.learning_rate / static_cast<double>(n);
    for (size_t j = 0; j < w.size(); ++j) {
      w[j] -= scale * gw[j] + config.learning_rate * config.l2 * w[j];
    }
    for (size_t c = 0; c < C; ++c) b[c] -= scale * gb[c];
  }
  return ToyClassifier(num_classes, std::move(w), std::move(b));
}

ToyClassifier TrainToyClassifier(const Manifest& manifest,
                                 const ToyClassifierConfig& config,
                                 int parallelism) {
  if (manifest.num_classes < 2) {
    Fail(ErrorCode::kDegenerateLabels, "DegenerateLabels: manifest declares one class");
  }
  std::vector<std::vector<double>> features(manifest.records.size());
  std::vector<int> labels(manifest.records.size());
  ParallelFor(manifest.records.size(), parallelism, [&](size_t i) {
    features[i] = ToyClassifier::Features(LoadImage(manifest.records[i]));
    labels[i] = manifest.records[i].gt_label;
  });
  return TrainToyClassifier(features, labels, manifest.num_classes, config);
}

int RankOf(const ToyClassifier& clf, const RasterImage& img, int gt_label) {
  return RankOf(clf.Scores(img), gt_label);
}

RankTable BuildRankTable(const Manifest& manifest, const ToyClassifier& clf,
                         const QfSet& qf_set, int parallelism) {
  const size_t n = manifest.records.size();
  const size_t per_image = qf_set.size() + 1;
  std::vector<int> ranks(n * per_image);
  ParallelFor(n, parallelism, [&](size_t i) {
    const ImageRecord& rec = manifest.records[i];
    const RasterImage img = LoadImage(rec);
    ranks[i * per_image] = RankOf(clf, img, rec.gt_label);
    for (size_t j = 0; j < qf_set.size(); ++j) {
      const RasterImage decoded = RoundTrip(img, QualityFactor(qf_set[j]));
      ranks[i * per_image + j + 1] = RankOf(clf, decoded, rec.gt_label);
    }
  });
  RankTable table;
  for (size_t i = 0; i < n; ++i) {
    const std::string& id = manifest.records[i].image_id;
    table.Insert(id, Variant::Original(), ranks[i * per_image]);
    for (size_t j = 0; j < qf_set.size(); ++j) {
      table.Insert(id, Variant::Qf(qf_set[j]), ranks[i * per_image + j + 1]);
    }
  }
  return table;
}

}  // namespace qfs
