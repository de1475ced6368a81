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

#include "qfs/selector_model.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>

#include "json.hpp"
#include "qfs/parallel.h"
#include "qfs/random.h"
#include "qfs/status.h"

namespace qfs {
namespace {

using nlohmann::json;

constexpr int kBands = 15;
std::atomic<uint64_t> g_extraction_count{0};

// cos_table[u][x] = a(u) * cos((2x + 1) u pi / 16), orthonormal.
const std::array<std::array<double, 8>, 8>& CosTable() {
  static const auto table = [] {
    std::array<std::array<double, 8>, 8> t{};
    for (int u = 0; u < 8; ++u) {
      const double a = u == 0 ? std::sqrt(1.0 / 8) : std::sqrt(2.0 / 8);
      for (int x = 0; x < 8; ++x) {
        t[u][x] = a * std::cos((2 * x + 1) * u * std::numbers::pi / 16);
      }
    }
    return t;
  }();
  return table;
}

void CheckFinite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      Fail(ErrorCode::kInvalidArgument, std::string(what) + " is not finite");
    }
  }
}

size_t ParamCountFor(Form form) {
  return form == Form::kOne ? kFeatureDim + 1
                            : kHiddenUnits * kFeatureDim + 2 * kHiddenUnits + 1;
}

json StatsToJson(const FeatureStats& s) {
  return {{"mean", s.mean}, {"scale", s.scale}};
}

FeatureStats StatsFromJson(const json& j) {
  FeatureStats s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.scale = j.at("scale").get<std::vector<double>>();
  if (s.mean.size() != kFeatureDim || s.scale.size() != kFeatureDim) {
    Fail(ErrorCode::kModelMismatch, "standardization stats have wrong width");
  }
  return s;
}

const double& PickPerHead(const std::vector<double>& v, size_t j,
                          const char* name) {
  if (v.size() == 1) return v[0];
  if (j >= v.size()) {
    Fail(ErrorCode::kInvalidArgument,
         std::string(name) + " vector must hold one value or one per head");
  }
  return v[j];
}

}  // namespace

std::vector<double> ExtractRawFeatures(const RasterImage& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 8 || h < 8) Fail(ErrorCode::kImageTooSmall, "features need >= 8x8");
  g_extraction_count.fetch_add(1, std::memory_order_relaxed);

  const std::vector<double> luma = LumaPlane(img);
  std::vector<double> f(kFeatureDim, 0.0);

  // DCT bands over whole blocks.
  const auto& c = CosTable();
  std::array<double, kBands> band_sum{};
  std::array<int, kBands> band_count{};
  double block[8][8];
  double tmp[8][8];
  for (int by = 0; by + 8 <= h; by += 8) {
    for (int bx = 0; bx + 8 <= w; bx += 8) {
      for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
          block[y][x] = luma[static_cast<size_t>(by + y) * w + bx + x] - 128.0;
        }
      }
      for (int y = 0; y < 8; ++y) {
        for (int u = 0; u < 8; ++u) {
          double s = 0.0;
          for (int x = 0; x < 8; ++x) s += c[u][x] * block[y][x];
          tmp[y][u] = s;
        }
      }
      for (int v = 0; v < 8; ++v) {
        for (int u = 0; u < 8; ++u) {
          double s = 0.0;
          for (int y = 0; y < 8; ++y) s += c[v][y] * tmp[y][u];
          band_sum[u + v] += std::log1p(std::abs(s));
          ++band_count[u + v];
        }
      }
    }
  }
  for (int b = 0; b < kBands; ++b) f[b] = band_sum[b] / band_count[b];

  const double n = static_cast<double>(luma.size());
  const double mean = std::accumulate(luma.begin(), luma.end(), 0.0) / n;
  double var = 0.0;
  for (double v : luma) var += (v - mean) * (v - mean);
  f[15] = mean;
  f[16] = std::sqrt(var / n);

  double grad = 0.0;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      const double gx = 0.5 * (luma[i + 1] - luma[i - 1]);
      const double gy = 0.5 * (luma[i + w] - luma[i - w]);
      grad += std::sqrt(gx * gx + gy * gy);
    }
  }
  f[17] = grad / (static_cast<double>(w - 2) * (h - 2));

  for (double v : luma) {
    const int bin = std::clamp(static_cast<int>(v / 32.0), 0, 7);
    f[18 + bin] += 1.0;
  }
  for (int b = 0; b < 8; ++b) f[18 + b] /= n;
  return f;
}

uint64_t FeatureExtractionCount() {
  return g_extraction_count.load(std::memory_order_relaxed);
}

FeatureStats FeatureStats::Identity() {
  return {std::vector<double>(kFeatureDim, 0.0),
          std::vector<double>(kFeatureDim, 1.0)};
}

FeatureStats FeatureStats::Fit(const std::vector<std::vector<double>>& raw) {
  if (raw.empty()) Fail(ErrorCode::kEmptyInput, "no feature rows to fit");
  FeatureStats s = Identity();
  const double n = static_cast<double>(raw.size());
  for (int k = 0; k < kFeatureDim; ++k) {
    double m = 0.0;
    for (const auto& r : raw) m += r[k];
    m /= n;
    double var = 0.0;
    for (const auto& r : raw) var += (r[k] - m) * (r[k] - m);
    const double sd = std::sqrt(var / n);
    s.mean[k] = m;
    s.scale[k] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

std::vector<double> FeatureStats::Apply(std::span<const double> raw) const {
  if (raw.size() != mean.size()) {
    Fail(ErrorCode::kShapeMismatch, "feature vector has wrong width");
  }
  std::vector<double> out(raw.size());
  for (size_t k = 0; k < raw.size(); ++k) out[k] = (raw[k] - mean[k]) / scale[k];
  return out;
}

std::string_view FormName(Form form) { return form == Form::kOne ? "one" : "two"; }

Form ParseForm(std::string_view text) {
  if (text == "one" || text == "ONE" || text == "1") return Form::kOne;
  if (text == "two" || text == "TWO" || text == "2") return Form::kTwo;
  Fail(ErrorCode::kInvalidArgument, "form must be one or two");
}

double Sigmoid(double logit) {
  if (logit >= 0.0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

double ClampProbability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

BinaryHead::BinaryHead(Form form, double pr, double dt)
    : form_(form), params_(ParamCountFor(form), 0.0) {
  set_pr(pr);
  set_dt(dt);
}

size_t BinaryHead::ParamCount(Form form) { return ParamCountFor(form); }

void BinaryHead::set_dt(double dt) {
  if (!(dt > 0.0 && dt < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "decision threshold must lie in (0, 1)");
  }
  dt_ = dt;
}

void BinaryHead::set_pr(double pr) {
  if (!(pr > 0.0) || !std::isfinite(pr)) {
    Fail(ErrorCode::kInvalidArgument, "precision constant must be positive");
  }
  pr_ = pr;
}

double BinaryHead::Logit(std::span<const double> x) const {
  if (x.size() != kFeatureDim) {
    Fail(ErrorCode::kShapeMismatch, "feature vector has wrong width");
  }
  const double* p = params_.data();
  if (form_ == Form::kOne) {
    double z = p[kFeatureDim];
    for (int k = 0; k < kFeatureDim; ++k) z += p[k] * x[k];
    return z;
  }
  const double* b1 = p + kHiddenUnits * kFeatureDim;
  const double* w2 = b1 + kHiddenUnits;
  double z = w2[kHiddenUnits];
  for (int u = 0; u < kHiddenUnits; ++u) {
    double a = b1[u];
    const double* row = p + u * kFeatureDim;
    for (int k = 0; k < kFeatureDim; ++k) a += row[k] * x[k];
    z += w2[u] * std::tanh(a);
  }
  return z;
}

void BinaryHead::AccumulateLogitGradient(std::span<const double> x, double g,
                                         std::vector<double>& grad) const {
  double* d = grad.data();
  if (form_ == Form::kOne) {
    for (int k = 0; k < kFeatureDim; ++k) d[k] += g * x[k];
    d[kFeatureDim] += g;
    return;
  }
  const double* p = params_.data();
  const double* b1 = p + kHiddenUnits * kFeatureDim;
  const double* w2 = b1 + kHiddenUnits;
  double* db1 = d + kHiddenUnits * kFeatureDim;
  double* dw2 = db1 + kHiddenUnits;
  for (int u = 0; u < kHiddenUnits; ++u) {
    double a = b1[u];
    const double* row = p + u * kFeatureDim;
    for (int k = 0; k < kFeatureDim; ++k) a += row[k] * x[k];
    const double t = std::tanh(a);
    dw2[u] += g * t;
    const double ga = g * w2[u] * (1.0 - t * t);
    db1[u] += ga;
    double* drow = d + u * kFeatureDim;
    for (int k = 0; k < kFeatureDim; ++k) drow[k] += ga * x[k];
  }
  dw2[kHiddenUnits] += g;
}

double Loss(const BinaryHead& head, std::span<const LabeledExample> batch) {
  if (batch.empty()) Fail(ErrorCode::kEmptyInput, "loss of an empty batch");
  double sum = 0.0;
  for (const auto& ex : batch) {
    const double p = ClampProbability(head.Forward(ex.features));
    sum += ex.q ? head.pr() * std::log(p) : std::log(1.0 - p);
  }
  return -sum / static_cast<double>(batch.size());
}

std::vector<double> Grad(const BinaryHead& head,
                         std::span<const LabeledExample> batch) {
  if (batch.empty()) Fail(ErrorCode::kEmptyInput, "gradient of an empty batch");
  std::vector<double> grad(head.params().size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const auto& ex : batch) {
    const double p = head.Forward(ex.features);
    if (p < kProbabilityClamp || p > 1.0 - kProbabilityClamp) continue;
    const double g =
        inv_n * (ex.q ? -head.pr() * (1.0 - p) : p);
    head.AccumulateLogitGradient(ex.features, g, grad);
  }
  return grad;
}

BinaryHead TrainHead(const std::vector<std::vector<double>>& raw_features,
                     const std::vector<FeasibilityRecord>& labels, size_t column,
                     const TrainConfig& config, HeadTrainingReport* report) {
  if (raw_features.empty()) Fail(ErrorCode::kEmptyInput, "empty training set");
  if (raw_features.size() != labels.size()) {
    Fail(ErrorCode::kShapeMismatch, "features and labels differ in length");
  }
  if (config.epochs < 0 || config.batch_size < 1 ||
      !(config.learning_rate > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "bad training hyperparameters");
  }
  BinaryHead head(config.form, PickPerHead(config.pr, column, "pr"),
                  PickPerHead(config.dt, column, "dt"));

  const FeatureStats stats = FeatureStats::Fit(raw_features);
  if (config.form == Form::kTwo) head.own_stats() = stats;
  std::vector<std::vector<double>> x;
  x.reserve(raw_features.size());
  for (const auto& r : raw_features) x.push_back(stats.Apply(r));

  std::vector<LabeledExample> examples;
  examples.reserve(x.size());
  int positives = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const uint8_t q = labels[i].q.at(column);
    positives += q;
    examples.push_back({x[i], q});
  }

  Rng rng = Rng::Stream(config.seed, column);
  if (config.form == Form::kTwo) {
    const double a1 = 1.0 / std::sqrt(static_cast<double>(kFeatureDim));
    const double a2 = 1.0 / std::sqrt(static_cast<double>(kHiddenUnits));
    auto& p = head.params();
    size_t i = 0;
    for (; i < static_cast<size_t>(kHiddenUnits) * kFeatureDim; ++i) {
      p[i] = rng.Uniform(-a1, a1);
    }
    i += kHiddenUnits;  // b1 starts at zero
    for (int u = 0; u < kHiddenUnits; ++u) p[i++] = rng.Uniform(-a2, a2);
  }

  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<LabeledExample> batch;
  batch.reserve(config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(order);
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end =
          std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      batch.clear();
      for (size_t k = start; k < end; ++k) batch.push_back(examples[order[k]]);
      const std::vector<double> g = Grad(head, batch);
      auto& p = head.params();
      for (size_t k = 0; k < p.size(); ++k) p[k] -= config.learning_rate * g[k];
    }
  }
  CheckFinite(head.params(), "trained weights");

  if (report) {
    report->final_loss = Loss(head, examples);
    report->positives = positives;
    report->total = static_cast<int>(examples.size());
  }
  return head;
}

SelectorModel Train(const std::vector<std::vector<double>>& raw_features,
                    const std::vector<FeasibilityRecord>& labels,
                    const QfSet& qf_set, const TrainConfig& config) {
  if (raw_features.empty() || labels.empty()) {
    Fail(ErrorCode::kEmptyInput, "empty training set");
  }
  if (qf_set.empty()) Fail(ErrorCode::kNoCandidateQf, "pruned QF set is empty");
  for (const auto& rec : labels) {
    if (rec.q.size() != qf_set.size()) {
      Fail(ErrorCode::kModelMismatch,
           "label width for " + rec.image_id + " does not match the QF set");
    }
  }
  for (const auto& r : raw_features) {
    if (r.size() != kFeatureDim) {
      Fail(ErrorCode::kShapeMismatch, "feature vector has wrong width");
    }
  }
  if (config.pr.size() != 1 && config.pr.size() != qf_set.size()) {
    Fail(ErrorCode::kInvalidArgument, "pr vector must hold 1 or n values");
  }
  if (config.dt.size() != 1 && config.dt.size() != qf_set.size()) {
    Fail(ErrorCode::kInvalidArgument, "dt vector must hold 1 or n values");
  }

  SelectorModel model;
  model.form_ = config.form;
  model.qf_set_ = qf_set;
  model.config_ = config;
  if (config.form == Form::kOne) {
    model.extractor_.stats = FeatureStats::Fit(raw_features);
  }
  model.heads_.resize(qf_set.size());
  model.reports_.resize(qf_set.size());
  ParallelFor(qf_set.size(), config.parallelism, [&](size_t j) {
    model.heads_[j] =
        TrainHead(raw_features, labels, j, config, &model.reports_[j]);
    model.reports_[j].qf = qf_set[j];
  });
  for (const auto& r : model.reports_) {
    if (r.positives == 0 || r.positives == r.total) {
      model.warnings_.push_back("degenerate labels for qf" +
                                std::to_string(r.qf) + ": all " +
                                (r.positives == 0 ? "0" : "1"));
    }
  }
  return model;
}

void SelectorModel::SetDecisionThreshold(double dt) {
  for (auto& h : heads_) h.set_dt(dt);
}

std::vector<double> SelectorModel::ProbabilitiesFromRaw(
    std::span<const double> raw) const {
  std::vector<double> p(heads_.size());
  if (form_ == Form::kOne) {
    const std::vector<double> x = extractor_.stats.Apply(raw);
    for (size_t j = 0; j < heads_.size(); ++j) p[j] = heads_[j].Forward(x);
  } else {
    for (size_t j = 0; j < heads_.size(); ++j) {
      p[j] = heads_[j].Forward(heads_[j].own_stats().Apply(raw));
    }
  }
  return p;
}

std::vector<double> SelectorModel::Probabilities(const RasterImage& img) const {
  return ProbabilitiesFromRaw(ExtractRawFeatures(img));
}

std::vector<uint8_t> SelectorModel::PredictFromRaw(
    std::span<const double> raw) const {
  const std::vector<double> p = ProbabilitiesFromRaw(raw);
  std::vector<uint8_t> y(p.size());
  for (size_t j = 0; j < p.size(); ++j) y[j] = p[j] >= heads_[j].dt() ? 1 : 0;
  return y;
}

std::vector<uint8_t> SelectorModel::PredictFeasible(
    const RasterImage& img) const {
  return PredictFromRaw(ExtractRawFeatures(img));
}

std::string SelectorModel::ToJson() const {
  json heads = json::array();
  for (size_t j = 0; j < heads_.size(); ++j) {
    const auto& h = heads_[j];
    json jh = {{"qf", qf_set_[j]},
               {"form", FormName(h.form())},
               {"pr", h.pr()},
               {"dt", h.dt()},
               {"params", h.params()}};
    if (h.form() == Form::kTwo) jh["stats"] = StatsToJson(h.own_stats());
    if (j < reports_.size()) {
      jh["final_loss"] = reports_[j].final_loss;
      jh["positives"] = reports_[j].positives;
      jh["total"] = reports_[j].total;
    }
    heads.push_back(std::move(jh));
  }
  json doc = {
      {"format", "selector-model/1"},
      {"extractor",
       {{"spec_id", extractor_.spec_id}, {"stats", StatsToJson(extractor_.stats)}}},
      {"form", FormName(form_)},
      {"qf_set", qf_set_.values()},
      {"heads", heads},
      {"training",
       {{"seed", config_.seed},
        {"epochs", config_.epochs},
        {"batch_size", config_.batch_size},
        {"learning_rate", config_.learning_rate}}},
      {"warnings", warnings_}};
  return doc.dump(1) + "\n";
}

SelectorModel SelectorModel::FromJson(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() ||
      doc.value("format", "") != "selector-model/1") {
    Fail(ErrorCode::kModelMismatch, "not a selector-model/1 document");
  }
  try {
    SelectorModel m;
    m.extractor_.spec_id = doc.at("extractor").at("spec_id").get<std::string>();
    if (m.extractor_.spec_id != kFeatureSpecId) {
      Fail(ErrorCode::kModelMismatch,
           "unknown feature extractor " + m.extractor_.spec_id);
    }
    m.extractor_.stats = StatsFromJson(doc.at("extractor").at("stats"));
    m.form_ = ParseForm(doc.at("form").get<std::string>());
    m.qf_set_ = QfSet(doc.at("qf_set").get<std::vector<int>>());
    const json& heads = doc.at("heads");
    if (heads.size() != m.qf_set_.size()) {
      Fail(ErrorCode::kModelMismatch, "head count does not match the QF set");
    }
    for (size_t j = 0; j < heads.size(); ++j) {
      const json& jh = heads[j];
      if (jh.at("qf").get<int>() != m.qf_set_[j]) {
        Fail(ErrorCode::kModelMismatch, "head order does not match the QF set");
      }
      BinaryHead h(ParseForm(jh.at("form").get<std::string>()),
                   jh.at("pr").get<double>(), jh.at("dt").get<double>());
      if (h.form() != m.form_) {
        Fail(ErrorCode::kModelMismatch, "head form differs from model form");
      }
      h.params() = jh.at("params").get<std::vector<double>>();
      if (h.params().size() != BinaryHead::ParamCount(h.form())) {
        Fail(ErrorCode::kModelMismatch, "head has wrong parameter count");
      }
      CheckFinite(h.params(), "head weights");
      if (h.form() == Form::kTwo) h.own_stats() = StatsFromJson(jh.at("stats"));
      HeadTrainingReport r;
      r.qf = m.qf_set_[j];
      r.final_loss = jh.value("final_loss", 0.0);
      r.positives = jh.value("positives", 0);
      r.total = jh.value("total", 0);
      m.reports_.push_back(r);
      m.heads_.push_back(std::move(h));
    }
    const json& t = doc.at("training");
    m.config_.form = m.form_;
    m.config_.seed = t.at("seed").get<uint64_t>();
    m.config_.epochs = t.at("epochs").get<int>();
    m.config_.batch_size = t.at("batch_size").get<int>();
    m.config_.learning_rate = t.at("learning_rate").get<double>();
    m.config_.pr.clear();
    m.config_.dt.clear();
    for (const auto& h : m.heads_) {
      m.config_.pr.push_back(h.pr());
      m.config_.dt.push_back(h.dt());
    }
    m.warnings_ = doc.value("warnings", std::vector<std::string>{});
    return m;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kModelMismatch, std::string("bad model file: ") + e.what());
  }
}

}  // namespace qfs
