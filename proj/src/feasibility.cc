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

#include "qfs/feasibility.h"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "qfs/jpeg_codec.h"
#include "qfs/parallel.h"
#include "qfs/status.h"

namespace qfs {

using nlohmann::json;

MsSsimMatrix ComputeMsSsimMatrix(const Manifest& manifest, const QfSet& qf_set,
                                 int parallelism, const MsSsimParams& params) {
  MsSsimMatrix scores(manifest.records.size());
  ParallelFor(manifest.records.size(), parallelism, [&](size_t i) {
    const RasterImage img = LoadImage(manifest.records[i]);
    scores[i].resize(qf_set.size());
    for (size_t j = 0; j < qf_set.size(); ++j) {
      scores[i][j] = MsSsim(img, RoundTrip(img, QualityFactor(qf_set[j])), params);
    }
  });
  return scores;
}

CalibrationReport CalibrateFromScores(const MsSsimMatrix& scores,
                                      const QfSet& qf_set, double threshold,
                                      double hit_rate_floor) {
  if (scores.empty()) Fail(ErrorCode::kEmptyInput, "calibration corpus is empty");
  CalibrationReport report;
  report.threshold = threshold;
  report.hit_rate_floor = hit_rate_floor;
  std::vector<int> kept;
  for (size_t j = 0; j < qf_set.size(); ++j) {
    QfHitRate h;
    h.qf = qf_set[j];
    h.total = static_cast<int>(scores.size());
    for (const auto& row : scores) {
      if (row.size() != qf_set.size()) {
        Fail(ErrorCode::kShapeMismatch, "MS-SSIM matrix does not match QF set");
      }
      if (row[j] >= threshold) ++h.hits;
    }
    h.hit_rate = static_cast<double>(h.hits) / h.total;
    if (h.hit_rate >= hit_rate_floor) kept.push_back(h.qf);
    report.per_qf.push_back(h);
  }
  report.pruned_set = QfSet(std::move(kept));
  return report;
}

CalibrationReport Calibrate(const Manifest& manifest, const QfSet& qf_set,
                            double threshold, double hit_rate_floor,
                            int parallelism, const MsSsimParams& params) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "threshold must lie in [0, 1]");
  }
  if (!(hit_rate_floor > 0.0 && hit_rate_floor <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "hit-rate floor must lie in (0, 1]");
  }
  if (manifest.records.empty()) {
    Fail(ErrorCode::kEmptyInput, "calibration manifest is empty");
  }
  return CalibrateFromScores(
      ComputeMsSsimMatrix(manifest, qf_set, parallelism, params), qf_set,
      threshold, hit_rate_floor);
}

std::optional<int> DefaultStartingQf(double threshold) {
  static constexpr struct {
    double threshold;
    int qf;
  } kProfile[] = {{0.8, 10}, {0.85, 20}, {0.9, 40}, {0.95, 60}};
  for (const auto& p : kProfile) {
    if (std::abs(p.threshold - threshold) < 1e-9) return p.qf;
  }
  return std::nullopt;
}

std::string CalibrationReport::ToJson() const {
  json per = json::array();
  for (const auto& h : per_qf) {
    per.push_back({{"qf", h.qf},
                   {"hits", h.hits},
                   {"total", h.total},
                   {"hit_rate", h.hit_rate}});
  }
  json doc = {{"format", "calibration/1"},
              {"threshold", threshold},
              {"hit_rate_floor", hit_rate_floor},
              {"per_qf", per},
              {"pruned_set", pruned_set.values()}};
  if (auto start = DefaultStartingQf(threshold)) {
    doc["reference_starting_qf"] = *start;
  }
  return doc.dump(2) + "\n";
}

CalibrationReport CalibrationReport::FromJson(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || doc.value("format", "") != "calibration/1") {
    Fail(ErrorCode::kMalformedRow, "not a calibration/1 document");
  }
  try {
    CalibrationReport r;
    r.threshold = doc.at("threshold").get<double>();
    r.hit_rate_floor = doc.at("hit_rate_floor").get<double>();
    for (const auto& h : doc.at("per_qf")) {
      r.per_qf.push_back({h.at("qf").get<int>(), h.at("hits").get<int>(),
                          h.at("total").get<int>(), h.at("hit_rate").get<double>()});
    }
    r.pruned_set = QfSet(doc.at("pruned_set").get<std::vector<int>>());
    return r;
  } catch (const json::exception& e) {
    Fail(ErrorCode::kMalformedRow, std::string("bad calibration report: ") + e.what());
  }
}

FeasibilityRecord LabelImage(const std::string& image_id,
                             const RankTable& ranks, const QfSet& pruned_set) {
  FeasibilityRecord rec;
  rec.image_id = image_id;
  const int orig = ranks.Get(image_id, Variant::Original());
  rec.q.reserve(pruned_set.size());
  for (int qf : pruned_set) {
    rec.q.push_back(ranks.Get(image_id, Variant::Qf(qf)) <= orig ? 1 : 0);
  }
  return rec;
}

std::vector<FeasibilityRecord> BuildTrainingSet(const Manifest& manifest,
                                                const RankTable& ranks,
                                                const QfSet& pruned_set) {
  std::vector<FeasibilityRecord> out;
  out.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) {
    out.push_back(LabelImage(rec.image_id, ranks, pruned_set));
  }
  return out;
}

std::string FeasibilityToJsonl(const std::vector<FeasibilityRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    std::vector<int> q(r.q.begin(), r.q.end());
    out += json{{"image_id", r.image_id}, {"q", q}}.dump();
    out += '\n';
  }
  return out;
}

std::vector<FeasibilityRecord> ParseFeasibilityJsonl(std::string_view text) {
  std::vector<FeasibilityRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row = json::parse(line, nullptr, false);
    bool ok = !row.is_discarded() && row.is_object() &&
              row.contains("image_id") && row["image_id"].is_string() &&
              row.contains("q") && row["q"].is_array();
    FeasibilityRecord rec;
    if (ok) {
      rec.image_id = row["image_id"].get<std::string>();
      for (const auto& v : row["q"]) {
        if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
          ok = false;
          break;
        }
        rec.q.push_back(static_cast<uint8_t>(v.get<int>()));
      }
    }
    if (!ok) {
      Fail(ErrorCode::kMalformedRow,
           "malformed feasibility row at line " + std::to_string(line_no));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace qfs
