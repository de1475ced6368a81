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

#include "qfs/adaptive_selector.h"

#include <charconv>
#include <sstream>

#include "json.hpp"
#include "qfs/feasibility.h"
#include "qfs/jpeg_codec.h"
#include "qfs/parallel.h"
#include "qfs/status.h"

namespace qfs {

using nlohmann::json;

Strategy Strategy::Fixed(int qf) {
  return Strategy(Kind::kFixed, QualityFactor(qf).value());
}

Strategy Strategy::Parse(std::string_view text) {
  if (text == "learned") return Learned();
  if (text == "oracle") return Oracle();
  constexpr std::string_view kFixed = "fixed:";
  if (text.substr(0, kFixed.size()) == kFixed) {
    const std::string_view num = text.substr(kFixed.size());
    int qf = 0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), qf);
    if (ec == std::errc() && ptr == num.data() + num.size() && qf >= 1 &&
        qf <= 100) {
      return Fixed(qf);
    }
  }
  Fail(ErrorCode::kInvalidArgument,
       "strategy must be learned, oracle or fixed:<qf>, got '" +
           std::string(text) + "'");
}

std::string Strategy::ToString() const {
  switch (kind_) {
    case Kind::kLearned:
      return "learned";
    case Kind::kOracle:
      return "oracle";
    case Kind::kFixed:
      break;
  }
  return "fixed:" + std::to_string(fixed_qf_);
}

Selection SelectQf(std::span<const uint8_t> y, const QfSet& pruned_set) {
  if (pruned_set.empty()) {
    Fail(ErrorCode::kNoCandidateQf, "no candidate QF after pruning");
  }
  if (y.size() != pruned_set.size()) {
    Fail(ErrorCode::kShapeMismatch, "feasibility vector does not match QF set");
  }
  for (size_t j = 0; j < y.size(); ++j) {
    if (y[j]) return {pruned_set[j], false};
  }
  return {pruned_set.Max(), true};
}

SelectionResult CompressAdaptive(const ImageRecord& record,
                                 const RasterImage& img,
                                 const Strategy& strategy,
                                 const SelectorInputs& inputs,
                                 std::vector<uint8_t>* jpeg) {
  SelectionResult r;
  r.image_id = record.image_id;
  r.strategy = strategy;
  switch (strategy.kind()) {
    case Strategy::Kind::kFixed:
      r.chosen_qf = strategy.fixed_qf();
      break;
    case Strategy::Kind::kLearned: {
      if (!inputs.model) {
        Fail(ErrorCode::kInvalidArgument, "learned strategy needs a model");
      }
      if (!(inputs.model->qf_set() == inputs.pruned_set)) {
        Fail(ErrorCode::kModelMismatch,
             "model QF set " + inputs.model->qf_set().ToString() +
                 " differs from pruned set " + inputs.pruned_set.ToString());
      }
      r.feasibility = inputs.model->PredictFeasible(img);
      const Selection s = SelectQf(r.feasibility, inputs.pruned_set);
      r.chosen_qf = s.qf;
      r.fallback_used = s.fallback;
      break;
    }
    case Strategy::Kind::kOracle: {
      if (!inputs.ranks) {
        Fail(ErrorCode::kInvalidArgument, "oracle strategy needs a rank table");
      }
      r.feasibility =
          LabelImage(record.image_id, *inputs.ranks, inputs.pruned_set).q;
      const Selection s = SelectQf(r.feasibility, inputs.pruned_set);
      r.chosen_qf = s.qf;
      r.fallback_used = s.fallback;
      break;
    }
  }
  JpegBytes out = Encode(img, QualityFactor(r.chosen_qf));
  r.compressed_bytes = out.bytes.size();
  if (jpeg) *jpeg = std::move(out.bytes);
  return r;
}

std::vector<SelectionResult> CompressCorpus(
    const Manifest& manifest, const Strategy& strategy,
    const SelectorInputs& inputs,
    const std::optional<std::filesystem::path>& out_dir, int parallelism) {
  std::vector<SelectionResult> results(manifest.records.size());
  ParallelFor(manifest.records.size(), parallelism, [&](size_t i) {
    const ImageRecord& rec = manifest.records[i];
    std::vector<uint8_t> bytes;
    results[i] = CompressAdaptive(rec, LoadImage(rec), strategy, inputs,
                                  out_dir ? &bytes : nullptr);
    if (out_dir) WriteFileAtomic(*out_dir / (rec.image_id + ".jpg"), bytes);
  });
  if (out_dir) {
    WriteFileAtomic(*out_dir / "selection_log.jsonl",
                    SelectionLogToJsonl(results));
  }
  return results;
}

std::string SelectionLogToJsonl(const std::vector<SelectionResult>& results) {
  std::string out;
  for (const auto& r : results) {
    json row = {{"image_id", r.image_id},
                {"qf", r.chosen_qf},
                {"fallback", r.fallback_used},
                {"bytes", r.compressed_bytes},
                {"strategy", r.strategy.ToString()}};
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::vector<SelectionResult> ParseSelectionLog(std::string_view text) {
  std::vector<SelectionResult> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json row = json::parse(line, nullptr, false);
    const std::string where = "selection log line " + std::to_string(line_no);
    if (row.is_discarded()) Fail(ErrorCode::kMalformedRow, "malformed " + where);
    try {
      SelectionResult r;
      r.image_id = row.at("image_id").get<std::string>();
      r.chosen_qf = row.at("qf").get<int>();
      r.fallback_used = row.at("fallback").get<bool>();
      r.compressed_bytes = row.at("bytes").get<uint64_t>();
      r.strategy = Strategy::Parse(row.at("strategy").get<std::string>());
      out.push_back(std::move(r));
    } catch (const json::exception&) {
      Fail(ErrorCode::kMalformedRow, "malformed " + where);
    }
  }
  return out;
}

}  // namespace qfs
