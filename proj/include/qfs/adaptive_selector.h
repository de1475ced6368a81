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

// Per-image QF choice and compression. Every strategy ends in the same
// encoder so baseline and adaptive runs are directly comparable.

#ifndef QFS_ADAPTIVE_SELECTOR_H_
#define QFS_ADAPTIVE_SELECTOR_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qfs/dataset_io.h"
#include "qfs/qf_set.h"
#include "qfs/rank_provider.h"
#include "qfs/selector_model.h"

namespace qfs {

class Strategy {
 public:
  enum class Kind { kLearned, kOracle, kFixed };

  static Strategy Learned() { return Strategy(Kind::kLearned, 0); }
  static Strategy Oracle() { return Strategy(Kind::kOracle, 0); }
  static Strategy Fixed(int qf);
  // "learned", "oracle" or "fixed:<qf>".
  static Strategy Parse(std::string_view text);

  Kind kind() const { return kind_; }
  int fixed_qf() const { return fixed_qf_; }
  std::string ToString() const;

  bool operator==(const Strategy&) const = default;

 private:
  Strategy(Kind kind, int qf) : kind_(kind), fixed_qf_(qf) {}
  Kind kind_;
  int fixed_qf_;
};

struct Selection {
  int qf = 0;
  bool fallback = false;
};

// Smallest QF with y_j = 1, else (max(pruned_set), fallback). Throws
// kNoCandidateQf for an empty set and kShapeMismatch if |y| != |set|.
Selection SelectQf(std::span<const uint8_t> y, const QfSet& pruned_set);

struct SelectionResult {
  std::string image_id;
  int chosen_qf = 0;
  Strategy strategy = Strategy::Learned();
  bool fallback_used = false;
  uint64_t compressed_bytes = 0;
  std::vector<uint8_t> feasibility;  // empty for FIXED

  bool operator==(const SelectionResult&) const = default;
};

struct SelectorInputs {
  QfSet pruned_set;
  const SelectorModel* model = nullptr;  // LEARNED
  const RankTable* ranks = nullptr;      // ORACLE
};

// Throws kInvalidArgument when the strategy's input is absent,
// kModelMismatch when the model's QF set differs from the pruned set and
// kMissingRank for incomplete rank tables. The encoded stream goes to
// `jpeg` when non-null.
SelectionResult CompressAdaptive(const ImageRecord& record,
                                 const RasterImage& img,
                                 const Strategy& strategy,
                                 const SelectorInputs& inputs,
                                 std::vector<uint8_t>* jpeg = nullptr);

// Runs every manifest image; results are in manifest order. With out_dir
// set, writes <out_dir>/<image_id>.jpg and <out_dir>/selection_log.jsonl.
std::vector<SelectionResult> CompressCorpus(
    const Manifest& manifest, const Strategy& strategy,
    const SelectorInputs& inputs,
    const std::optional<std::filesystem::path>& out_dir = std::nullopt,
    int parallelism = 1);

// {"image_id","qf","fallback","bytes","strategy"} per line.
std::string SelectionLogToJsonl(const std::vector<SelectionResult>& results);
std::vector<SelectionResult> ParseSelectionLog(std::string_view text);

}  // namespace qfs

#endif  // QFS_ADAPTIVE_SELECTOR_H_
