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

// Rate-accuracy harness. Compression ratio is a ratio of sums: total
// original stored bytes over total compressed bytes for the whole corpus.

#ifndef QFS_EVALUATION_H_
#define QFS_EVALUATION_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qfs/adaptive_selector.h"
#include "qfs/dataset_io.h"
#include "qfs/feasibility.h"
#include "qfs/qf_set.h"
#include "qfs/rank_provider.h"
#include "qfs/selector_model.h"

namespace qfs {

struct RaPoint {
  double cr = 0.0;
  double top1 = 0.0;
  double top5 = 0.0;
  std::string strategy;  // "original", "fixed:Q", "learned" or "oracle"
  double pr = 0.0;       // learned points only
  double dt = 0.0;       // learned points only
  int qf = 0;            // fixed points only

  bool operator==(const RaPoint&) const = default;
};

// Throws kCoverageMismatch unless the log covers every manifest image
// exactly once.
double CompressionRatio(const Manifest& manifest,
                        const std::vector<SelectionResult>& log);

// Fraction of ranks <= k. Throws kInvalidArgument for k < 1 and
// kEmptyInput for no ranks.
double TopKAccuracy(std::span<const int> ranks, int k);

// Rank of every manifest image at its selected variant, manifest order.
std::vector<int> SelectedRanks(const Manifest& manifest,
                               const std::vector<SelectionResult>& log,
                               const RankTable& ranks);

RaPoint ScoreSelection(const Manifest& manifest,
                       const std::vector<SelectionResult>& log,
                       const RankTable& ranks, std::string strategy);

// Accuracy of the uncompressed originals, at CR 1.
RaPoint OriginalPoint(const Manifest& manifest, const RankTable& ranks);

// Per-image raw features and encoded sizes at every QF of a set, computed
// once and reused across a sweep.
struct CorpusCache {
  QfSet qf_set;
  std::vector<std::vector<double>> raw_features;
  std::vector<std::vector<uint64_t>> sizes;  // [image][qf index]

  uint64_t Size(size_t image, int qf) const;
};

CorpusCache BuildCorpusCache(const Manifest& manifest, const QfSet& qf_set,
                             int parallelism = 1);

// One FIXED point per QF of the set, in set order.
std::vector<RaPoint> BaselineCurve(const Manifest& manifest,
                                   const QfSet& qf_set, const RankTable& ranks,
                                   const CorpusCache& cache);

struct SweepGrid {
  std::vector<double> pr = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  std::vector<double> dt = {0.5, 0.6, 0.7, 0.8, 0.9};

  // Comma list parsers. Throw kInvalidArgument on bad values.
  static std::vector<double> ParseList(std::string_view text);

  // Distinct (pr, dt) pairs in grid order; duplicates are dropped with a
  // warning.
  std::vector<std::pair<double, double>> Pairs(
      std::vector<std::string>* warnings = nullptr) const;
};

// Training data for the per-pr retraining inside a sweep.
struct TrainingData {
  std::vector<std::vector<double>> raw_features;
  std::vector<FeasibilityRecord> labels;
};

// Learned selection from cached features and sizes. Identical to
// CompressCorpus with the same model.
std::vector<SelectionResult> SelectLearned(const Manifest& manifest,
                                           const CorpusCache& cache,
                                           const SelectorModel& model);

// For each pr, trains one model from `config`; for each dt, thresholds it
// and scores the selection on the evaluation corpus. Points are sorted by
// CR (ties keep grid order).
std::vector<RaPoint> AdaptiveCurve(const Manifest& eval_manifest,
                                   const CorpusCache& eval_cache,
                                   const RankTable& eval_ranks,
                                   const TrainingData& train,
                                   const QfSet& pruned_set,
                                   const TrainConfig& config,
                                   const SweepGrid& grid,
                                   std::vector<std::string>* warnings = nullptr);

// Columns cr,top1,top5,strategy,pr,dt,qf; numbers printed with 17
// significant digits so parsing reproduces every point exactly.
std::string ReportCsv(const std::vector<RaPoint>& points);
std::vector<RaPoint> ParseReportCsv(std::string_view text);

// Top-1 and top-5 against CR. Baseline lines dashed, learned points solid;
// other adaptive points (oracle, original) are drawn as labeled markers.
std::string ReportSvg(const std::vector<RaPoint>& baseline,
                      const std::vector<RaPoint>& adaptive);

// Writes baseline followed by adaptive points. Throws kNoData when both
// are empty.
void EmitReport(const std::vector<RaPoint>& baseline,
                const std::vector<RaPoint>& adaptive,
                const std::filesystem::path& csv_path,
                const std::filesystem::path& svg_path);

}  // namespace qfs

#endif  // QFS_EVALUATION_H_
