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

// Feasibility of a quality factor has two independent parts:
//
//  * corpus level: at that QF, at least `hit_rate_floor` of the calibration
//    corpus keeps MS-SSIM >= threshold (Calibrate prunes the candidate set);
//  * image level: the ground-truth rank of the compressed image is no worse
//    than the rank of the original (LabelImage).

#ifndef QFS_FEASIBILITY_H_
#define QFS_FEASIBILITY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfs/dataset_io.h"
#include "qfs/qf_set.h"
#include "qfs/quality_metrics.h"
#include "qfs/rank_provider.h"

namespace qfs {

struct QfHitRate {
  int qf = 0;
  int hits = 0;
  int total = 0;
  double hit_rate = 0.0;
};

struct CalibrationReport {
  double threshold = 0.0;
  double hit_rate_floor = 0.9;
  std::vector<QfHitRate> per_qf;  // candidate-set order
  QfSet pruned_set;

  std::string ToJson() const;
  static CalibrationReport FromJson(std::string_view text);
};

// ms_ssim[i][j]: MS-SSIM of image i against its round trip at qf_set[j].
using MsSsimMatrix = std::vector<std::vector<double>>;

MsSsimMatrix ComputeMsSsimMatrix(const Manifest& manifest, const QfSet& qf_set,
                                 int parallelism = 1,
                                 const MsSsimParams& params = {});

// Hit-rate pruning over precomputed scores. Comparisons are inclusive
// (score >= threshold, hit rate >= floor). An empty pruned set is reported,
// not rejected.
CalibrationReport CalibrateFromScores(const MsSsimMatrix& scores,
                                      const QfSet& qf_set, double threshold,
                                      double hit_rate_floor);

// Throws kEmptyInput for an empty manifest and kInvalidArgument unless
// threshold and floor lie in (0, 1]. A threshold of 0 is accepted as the
// degenerate "everything passes" calibration.
CalibrationReport Calibrate(const Manifest& manifest, const QfSet& qf_set,
                            double threshold, double hit_rate_floor,
                            int parallelism = 1,
                            const MsSsimParams& params = {});

// Reference starting QF for the customary MS-SSIM targets on large
// photographic corpora: 0.8 -> 10, 0.85 -> 20, 0.9 -> 40, 0.95 -> 60. A
// starting point to compare a local calibration against, not a substitute
// for running one.
std::optional<int> DefaultStartingQf(double threshold);

struct FeasibilityRecord {
  std::string image_id;
  std::vector<uint8_t> q;  // aligned with the pruned set

  bool operator==(const FeasibilityRecord&) const = default;
};

// q_j = 1 iff rank(QF_j) <= rank(original). Throws kMissingRank.
FeasibilityRecord LabelImage(const std::string& image_id,
                             const RankTable& ranks, const QfSet& pruned_set);

std::vector<FeasibilityRecord> BuildTrainingSet(const Manifest& manifest,
                                                const RankTable& ranks,
                                                const QfSet& pruned_set);

std::string FeasibilityToJsonl(const std::vector<FeasibilityRecord>& records);
std::vector<FeasibilityRecord> ParseFeasibilityJsonl(std::string_view text);

}  // namespace qfs

#endif  // QFS_FEASIBILITY_H_
