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

// End-to-end run on the synthetic corpus: generate disjoint training and
// evaluation corpora, fit the reference classifier, rank every variant,
// calibrate, label, train the selector and sweep the rate-accuracy plane.
//
// Output layout under `out`:
//   train/, eval/              corpora (PNG + manifest.csv)
//   classifier.json            reference classifier
//   train_ranks.jsonl, eval_ranks.jsonl
//   calibration.json, labels.jsonl, model.json
//   compressed/                learned-strategy output for the eval corpus,
//                              with selection_log.jsonl
//   report.csv, report.svg

#ifndef QFS_PIPELINE_H_
#define QFS_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qfs/evaluation.h"
#include "qfs/feasibility.h"
#include "qfs/qf_set.h"
#include "qfs/selector_model.h"

namespace qfs {

struct DemoConfig {
  uint64_t seed = 42;
  int num_images = 240;  // per corpus
  int parallelism = 1;
  double threshold = 0.8;
  double hit_rate_floor = 0.9;
  QfSet qf_set = QfSet::Default();
  SweepGrid grid;
  TrainConfig train;  // pr/dt here configure model.json
};

struct DemoResult {
  CalibrationReport calibration;
  RaPoint original;
  RaPoint oracle;
  double oracle_fallback_fraction = 0.0;
  std::vector<RaPoint> baseline;
  std::vector<RaPoint> adaptive;
  SelectorModel model;
  std::vector<std::string> warnings;
};

using ProgressFn = std::function<void(std::string_view)>;

DemoResult RunDemo(const std::filesystem::path& out, const DemoConfig& config,
                   const ProgressFn& progress = nullptr);

}  // namespace qfs

#endif  // QFS_PIPELINE_H_
