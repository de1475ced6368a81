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

#include "qfs/pipeline.h"

#include <cstdio>

#include "qfs/adaptive_selector.h"
#include "qfs/dataset_io.h"
#include "qfs/parallel.h"
#include "qfs/rank_provider.h"
#include "qfs/synthetic.h"

namespace qfs {
namespace {

std::string Format(const char* fmt, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

}  // namespace

DemoResult RunDemo(const std::filesystem::path& out, const DemoConfig& config,
                   const ProgressFn& progress) {
  auto say = [&](std::string_view msg) {
    if (progress) progress(msg);
  };
  DemoResult result;

  SyntheticConfig train_cfg;
  train_cfg.num_images = config.num_images;
  train_cfg.seed = config.seed;
  SyntheticConfig eval_cfg = train_cfg;
  eval_cfg.seed = config.seed + 1;
  say("stage=generate corpus=train images=" + std::to_string(config.num_images));
  const Manifest train = WriteSyntheticCorpus(out / "train", train_cfg);
  say("stage=generate corpus=eval images=" + std::to_string(config.num_images));
  const Manifest eval = WriteSyntheticCorpus(out / "eval", eval_cfg);

  say("stage=classifier");
  ToyClassifierConfig clf_cfg;
  clf_cfg.seed = config.seed;
  const ToyClassifier clf = TrainToyClassifier(train, clf_cfg, config.parallelism);
  WriteFileAtomic(out / "classifier.json", clf.ToJson());

  say("stage=ranks");
  const RankTable train_ranks =
      BuildRankTable(train, clf, config.qf_set, config.parallelism);
  const RankTable eval_ranks =
      BuildRankTable(eval, clf, config.qf_set, config.parallelism);
  WriteFileAtomic(out / "train_ranks.jsonl", train_ranks.ToJsonl());
  WriteFileAtomic(out / "eval_ranks.jsonl", eval_ranks.ToJsonl());

  say("stage=calibrate");
  result.calibration = Calibrate(train, config.qf_set, config.threshold,
                                 config.hit_rate_floor, config.parallelism);
  WriteFileAtomic(out / "calibration.json", result.calibration.ToJson());
  const QfSet& pruned = result.calibration.pruned_set;
  say("stage=calibrate pruned_set=" + pruned.ToString());

  say("stage=label");
  TrainingData data;
  data.labels = BuildTrainingSet(train, train_ranks, pruned);
  WriteFileAtomic(out / "labels.jsonl", FeasibilityToJsonl(data.labels));
  data.raw_features.resize(train.records.size());
  ParallelFor(train.records.size(), config.parallelism, [&](size_t i) {
    data.raw_features[i] = ExtractRawFeatures(LoadImage(train.records[i]));
  });

  say("stage=train");
  TrainConfig train_config = config.train;
  train_config.seed = config.seed;
  train_config.parallelism = config.parallelism;
  result.model = Train(data.raw_features, data.labels, pruned, train_config);
  WriteFileAtomic(out / "model.json", result.model.ToJson());
  result.warnings = result.model.warnings();

  say("stage=compress strategy=learned");
  SelectorInputs inputs;
  inputs.pruned_set = pruned;
  inputs.model = &result.model;
  inputs.ranks = &eval_ranks;
  CompressCorpus(eval, Strategy::Learned(), inputs, out / "compressed",
                 config.parallelism);

  say("stage=evaluate");
  const CorpusCache cache = BuildCorpusCache(eval, config.qf_set, config.parallelism);
  result.original = OriginalPoint(eval, eval_ranks);
  result.baseline = BaselineCurve(eval, config.qf_set, eval_ranks, cache);
  const auto oracle_log = CompressCorpus(eval, Strategy::Oracle(), inputs,
                                         std::nullopt, config.parallelism);
  result.oracle = ScoreSelection(eval, oracle_log, eval_ranks, "oracle");
  int fallbacks = 0;
  for (const auto& r : oracle_log) fallbacks += r.fallback_used ? 1 : 0;
  result.oracle_fallback_fraction =
      static_cast<double>(fallbacks) / static_cast<double>(oracle_log.size());
  result.adaptive = AdaptiveCurve(eval, cache, eval_ranks, data, pruned,
                                  train_config, config.grid, &result.warnings);

  std::vector<RaPoint> extra = result.adaptive;
  extra.push_back(result.oracle);
  extra.push_back(result.original);
  EmitReport(result.baseline, extra, out / "report.csv", out / "report.svg");
  say(Format("stage=done original_top1=%.4f oracle_top1=%.4f oracle_cr=%.4f",
             result.original.top1, result.oracle.top1, result.oracle.cr));
  return result;
}

}  // namespace qfs
