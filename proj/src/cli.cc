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

#include "qfs/cli.h"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "CLI11.hpp"
#include "qfs/adaptive_selector.h"
#include "qfs/dataset_io.h"
#include "qfs/evaluation.h"
#include "qfs/feasibility.h"
#include "qfs/parallel.h"
#include "qfs/pipeline.h"
#include "qfs/rank_provider.h"
#include "qfs/selector_model.h"
#include "qfs/status.h"

namespace qfs {
namespace {

namespace fs = std::filesystem;

// Bad flag combinations found after parsing; reported like parse errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string manifest;
  std::string train_manifest;
  std::string qf_set = "10,20,30,40,50,60,70,80,90";
  double threshold = 0.8;
  double floor = 0.9;
  std::string strategy = "learned";
  std::string model;
  std::string ranks;
  std::string calibration;
  std::string labels;
  std::string classifier;
  std::string pr_grid = "0.2,0.3,0.4,0.5,0.6,0.7";
  std::string dt_grid = "0.5,0.6,0.7,0.8,0.9";
  std::string pr = "0.5";
  std::string dt = "0.5";
  std::string form = "one";
  std::string out;
  uint64_t seed = 42;
  int parallel = 1;
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 0.1;
  int images = 240;
};

std::string ReadText(const fs::path& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  return std::string(bytes.begin(), bytes.end());
}

std::string Escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

QfSet ParseQfSetFlag(const std::string& text) {
  try {
    return QfSet::Parse(text);
  } catch (const Error& e) {
    throw UsageError(std::string("--qf-set: ") + e.what());
  }
}

std::vector<double> ParseListFlag(const char* flag, const std::string& text) {
  try {
    return SweepGrid::ParseList(text);
  } catch (const Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

Form ParseFormFlag(const std::string& text) {
  try {
    return ParseForm(text);
  } catch (const Error& e) {
    throw UsageError(std::string("--form: ") + e.what());
  }
}

Strategy ParseStrategyFlag(const std::string& text) {
  try {
    return Strategy::Parse(text);
  } catch (const Error& e) {
    throw UsageError(std::string("--strategy: ") + e.what());
  }
}

void Require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

class Runner {
 public:
  Runner(const Options& o, std::ostream& out, std::ostream& err)
      : o_(o), out_(out), err_(err) {}

  void Progress(std::string_view msg) { err_ << "qfselect: " << msg << "\n"; }

  // Pruned set from --calibration when given, else --qf-set.
  QfSet PrunedSet() {
    if (!o_.calibration.empty()) {
      return CalibrationReport::FromJson(ReadText(o_.calibration)).pruned_set;
    }
    return ParseQfSetFlag(o_.qf_set);
  }

  TrainConfig MakeTrainConfig(size_t heads) {
    TrainConfig c;
    c.form = ParseFormFlag(o_.form);
    c.pr = ParseListFlag("--pr", o_.pr);
    c.dt = ParseListFlag("--dt", o_.dt);
    c.epochs = o_.epochs;
    c.batch_size = o_.batch_size;
    c.learning_rate = o_.learning_rate;
    c.seed = o_.seed;
    c.parallelism = o_.parallel;
    if (heads > 0) {
      if (c.pr.size() != 1 && c.pr.size() != heads) {
        throw UsageError("--pr needs one value or one per QF");
      }
      if (c.dt.size() != 1 && c.dt.size() != heads) {
        throw UsageError("--dt needs one value or one per QF");
      }
    }
    return c;
  }

  void Calibrate() {
    Require(o_.manifest, "--manifest");
    const QfSet set = ParseQfSetFlag(o_.qf_set);
    const fs::path out = o_.out.empty() ? "calibration.json" : o_.out;
    const Manifest m = LoadManifest(o_.manifest);
    Progress("stage=calibrate images=" + std::to_string(m.records.size()));
    const CalibrationReport r =
        qfs::Calibrate(m, set, o_.threshold, o_.floor, o_.parallel);
    WriteFileAtomic(out, r.ToJson());
    Progress("stage=calibrate pruned_set=" + r.pruned_set.ToString() +
             " out=" + out.string());
  }

  void BuildRanks() {
    Require(o_.manifest, "--manifest");
    const QfSet set = ParseQfSetFlag(o_.qf_set);
    const fs::path out = o_.out.empty() ? "ranks.jsonl" : o_.out;
    const Manifest m = LoadManifest(o_.manifest);
    ToyClassifier clf;
    if (!o_.classifier.empty() && fs::exists(o_.classifier)) {
      clf = ToyClassifier::FromJson(ReadText(o_.classifier));
      Progress("stage=classifier source=" + o_.classifier);
    } else {
      const Manifest train =
          o_.train_manifest.empty() ? m : LoadManifest(o_.train_manifest);
      ToyClassifierConfig cfg;
      cfg.seed = o_.seed;
      Progress("stage=classifier source=train images=" +
               std::to_string(train.records.size()));
      clf = TrainToyClassifier(train, cfg, o_.parallel);
      if (!o_.classifier.empty()) WriteFileAtomic(o_.classifier, clf.ToJson());
    }
    Progress("stage=ranks variants=" + std::to_string(set.size() + 1));
    WriteFileAtomic(out, BuildRankTable(m, clf, set, o_.parallel).ToJsonl());
    Progress("stage=ranks out=" + out.string());
  }

  void Label() {
    Require(o_.manifest, "--manifest");
    Require(o_.ranks, "--ranks");
    const QfSet pruned = PrunedSet();
    const fs::path out = o_.out.empty() ? "labels.jsonl" : o_.out;
    const Manifest m = LoadManifest(o_.manifest);
    const RankTable ranks = LoadRankTable(o_.ranks);
    const auto records = BuildTrainingSet(m, ranks, pruned);
    WriteFileAtomic(out, FeasibilityToJsonl(records));
    Progress("stage=label images=" + std::to_string(records.size()) +
             " out=" + out.string());
  }

  TrainingData LoadTrainingData(const std::string& manifest_path) {
    Require(o_.labels, "--labels");
    const Manifest m = LoadManifest(manifest_path);
    TrainingData data;
    data.labels = ParseFeasibilityJsonl(ReadText(o_.labels));
    if (data.labels.size() != m.records.size()) {
      Fail(ErrorCode::kCoverageMismatch, "labels do not cover the manifest");
    }
    for (size_t i = 0; i < m.records.size(); ++i) {
      if (data.labels[i].image_id != m.records[i].image_id) {
        Fail(ErrorCode::kCoverageMismatch,
             "labels are not in manifest order at " + m.records[i].image_id);
      }
    }
    data.raw_features.resize(m.records.size());
    ParallelFor(m.records.size(), o_.parallel, [&](size_t i) {
      data.raw_features[i] = ExtractRawFeatures(LoadImage(m.records[i]));
    });
    return data;
  }

  void TrainModel() {
    Require(o_.manifest, "--manifest");
    const QfSet pruned = PrunedSet();
    const TrainConfig cfg = MakeTrainConfig(pruned.size());
    const fs::path out = o_.out.empty() ? "model.json" : o_.out;
    const TrainingData data = LoadTrainingData(o_.manifest);
    Progress("stage=train form=" + std::string(FormName(cfg.form)) +
             " heads=" + std::to_string(pruned.size()));
    const SelectorModel model = Train(data.raw_features, data.labels, pruned, cfg);
    for (const auto& w : model.warnings()) Progress("warning: " + w);
    WriteFileAtomic(out, model.ToJson());
    Progress("stage=train out=" + out.string());
  }

  void Compress() {
    Require(o_.manifest, "--manifest");
    const Strategy strategy = ParseStrategyFlag(o_.strategy);
    if (strategy.kind() == Strategy::Kind::kLearned) Require(o_.model, "--model");
    if (strategy.kind() == Strategy::Kind::kOracle) Require(o_.ranks, "--ranks");
    const fs::path out = o_.out.empty() ? "compressed" : o_.out;
    const Manifest m = LoadManifest(o_.manifest);
    std::optional<SelectorModel> model;
    std::optional<RankTable> ranks;
    SelectorInputs inputs;
    if (!o_.model.empty()) {
      model = SelectorModel::FromJson(ReadText(o_.model));
      inputs.model = &*model;
    }
    if (!o_.ranks.empty()) {
      ranks = LoadRankTable(o_.ranks);
      inputs.ranks = &*ranks;
    }
    if (!o_.calibration.empty() || !model) {
      inputs.pruned_set = PrunedSet();
    } else {
      inputs.pruned_set = model->qf_set();
    }
    Progress("stage=compress strategy=" + strategy.ToString() +
             " images=" + std::to_string(m.records.size()));
    const auto log = CompressCorpus(m, strategy, inputs, out, o_.parallel);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", CompressionRatio(m, log));
    Progress("stage=compress cr=" + std::string(buf) + " out=" + out.string());
  }

  void Evaluate() {
    Require(o_.manifest, "--manifest");
    Require(o_.ranks, "--ranks");
    const QfSet baseline_set = ParseQfSetFlag(o_.qf_set);
    SweepGrid grid;
    grid.pr = ParseListFlag("--pr-grid", o_.pr_grid);
    grid.dt = ParseListFlag("--dt-grid", o_.dt_grid);
    if (o_.labels.empty() && o_.model.empty()) {
      throw UsageError("evaluate needs --labels (retrain per pr) or --model");
    }
    const fs::path out = o_.out.empty() ? "report" : o_.out;
    const Manifest m = LoadManifest(o_.manifest);
    const RankTable ranks = LoadRankTable(o_.ranks);

    std::vector<std::string> warnings;
    Progress("stage=evaluate images=" + std::to_string(m.records.size()));
    const CorpusCache cache = BuildCorpusCache(m, baseline_set, o_.parallel);
    const std::vector<RaPoint> baseline = BaselineCurve(m, baseline_set, ranks, cache);
    std::vector<RaPoint> adaptive;
    QfSet pruned;
    if (!o_.labels.empty()) {
      pruned = PrunedSet();
      const TrainingData data = LoadTrainingData(
          o_.train_manifest.empty() ? o_.manifest : o_.train_manifest);
      adaptive = AdaptiveCurve(m, cache, ranks, data, pruned,
                               MakeTrainConfig(pruned.size()), grid, &warnings);
    } else {
      SelectorModel model = SelectorModel::FromJson(ReadText(o_.model));
      pruned = model.qf_set();
      const double pr = model.heads().empty() ? 0.0 : model.heads()[0].pr();
      for (const auto& [unused, dt] : SweepGrid{{pr}, grid.dt}.Pairs(&warnings)) {
        model.SetDecisionThreshold(dt);
        RaPoint p = ScoreSelection(m, SelectLearned(m, cache, model), ranks, "learned");
        p.pr = pr;
        p.dt = dt;
        adaptive.push_back(p);
      }
      std::stable_sort(adaptive.begin(), adaptive.end(),
                       [](const RaPoint& a, const RaPoint& b) { return a.cr < b.cr; });
    }
    for (const auto& w : warnings) Progress("warning: " + w);
    SelectorInputs inputs;
    inputs.pruned_set = pruned;
    inputs.ranks = &ranks;
    adaptive.push_back(ScoreSelection(
        m, CompressCorpus(m, Strategy::Oracle(), inputs, std::nullopt, o_.parallel),
        ranks, "oracle"));
    adaptive.push_back(OriginalPoint(m, ranks));
    EmitReport(baseline, adaptive, out / "report.csv", out / "report.svg");
    Progress("stage=evaluate points=" +
             std::to_string(baseline.size() + adaptive.size()) +
             " out=" + out.string());
  }

  void Demo() {
    DemoConfig cfg;
    cfg.seed = o_.seed;
    cfg.num_images = o_.images;
    cfg.parallelism = o_.parallel;
    cfg.threshold = o_.threshold;
    cfg.hit_rate_floor = o_.floor;
    cfg.qf_set = ParseQfSetFlag(o_.qf_set);
    cfg.grid.pr = ParseListFlag("--pr-grid", o_.pr_grid);
    cfg.grid.dt = ParseListFlag("--dt-grid", o_.dt_grid);
    cfg.train = MakeTrainConfig(0);
    if (cfg.train.pr.size() != 1 || cfg.train.dt.size() != 1) {
      throw UsageError("demo takes a single --pr and --dt value");
    }
    if (o_.images < 10) throw UsageError("--images must be >= 10");
    const fs::path out = o_.out.empty() ? "demo_out" : o_.out;
    const DemoResult r =
        RunDemo(out, cfg, [this](std::string_view msg) { Progress(msg); });
    for (const auto& w : r.warnings) Progress("warning: " + w);
    out_ << ReportCsv([&] {
      std::vector<RaPoint> all = r.baseline;
      all.insert(all.end(), r.adaptive.begin(), r.adaptive.end());
      all.push_back(r.oracle);
      all.push_back(r.original);
      return all;
    }());
  }

 private:
  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  Options o;
  CLI::App app{"Adaptive JPEG quality-factor selection toolkit", "qfselect"};
  app.require_subcommand(1, 1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    sub->add_option("--parallel", o.parallel, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  auto add_out = [&](CLI::App* sub, const char* what) {
    sub->add_option("--out", o.out, what);
  };
  auto add_qf_set = [&](CLI::App* sub) {
    sub->add_option("--qf-set", o.qf_set, "comma-separated candidate QFs")
        ->capture_default_str();
  };
  auto add_train_flags = [&](CLI::App* sub) {
    sub->add_option("--form", o.form, "one|two")->capture_default_str();
    sub->add_option("--epochs", o.epochs)->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--batch-size", o.batch_size)->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--lr", o.learning_rate)->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  CLI::App* calibrate = app.add_subcommand("calibrate", "prune the QF set by MS-SSIM hit rate");
  calibrate->add_option("--manifest", o.manifest, "corpus manifest");
  add_qf_set(calibrate);
  calibrate->add_option("--threshold", o.threshold)->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  calibrate->add_option("--floor", o.floor)->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_out(calibrate, "report path (calibration.json)");
  add_common(calibrate);

  CLI::App* build_ranks = app.add_subcommand("build-ranks", "rank ground truth for every variant");
  build_ranks->add_option("--manifest", o.manifest, "corpus manifest");
  build_ranks->add_option("--train-manifest", o.train_manifest,
                          "corpus for fitting the classifier (default --manifest)");
  build_ranks->add_option("--classifier", o.classifier,
                          "classifier JSON; loaded if present, else written");
  add_qf_set(build_ranks);
  add_out(build_ranks, "rank table path (ranks.jsonl)");
  add_common(build_ranks);

  CLI::App* label = app.add_subcommand("label", "per-image feasibility labels");
  label->add_option("--manifest", o.manifest, "corpus manifest");
  label->add_option("--ranks", o.ranks, "rank table JSONL");
  label->add_option("--calibration", o.calibration, "calibration.json (pruned set)");
  add_qf_set(label);
  add_out(label, "labels path (labels.jsonl)");
  add_common(label);

  CLI::App* train = app.add_subcommand("train", "train the per-QF selector heads");
  train->add_option("--manifest", o.manifest, "training manifest");
  train->add_option("--labels", o.labels, "labels JSONL in manifest order");
  train->add_option("--calibration", o.calibration, "calibration.json (pruned set)");
  add_qf_set(train);
  train->add_option("--pr", o.pr, "precision constant(s)")->capture_default_str();
  train->add_option("--dt", o.dt, "decision threshold(s)")->capture_default_str();
  add_train_flags(train);
  add_out(train, "model path (model.json)");
  add_common(train);

  CLI::App* compress = app.add_subcommand("compress", "compress a corpus");
  compress->add_option("--manifest", o.manifest, "corpus manifest");
  compress->add_option("--strategy", o.strategy, "learned|oracle|fixed:<qf>")
      ->capture_default_str();
  compress->add_option("--model", o.model, "model.json (learned)");
  compress->add_option("--ranks", o.ranks, "rank table JSONL (oracle)");
  compress->add_option("--calibration", o.calibration, "calibration.json (pruned set)");
  add_qf_set(compress);
  add_out(compress, "output directory (compressed)");
  add_common(compress);

  CLI::App* evaluate = app.add_subcommand("evaluate", "rate-accuracy report");
  evaluate->add_option("--manifest", o.manifest, "evaluation manifest");
  evaluate->add_option("--ranks", o.ranks, "evaluation rank table JSONL");
  evaluate->add_option("--train-manifest", o.train_manifest, "training manifest");
  evaluate->add_option("--labels", o.labels, "training labels JSONL");
  evaluate->add_option("--model", o.model, "fixed model (sweeps dt only)");
  evaluate->add_option("--calibration", o.calibration, "calibration.json (pruned set)");
  add_qf_set(evaluate);
  evaluate->add_option("--pr-grid", o.pr_grid)->capture_default_str();
  evaluate->add_option("--dt-grid", o.dt_grid)->capture_default_str();
  add_train_flags(evaluate);
  add_out(evaluate, "report directory (report)");
  add_common(evaluate);

  CLI::App* demo = app.add_subcommand("demo", "synthetic end-to-end run");
  demo->add_option("--images", o.images, "images per corpus")->capture_default_str();
  add_qf_set(demo);
  demo->add_option("--threshold", o.threshold)->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  demo->add_option("--floor", o.floor)->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  demo->add_option("--pr-grid", o.pr_grid)->capture_default_str();
  demo->add_option("--dt-grid", o.dt_grid)->capture_default_str();
  demo->add_option("--pr", o.pr, "precision constant for model.json")
      ->capture_default_str();
  demo->add_option("--dt", o.dt, "decision threshold for model.json")
      ->capture_default_str();
  add_train_flags(demo);
  add_out(demo, "output directory (demo_out)");
  add_common(demo);

  std::vector<std::string> argv_storage =
      args.empty() ? std::vector<std::string>{"qfselect"} : args;
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands()[0];
    err << sub->help();
    return 2;
  }

  CLI::App* chosen = app.get_subcommands()[0];
  Runner runner(o, out, err);
  try {
    const std::string name = chosen->get_name();
    if (name == "calibrate") runner.Calibrate();
    else if (name == "build-ranks") runner.BuildRanks();
    else if (name == "label") runner.Label();
    else if (name == "train") runner.TrainModel();
    else if (name == "compress") runner.Compress();
    else if (name == "evaluate") runner.Evaluate();
    else runner.Demo();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << chosen->help();
    return 2;
  } catch (const Error& e) {
    err << "error: code=" << ErrorCodeName(e.code()) << " message=\""
        << Escape(e.what()) << "\"\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: code=Internal message=\"" << Escape(e.what()) << "\"\n";
    return 1;
  }
  return 0;
}

}  // namespace qfs
