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

#include "qfs/evaluation.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "qfs/jpeg_codec.h"
#include "qfs/parallel.h"
#include "qfs/status.h"

namespace qfs {
namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double ParseDouble(std::string_view s, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    Fail(ErrorCode::kMalformedRow,
         std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

double CompressionRatio(const Manifest& manifest,
                        const std::vector<SelectionResult>& log) {
  std::map<std::string, uint64_t> bytes;
  for (const auto& r : log) {
    if (!bytes.emplace(r.image_id, r.compressed_bytes).second) {
      Fail(ErrorCode::kCoverageMismatch,
           "image " + r.image_id + " appears twice in the selection log");
    }
  }
  if (bytes.size() != manifest.records.size()) {
    Fail(ErrorCode::kCoverageMismatch,
         "selection log covers " + std::to_string(bytes.size()) + " of " +
             std::to_string(manifest.records.size()) + " images");
  }
  uint64_t compressed = 0;
  for (const auto& rec : manifest.records) {
    auto it = bytes.find(rec.image_id);
    if (it == bytes.end()) {
      Fail(ErrorCode::kCoverageMismatch,
           "image " + rec.image_id + " missing from the selection log");
    }
    compressed += it->second;
  }
  if (compressed == 0) {
    Fail(ErrorCode::kCoverageMismatch, "selection log holds zero bytes");
  }
  return static_cast<double>(manifest.TotalOriginalBytes()) /
         static_cast<double>(compressed);
}

double TopKAccuracy(std::span<const int> ranks, int k) {
  if (k < 1) Fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (ranks.empty()) Fail(ErrorCode::kEmptyInput, "no ranks to score");
  const auto hits = std::count_if(ranks.begin(), ranks.end(),
                                  [k](int r) { return r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

std::vector<int> SelectedRanks(const Manifest& manifest,
                               const std::vector<SelectionResult>& log,
                               const RankTable& ranks) {
  std::map<std::string, int> chosen;
  for (const auto& r : log) chosen[r.image_id] = r.chosen_qf;
  std::vector<int> out;
  out.reserve(manifest.records.size());
  for (const auto& rec : manifest.records) {
    auto it = chosen.find(rec.image_id);
    if (it == chosen.end()) {
      Fail(ErrorCode::kCoverageMismatch,
           "image " + rec.image_id + " missing from the selection log");
    }
    out.push_back(ranks.Get(rec.image_id, Variant::Qf(it->second)));
  }
  return out;
}

RaPoint ScoreSelection(const Manifest& manifest,
                       const std::vector<SelectionResult>& log,
                       const RankTable& ranks, std::string strategy) {
  const std::vector<int> r = SelectedRanks(manifest, log, ranks);
  RaPoint p;
  p.cr = CompressionRatio(manifest, log);
  p.top1 = TopKAccuracy(r, 1);
  p.top5 = TopKAccuracy(r, 5);
  p.strategy = std::move(strategy);
  return p;
}

RaPoint OriginalPoint(const Manifest& manifest, const RankTable& ranks) {
  std::vector<int> r;
  for (const auto& rec : manifest.records) {
    r.push_back(ranks.Get(rec.image_id, Variant::Original()));
  }
  RaPoint p;
  p.cr = 1.0;
  p.top1 = TopKAccuracy(r, 1);
  p.top5 = TopKAccuracy(r, 5);
  p.strategy = "original";
  return p;
}

uint64_t CorpusCache::Size(size_t image, int qf) const {
  const int j = qf_set.IndexOf(qf);
  if (j < 0 || image >= sizes.size()) {
    Fail(ErrorCode::kCoverageMismatch,
         "no cached size for qf" + std::to_string(qf));
  }
  return sizes[image][j];
}

CorpusCache BuildCorpusCache(const Manifest& manifest, const QfSet& qf_set,
                             int parallelism) {
  CorpusCache cache;
  cache.qf_set = qf_set;
  const size_t n = manifest.records.size();
  cache.raw_features.resize(n);
  cache.sizes.resize(n);
  ParallelFor(n, parallelism, [&](size_t i) {
    const RasterImage img = LoadImage(manifest.records[i]);
    cache.raw_features[i] = ExtractRawFeatures(img);
    for (int qf : qf_set) {
      cache.sizes[i].push_back(Encode(img, QualityFactor(qf)).bytes.size());
    }
  });
  return cache;
}

std::vector<RaPoint> BaselineCurve(const Manifest& manifest,
                                   const QfSet& qf_set, const RankTable& ranks,
                                   const CorpusCache& cache) {
  std::vector<RaPoint> points;
  for (int qf : qf_set) {
    std::vector<SelectionResult> log;
    for (size_t i = 0; i < manifest.records.size(); ++i) {
      SelectionResult r;
      r.image_id = manifest.records[i].image_id;
      r.chosen_qf = qf;
      r.strategy = Strategy::Fixed(qf);
      r.compressed_bytes = cache.Size(i, qf);
      log.push_back(std::move(r));
    }
    RaPoint p = ScoreSelection(manifest, log, ranks, "fixed:" + std::to_string(qf));
    p.qf = qf;
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<double> SweepGrid::ParseList(std::string_view text) {
  std::vector<double> out;
  for (std::string_view tok : SplitCommas(text)) {
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (tok.empty()) Fail(ErrorCode::kInvalidArgument, "empty grid value");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      Fail(ErrorCode::kInvalidArgument,
           "bad grid value '" + std::string(tok) + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::pair<double, double>> SweepGrid::Pairs(
    std::vector<std::string>* warnings) const {
  if (pr.empty() || dt.empty()) {
    Fail(ErrorCode::kInvalidArgument, "sweep grid is empty");
  }
  for (double v : pr) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      Fail(ErrorCode::kInvalidArgument, "pr values must be positive");
    }
  }
  for (double v : dt) {
    if (!(v > 0.0 && v < 1.0)) {
      Fail(ErrorCode::kInvalidArgument, "dt values must lie in (0, 1)");
    }
  }
  std::vector<std::pair<double, double>> out;
  for (double p : pr) {
    for (double d : dt) {
      const std::pair<double, double> pd{p, d};
      if (std::find(out.begin(), out.end(), pd) != out.end()) {
        if (warnings) {
          warnings->push_back("duplicate grid point pr=" + Num(p) +
                              " dt=" + Num(d) + " dropped");
        }
        continue;
      }
      out.push_back(pd);
    }
  }
  return out;
}

std::vector<SelectionResult> SelectLearned(const Manifest& manifest,
                                           const CorpusCache& cache,
                                           const SelectorModel& model) {
  std::vector<SelectionResult> log;
  log.reserve(manifest.records.size());
  for (size_t i = 0; i < manifest.records.size(); ++i) {
    SelectionResult r;
    r.image_id = manifest.records[i].image_id;
    r.strategy = Strategy::Learned();
    r.feasibility = model.PredictFromRaw(cache.raw_features.at(i));
    const Selection s = SelectQf(r.feasibility, model.qf_set());
    r.chosen_qf = s.qf;
    r.fallback_used = s.fallback;
    r.compressed_bytes = cache.Size(i, s.qf);
    log.push_back(std::move(r));
  }
  return log;
}

std::vector<RaPoint> AdaptiveCurve(const Manifest& eval_manifest,
                                   const CorpusCache& eval_cache,
                                   const RankTable& eval_ranks,
                                   const TrainingData& train,
                                   const QfSet& pruned_set,
                                   const TrainConfig& config,
                                   const SweepGrid& grid,
                                   std::vector<std::string>* warnings) {
  const auto pairs = grid.Pairs(warnings);
  std::vector<RaPoint> points;
  std::map<double, SelectorModel> models;
  for (const auto& [pr, dt] : pairs) {
    auto it = models.find(pr);
    if (it == models.end()) {
      TrainConfig c = config;
      c.pr = {pr};
      c.dt = {dt};
      it = models.emplace(pr, Train(train.raw_features, train.labels,
                                    pruned_set, c)).first;
    }
    SelectorModel& model = it->second;
    model.SetDecisionThreshold(dt);
    RaPoint p = ScoreSelection(eval_manifest,
                               SelectLearned(eval_manifest, eval_cache, model),
                               eval_ranks, "learned");
    p.pr = pr;
    p.dt = dt;
    points.push_back(std::move(p));
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const RaPoint& a, const RaPoint& b) { return a.cr < b.cr; });
  return points;
}

std::string ReportCsv(const std::vector<RaPoint>& points) {
  std::string out = "cr,top1,top5,strategy,pr,dt,qf\n";
  for (const auto& p : points) {
    out += Num(p.cr) + "," + Num(p.top1) + "," + Num(p.top5) + "," +
           p.strategy + "," + (p.pr != 0.0 ? Num(p.pr) : "") + "," +
           (p.dt != 0.0 ? Num(p.dt) : "") + "," +
           (p.qf != 0 ? std::to_string(p.qf) : "") + "\n";
  }
  return out;
}

std::vector<RaPoint> ParseReportCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "cr,top1,top5,strategy,pr,dt,qf") {
    Fail(ErrorCode::kMalformedRow, "missing report header");
  }
  std::vector<RaPoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = SplitCommas(line);
    if (f.size() != 7) Fail(ErrorCode::kMalformedRow, "report row needs 7 fields");
    RaPoint p;
    p.cr = ParseDouble(f[0], "cr");
    p.top1 = ParseDouble(f[1], "top1");
    p.top5 = ParseDouble(f[2], "top5");
    p.strategy = std::string(f[3]);
    if (!f[4].empty()) p.pr = ParseDouble(f[4], "pr");
    if (!f[5].empty()) p.dt = ParseDouble(f[5], "dt");
    if (!f[6].empty()) p.qf = static_cast<int>(ParseDouble(f[6], "qf"));
    out.push_back(std::move(p));
  }
  return out;
}

std::string ReportSvg(const std::vector<RaPoint>& baseline,
                      const std::vector<RaPoint>& adaptive) {
  constexpr double kW = 720, kH = 440, kLeft = 70, kRight = 170, kTop = 30,
                   kBottom = 60;
  std::vector<const RaPoint*> all;
  for (const auto& p : baseline) all.push_back(&p);
  for (const auto& p : adaptive) all.push_back(&p);
  if (all.empty()) Fail(ErrorCode::kNoData, "no points to plot");

  double x0 = all[0]->cr, x1 = x0, y0 = all[0]->top1, y1 = all[0]->top5;
  for (const RaPoint* p : all) {
    x0 = std::min(x0, p->cr);
    x1 = std::max(x1, p->cr);
    y0 = std::min({y0, p->top1, p->top5});
    y1 = std::max({y1, p->top1, p->top5});
  }
  const double xpad = std::max((x1 - x0) * 0.05, 1e-3);
  const double ypad = std::max((y1 - y0) * 0.05, 1e-3);
  x0 -= xpad;
  x1 += xpad;
  y0 = std::max(0.0, y0 - ypad);
  y1 = std::min(1.0, y1 + ypad);
  if (y1 <= y0) y1 = y0 + 1e-3;

  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto sx = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v) { return kTop + (1.0 - (v - y0) / (y1 - y0)) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Fixed2(kW) +
       "\" height=\"" + Fixed2(kH) + "\" font-family=\"sans-serif\" "
       "font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<rect x=\"" + Fixed2(kLeft) + "\" y=\"" + Fixed2(kTop) + "\" width=\"" +
       Fixed2(pw) + "\" height=\"" + Fixed2(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double yv = y0 + (y1 - y0) * t / 4.0;
    s += "<text x=\"" + Fixed2(sx(xv)) + "\" y=\"" + Fixed2(kH - kBottom + 18) +
         "\" text-anchor=\"middle\">" + Fixed2(xv) + "</text>\n";
    s += "<text x=\"" + Fixed2(kLeft - 6) + "\" y=\"" + Fixed2(sy(yv) + 4) +
         "\" text-anchor=\"end\">" + Fixed2(yv) + "</text>\n";
  }
  s += "<text x=\"" + Fixed2(kLeft + pw / 2) + "\" y=\"" + Fixed2(kH - 15) +
       "\" text-anchor=\"middle\">compression ratio</text>\n";
  s += "<text transform=\"translate(18," + Fixed2(kTop + ph / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">accuracy</text>\n";

  struct Series {
    const std::vector<RaPoint>* points;
    bool top5;
    const char* color;
    const char* dash;
    const char* label;
  };
  std::vector<RaPoint> learned;
  std::vector<RaPoint> markers;
  for (const auto& p : adaptive) {
    (p.strategy == "learned" ? learned : markers).push_back(p);
  }
  const Series series[] = {
      {&baseline, false, "#1f4e9c", "6,4", "fixed QF top-1"},
      {&baseline, true, "#7f9fd6", "6,4", "fixed QF top-5"},
      {&learned, false, "#b03a2e", "", "adaptive top-1"},
      {&learned, true, "#e59866", "", "adaptive top-5"},
  };
  int legend = 0;
  for (const Series& ser : series) {
    if (ser.points->empty()) continue;
    std::vector<const RaPoint*> pts;
    for (const auto& p : *ser.points) pts.push_back(&p);
    std::stable_sort(pts.begin(), pts.end(),
                     [](const RaPoint* a, const RaPoint* b) { return a->cr < b->cr; });
    std::string path;
    for (const RaPoint* p : pts) {
      const double v = ser.top5 ? p->top5 : p->top1;
      path += (path.empty() ? "" : " ") + Fixed2(sx(p->cr)) + "," + Fixed2(sy(v));
    }
    s += std::string("<polyline fill=\"none\" stroke=\"") + ser.color +
         "\" stroke-width=\"1.5\"" +
         (*ser.dash ? std::string(" stroke-dasharray=\"") + ser.dash + "\"" : "") +
         " points=\"" + path + "\"/>\n";
    for (const RaPoint* p : pts) {
      const double v = ser.top5 ? p->top5 : p->top1;
      s += "<circle cx=\"" + Fixed2(sx(p->cr)) + "\" cy=\"" + Fixed2(sy(v)) +
           "\" r=\"2.5\" fill=\"" + ser.color + "\"/>\n";
    }
    const double ly = kTop + 10 + 20 * legend++;
    const double lx = kW - kRight + 12;
    s += std::string("<line x1=\"") + Fixed2(lx) + "\" y1=\"" + Fixed2(ly) +
         "\" x2=\"" + Fixed2(lx + 24) + "\" y2=\"" + Fixed2(ly) + "\" stroke=\"" +
         ser.color + "\" stroke-width=\"1.5\"" +
         (*ser.dash ? std::string(" stroke-dasharray=\"") + ser.dash + "\"" : "") +
         "/>\n";
    s += "<text x=\"" + Fixed2(lx + 30) + "\" y=\"" + Fixed2(ly + 4) + "\">" +
         ser.label + "</text>\n";
  }
  for (const auto& p : markers) {
    const double cx = sx(p.cr);
    const double cy = sy(p.top1);
    s += "<rect x=\"" + Fixed2(cx - 4) + "\" y=\"" + Fixed2(cy - 4) +
         "\" width=\"8\" height=\"8\" fill=\"black\" transform=\"rotate(45 " +
         Fixed2(cx) + " " + Fixed2(cy) + ")\"/>\n";
    s += "<text x=\"" + Fixed2(cx + 8) + "\" y=\"" + Fixed2(cy - 6) + "\">" +
         p.strategy + " top-1</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void EmitReport(const std::vector<RaPoint>& baseline,
                const std::vector<RaPoint>& adaptive,
                const std::filesystem::path& csv_path,
                const std::filesystem::path& svg_path) {
  if (baseline.empty() && adaptive.empty()) {
    Fail(ErrorCode::kNoData, "no rate-accuracy points to report");
  }
  std::vector<RaPoint> all = baseline;
  all.insert(all.end(), adaptive.begin(), adaptive.end());
  WriteFileAtomic(csv_path, ReportCsv(all));
  WriteFileAtomic(svg_path, ReportSvg(baseline, adaptive));
}

}  // namespace qfs
