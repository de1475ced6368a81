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

#include "qfs/quality_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qfs/status.h"

namespace qfs {
namespace {

void CheckSameShape(const RasterImage& a, const RasterImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    Fail(ErrorCode::kShapeMismatch,
         "ShapeMismatch: " + std::to_string(a.width()) + "x" +
             std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
             "x" + std::to_string(b.height()));
  }
}

std::vector<double> GaussianWindow1D(int size, double sigma) {
  std::vector<double> g(static_cast<size_t>(size));
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - (size - 1) / 2.0;
    g[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable correlation keeping only positions where the window fits.
std::vector<double> FilterValid(const std::vector<double>& src, int w, int h,
                                const std::vector<double>& g) {
  const int k = static_cast<int>(g.size());
  const int ow = w - k + 1;
  const int oh = h - k + 1;
  std::vector<double> tmp(static_cast<size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    const double* row = src.data() + static_cast<size_t>(y) * w;
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += g[i] * row[x + i];
      tmp[static_cast<size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += g[i] * tmp[static_cast<size_t>(y + i) * ow + x];
      out[static_cast<size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

struct ScaleStats {
  double cs = 0.0;    // mean contrast-structure
  double ssim = 0.0;  // mean luminance * contrast-structure
};

ScaleStats SsimAtScale(const std::vector<double>& a,
                       const std::vector<double>& b, int w, int h,
                       const std::vector<double>& g, const MsSsimParams& p) {
  const size_t n = a.size();
  std::vector<double> aa(n), bb(n), ab(n);
  for (size_t i = 0; i < n; ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = FilterValid(a, w, h, g);
  const auto mu_b = FilterValid(b, w, h, g);
  const auto e_aa = FilterValid(aa, w, h, g);
  const auto e_bb = FilterValid(bb, w, h, g);
  const auto e_ab = FilterValid(ab, w, h, g);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  double cs_sum = 0.0;
  double ssim_sum = 0.0;
  for (size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double var_a = e_aa[i] - ma * ma;
    const double var_b = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    const double lum = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
    const double cs = (2.0 * cov + c2) / (var_a + var_b + c2);
    cs_sum += cs;
    ssim_sum += lum * cs;
  }
  const double count = static_cast<double>(mu_a.size());
  return {cs_sum / count, ssim_sum / count};
}

std::vector<double> MeanPool2x2(const std::vector<double>& src, int w, int h) {
  const int ow = w / 2;
  const int oh = h / 2;
  std::vector<double> out(static_cast<size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      const size_t i = static_cast<size_t>(2 * y) * w + 2 * x;
      out[static_cast<size_t>(y) * ow + x] =
          (src[i] + src[i + 1] + src[i + w] + src[i + w + 1]) / 4.0;
    }
  }
  return out;
}

}  // namespace

double Psnr(const RasterImage& a, const RasterImage& b) {
  CheckSameShape(a, b);
  auto da = a.data();
  auto db = b.data();
  uint64_t sse = 0;
  for (size_t i = 0; i < da.size(); ++i) {
    const int d = static_cast<int>(da[i]) - static_cast<int>(db[i]);
    sse += static_cast<uint64_t>(d * d);
  }
  if (sse == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(sse) / static_cast<double>(da.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

void MsSsimParams::Validate() const {
  double sum = 0.0;
  for (double w : scale_weights) {
    if (!(w > 0.0)) Fail(ErrorCode::kInvalidArgument, "MS-SSIM weights must be positive");
    sum += w;
  }
  // The customary weights sum to 1.0001; they are renormalized before use.
  if (std::abs(sum - 1.0) > 1e-3) {
    Fail(ErrorCode::kInvalidArgument, "MS-SSIM weights must sum to 1");
  }
  if (window_size < 1 || !(sigma > 0.0) || !(dynamic_range > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "invalid MS-SSIM window parameters");
  }
}

int MsSsimScaleCount(int width, int height, const MsSsimParams& p) {
  int w = width;
  int h = height;
  int scales = 0;
  while (scales < static_cast<int>(p.scale_weights.size()) &&
         w >= p.window_size && h >= p.window_size) {
    ++scales;
    w /= 2;
    h /= 2;
  }
  return scales;
}

double MsSsimPlanes(std::span<const double> a, std::span<const double> b,
                    int width, int height, const MsSsimParams& p) {
  p.Validate();
  const size_t n = static_cast<size_t>(width) * height;
  if (a.size() != n || b.size() != n) {
    Fail(ErrorCode::kShapeMismatch, "ShapeMismatch: plane sizes differ");
  }
  const int scales = MsSsimScaleCount(width, height, p);
  if (scales == 0) {
    Fail(ErrorCode::kImageTooSmall,
         "image smaller than the " + std::to_string(p.window_size) + "x" +
             std::to_string(p.window_size) + " MS-SSIM window");
  }
  double weight_sum = 0.0;
  for (int s = 0; s < scales; ++s) weight_sum += p.scale_weights[s];

  const auto g = GaussianWindow1D(p.window_size, p.sigma);
  std::vector<double> cur_a(a.begin(), a.end());
  std::vector<double> cur_b(b.begin(), b.end());
  int w = width;
  int h = height;
  double result = 1.0;
  for (int s = 0; s < scales; ++s) {
    const ScaleStats st = SsimAtScale(cur_a, cur_b, w, h, g, p);
    const double weight = p.scale_weights[s] / weight_sum;
    const double term = s + 1 == scales ? st.ssim : st.cs;
    result *= std::pow(std::max(term, 0.0), weight);
    if (s + 1 < scales) {
      cur_a = MeanPool2x2(cur_a, w, h);
      cur_b = MeanPool2x2(cur_b, w, h);
      w /= 2;
      h /= 2;
    }
  }
  return result;
}

double MsSsim(const RasterImage& a, const RasterImage& b,
              const MsSsimParams& p) {
  CheckSameShape(a, b);
  const auto la = LumaPlane(a);
  const auto lb = LumaPlane(b);
  return MsSsimPlanes(la, lb, a.width(), a.height(), p);
}

}  // namespace qfs
