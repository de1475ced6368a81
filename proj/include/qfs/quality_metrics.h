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

#ifndef QFS_QUALITY_METRICS_H_
#define QFS_QUALITY_METRICS_H_

#include <array>
#include <span>

#include "qfs/image.h"

namespace qfs {

// PSNR in dB over all RGB samples with peak 255; +infinity for identical
// images. Throws kShapeMismatch.
double Psnr(const RasterImage& a, const RasterImage& b);

struct MsSsimParams {
  std::array<double, 5> scale_weights = {0.0448, 0.2856, 0.3001, 0.2363,
                                         0.1333};
  int window_size = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;

  // Throws kInvalidArgument unless weights are positive and sum to 1 within
  // 1e-3. Weights are always renormalized over the evaluated scales.
  void Validate() const;
};

// Number of scales evaluated for a w x h image: the largest s <= 5 such that
// the image halved s-1 times is still at least one window wide. Zero when
// the image is smaller than the window.
int MsSsimScaleCount(int width, int height, const MsSsimParams& p = {});

// Multi-scale SSIM on BT.601 luma. Gaussian filtering uses only fully
// covered window positions; each coarser scale is a 2x2 mean pool that
// drops an odd trailing row/column. Contrast-structure terms at scales
// 1..S-1 and the full SSIM at scale S are combined by a weighted geometric
// mean with the first S weights renormalized to sum to 1. Negative terms
// are clamped to 0.
double MsSsim(const RasterImage& a, const RasterImage& b,
              const MsSsimParams& p = {});

// Same on single-channel planes (row-major, width x height).
double MsSsimPlanes(std::span<const double> a, std::span<const double> b,
                    int width, int height, const MsSsimParams& p = {});

}  // namespace qfs

#endif  // QFS_QUALITY_METRICS_H_
