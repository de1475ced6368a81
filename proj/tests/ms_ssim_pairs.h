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

// The ten 256x256 original/distorted pairs scored by the MS-SSIM oracle in
// tests/oracles/ms_ssim_oracle.py.

#ifndef QFS_TESTS_MS_SSIM_PAIRS_H_
#define QFS_TESTS_MS_SSIM_PAIRS_H_

#include <algorithm>
#include <utility>

#include "qfs/image.h"
#include "qfs/jpeg_codec.h"
#include "test_images.h"

namespace qfs::testing {

constexpr int kMsSsimPairCount = 10;
constexpr int kMsSsimPairSize = 256;

// tf.image.ssim_multiscale on the BT.601 luma of each pair (float64, default
// window and constants, weights renormalized); produced by
// tests/oracles/ms_ssim_oracle.py from the dump_ms_ssim_pairs output.
constexpr double kOracleMsSsim[kMsSsimPairCount] = {
    0.9089142084, 0.9636070132, 0.9770604372, 0.9825055003, 0.9864910245,
    0.9848515987, 0.9882256389, 0.9925875068, 0.9392713308, 0.9912090898,
};

// Pairs 0-7: natural image vs its JPEG at QF 10, 20, ..., 80.
// Pair 8: natural image vs additive uniform noise (+-20).
// Pair 9: natural image vs a 3x3 box blur.
inline std::pair<RasterImage, RasterImage> MsSsimPair(int index) {
  const int n = kMsSsimPairSize;
  RasterImage a = NaturalImage(n, n, 1000 + index);
  RasterImage b = a;
  if (index < 8) {
    b = RoundTrip(a, QualityFactor(10 * (index + 1)));
  } else if (index == 8) {
    Lcg rng(77);
    for (int c = 0; c < 3; ++c) {
      auto pa = a.plane(c);
      auto pb = b.plane(c);
      for (size_t i = 0; i < pa.size(); ++i) {
        pb[i] = Clamp8(pa[i] + (rng.Uniform() - 0.5) * 40.0);
      }
    }
  } else {
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          int sum = 0;
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const int xx = std::clamp(x + dx, 0, n - 1);
              const int yy = std::clamp(y + dy, 0, n - 1);
              sum += a.at(c, xx, yy);
            }
          }
          b.at(c, x, y) = Clamp8(sum / 9.0);
        }
      }
    }
  }
  return {std::move(a), std::move(b)};
}

}  // namespace qfs::testing

#endif  // QFS_TESTS_MS_SSIM_PAIRS_H_
