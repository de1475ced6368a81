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

// Deterministic synthetic corpus for hermetic end-to-end runs.
//
// Ten classes in two archetypes, all sharing a random smooth background:
//   robust  (0..4)  a strong low-frequency class pattern that survives even
//                   the coarsest quantization;
//   fragile (5..9)  a faint cell-scale square-wave texture that coarse
//                   quantization erases, leaving the image recognizable only
//                   as "some fragile class".

#ifndef QFS_SYNTHETIC_H_
#define QFS_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>

#include "qfs/dataset_io.h"
#include "qfs/image.h"

namespace qfs {

struct SyntheticConfig {
  int num_images = 240;
  int size = 32;
  uint64_t seed = 42;
  double robust_amplitude = 40.0;
  double fragile_amplitude = 2.0;
  double background_amplitude = 24.0;
  double noise_sigma = 0.5;
};

inline constexpr int kSyntheticClasses = 10;
inline constexpr int kRobustClasses = 5;

inline bool IsFragileClass(int label) { return label >= kRobustClasses; }

// Image `index` of the corpus; its label is index % kSyntheticClasses.
RasterImage SyntheticImage(const SyntheticConfig& config, int index);

// Writes <dir>/img_NNNN.png plus <dir>/manifest.csv and returns the loaded
// manifest.
Manifest WriteSyntheticCorpus(const std::filesystem::path& dir,
                              const SyntheticConfig& config);

}  // namespace qfs

#endif  // QFS_SYNTHETIC_H_
