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

#include "qfs/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "qfs/random.h"
#include "qfs/status.h"

namespace qfs {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Low-frequency pattern of robust class c, in [-1, 1].
double RobustPattern(int c, double u, double v) {
  switch (c) {
    case 0:
      return std::cos(kTwoPi * u) * std::cos(kTwoPi * v);
    case 1:
      return std::sin(kTwoPi * u) * std::sin(kTwoPi * v);
    case 2:
      return std::cos(kTwoPi * u) * std::sin(kTwoPi * v);
    case 3:
      return std::sin(kTwoPi * u) * std::cos(kTwoPi * v);
    default: {
      const double du = u - 0.5;
      const double dv = v - 0.5;
      return 2.0 * std::exp(-(du * du + dv * dv) / 0.04) - 1.0;
    }
  }
}

// +-1 square wave alternating every classifier cell (1/16 of the image).
int Square(double t) {
  return static_cast<int>(std::floor(t * 16.0)) % 2 == 0 ? 1 : -1;
}

// Sign flip between the two halves of the image.
int Half(double t) { return t < 0.5 ? 1 : -1; }

// Cell-scale checkerboard of fragile class k in 0..4. Every class has the
// same magnitude everywhere; classes differ in which image halves carry an
// inverted checker.
double FragilePattern(int k, double u, double v) {
  const int checker = Square(u) * Square(v);
  switch (k) {
    case 0:
      return checker;
    case 1:
      return -checker;
    case 2:
      return checker * Half(u);
    case 3:
      return checker * Half(v);
    default:
      return checker * Half(u) * Half(v);
  }
}

}  // namespace

RasterImage SyntheticImage(const SyntheticConfig& config, int index) {
  if (config.size < 16) Fail(ErrorCode::kInvalidArgument, "size must be >= 16");
  const int label = index % kSyntheticClasses;
  Rng rng = Rng::Stream(config.seed, static_cast<uint64_t>(index));
  const int n = config.size;

  const double base = 128.0 + rng.Uniform(-25.0, 25.0);
  const double ax = config.background_amplitude * rng.Uniform(0.4, 1.0);
  const double ay = config.background_amplitude * rng.Uniform(0.4, 1.0);
  const double px = rng.Uniform(0.0, kTwoPi);
  const double py = rng.Uniform(0.0, kTwoPi);
  const double gain = rng.Uniform(0.8, 1.2);
  const double tint_r = rng.Uniform(-6.0, 6.0);
  const double tint_b = rng.Uniform(-6.0, 6.0);

  RasterImage img(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      // Pixel-center coordinates in [0, 1).
      const double u = (x + 0.5) / n;
      const double v = (y + 0.5) / n;
      double value = base + ax * std::cos(kTwoPi * u + px) +
                     ay * std::cos(kTwoPi * v + py);
      if (IsFragileClass(label)) {
        value += config.fragile_amplitude *
                 FragilePattern(label - kRobustClasses, u, v);
      } else {
        value += gain * config.robust_amplitude * RobustPattern(label, u, v);
      }
      value += config.noise_sigma * rng.Normal();
      auto to8 = [](double t) {
        return static_cast<uint8_t>(std::clamp(std::lround(t), 0L, 255L));
      };
      img.at(0, x, y) = to8(value + tint_r);
      img.at(1, x, y) = to8(value);
      img.at(2, x, y) = to8(value + tint_b);
    }
  }
  return img;
}

Manifest WriteSyntheticCorpus(const std::filesystem::path& dir,
                              const SyntheticConfig& config) {
  if (config.num_images < 1) {
    Fail(ErrorCode::kInvalidArgument, "corpus needs at least one image");
  }
  Manifest m;
  m.num_classes = kSyntheticClasses;
  for (int i = 0; i < config.num_images; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%04d", i);
    ImageRecord rec;
    rec.image_id = name;
    rec.path = dir / (std::string(name) + ".png");
    rec.gt_label = i % kSyntheticClasses;
    WriteFileAtomic(rec.path, EncodePng(SyntheticImage(config, i)));
    m.records.push_back(std::move(rec));
  }
  WriteManifest(m, dir / "manifest.csv");
  return LoadManifest(dir / "manifest.csv");
}

}  // namespace qfs
