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

// Baseline sequential JPEG (JFIF) encoder and decoder.
//
// The encoder always writes three components (Y, Cb, Cr) with 4:2:0 chroma
// subsampling, the Annex K Huffman tables and IJG-style quality scaling of
// the Annex K quantization tables. Partial MCUs are padded by edge
// replication. No restart markers are written.
//
// The decoder accepts any baseline Huffman stream with one or three
// components, sampling factors of 1 or 2 and optional restart intervals.
// Its inverse DCT, chroma upsampling and color conversion use the same
// fixed-point arithmetic as the IJG "islow" decoder so that outputs agree
// with mainstream decoders.

#ifndef QFS_JPEG_CODEC_H_
#define QFS_JPEG_CODEC_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qfs/image.h"

namespace qfs {

class QualityFactor {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 100;

  // Throws kInvalidArgument outside [1, 100].
  explicit QualityFactor(int value);

  int value() const { return value_; }
  auto operator<=>(const QualityFactor&) const = default;

 private:
  int value_;
};

// 8x8 tables in natural (row-major) order.
struct QuantTables {
  std::array<uint16_t, 64> luma;
  std::array<uint16_t, 64> chroma;
};

// Annex K.1 tables, natural order.
extern const std::array<uint16_t, 64> kAnnexKLuma;
extern const std::array<uint16_t, 64> kAnnexKChroma;

// IJG quality scaling: scale = 5000/qf below 50, 200 - 2*qf otherwise; each
// entry becomes clamp((base*scale + 50) / 100, 1, 255).
QuantTables QualityToTables(QualityFactor qf);

struct JpegBytes {
  std::vector<uint8_t> bytes;
  QualityFactor qf_used{50};
};

// Throws kDimensionTooLarge above 65535 and kInvalidArgument for empty input.
JpegBytes Encode(const RasterImage& img, QualityFactor qf);

// Returns an RGB image; single-component streams are replicated to three
// channels. Throws kMalformedStream for structural errors and
// kUnsupportedFeature for progressive, arithmetic or 12-bit streams.
RasterImage Decode(std::span<const uint8_t> bytes);

// decode(encode(img, qf)); the pixels a classifier or metric sees after
// compression.
RasterImage RoundTrip(const RasterImage& img, QualityFactor qf,
                      size_t* encoded_size = nullptr);

}  // namespace qfs

#endif  // QFS_JPEG_CODEC_H_
