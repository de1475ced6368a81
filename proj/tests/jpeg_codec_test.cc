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

#include "qfs/jpeg_codec.h"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>

#include "qfs/quality_metrics.h"
#include "reference_jpeg.h"
#include "test_images.h"
#include "test_util.h"

namespace qfs {
namespace {

using testing::ConstantImage;
using testing::NaturalImage;
using testing::NoiseImage;
using testing::ReferenceDecode;
using testing::ReferenceEncode;

int MaxDeviation(const RasterImage& a, const RasterImage& b) {
  int worst = 0;
  for (size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(int(a.data()[i]) - int(b.data()[i])));
  }
  return worst;
}

TEST(QualityToTablesTest, Qf50IsBaseTables) {
  const QuantTables t = QualityToTables(QualityFactor(50));
  EXPECT_EQ(t.luma, kAnnexKLuma);
  EXPECT_EQ(t.chroma, kAnnexKChroma);
}

TEST(QualityToTablesTest, Qf100IsAllOnes) {
  const QuantTables t = QualityToTables(QualityFactor(100));
  for (int i = 0; i < 64; ++i) {
    EXPECT_EQ(t.luma[i], 1);
    EXPECT_EQ(t.chroma[i], 1);
  }
}

TEST(QualityToTablesTest, Qf10DcEntry) {
  // scale 500: floor((16 * 500 + 50) / 100) = 80.
  EXPECT_EQ(QualityToTables(QualityFactor(10)).luma[0], 80);
}

TEST(QualityToTablesTest, MatchesScalingRuleEverywhere) {
  for (int q = 1; q <= 100; ++q) {
    const int scale = q < 50 ? 5000 / q : 200 - 2 * q;
    const QuantTables t = QualityToTables(QualityFactor(q));
    for (int i = 0; i < 64; ++i) {
      const long l = std::clamp((kAnnexKLuma[i] * scale + 50L) / 100, 1L, 255L);
      const long c = std::clamp((kAnnexKChroma[i] * scale + 50L) / 100, 1L, 255L);
      ASSERT_EQ(t.luma[i], l) << "q=" << q << " i=" << i;
      ASSERT_EQ(t.chroma[i], c) << "q=" << q << " i=" << i;
    }
  }
}

TEST(QualityFactorTest, RejectsOutOfRange) {
  EXPECT_QFS_ERROR(QualityFactor(0), ErrorCode::kInvalidArgument);
  EXPECT_QFS_ERROR(QualityFactor(101), ErrorCode::kInvalidArgument);
}

TEST(EncodeTest, JfifFraming) {
  const JpegBytes j = Encode(NaturalImage(16, 16, 1), QualityFactor(75));
  ASSERT_GE(j.bytes.size(), 4u);
  EXPECT_EQ(j.bytes[0], 0xFF);
  EXPECT_EQ(j.bytes[1], 0xD8);
  EXPECT_EQ(j.bytes[j.bytes.size() - 2], 0xFF);
  EXPECT_EQ(j.bytes.back(), 0xD9);
  EXPECT_EQ(j.qf_used.value(), 75);
}

TEST(EncodeTest, MidGrayQf90) {
  const RasterImage img = ConstantImage(16, 16, 128);
  const JpegBytes j = Encode(img, QualityFactor(90));
  RasterImage ref;
  ASSERT_TRUE(ReferenceDecode(j.bytes, &ref));
  EXPECT_GE(Psnr(img, ref), 40.0);
  EXPECT_GE(Psnr(img, Decode(j.bytes)), 40.0);
}

TEST(EncodeTest, OnePixel) {
  RasterImage img(1, 1);
  img.at(0, 0, 0) = 200;
  img.at(1, 0, 0) = 40;
  img.at(2, 0, 0) = 90;
  const RasterImage out = RoundTrip(img, QualityFactor(50));
  ASSERT_EQ(out.width(), 1);
  ASSERT_EQ(out.height(), 1);
  // Chroma at QF 50 quantizes DC in steps of 17/8 levels per channel pair;
  // a few levels of error is the expected quantization error.
  EXPECT_LE(MaxDeviation(img, out), 6);
}

TEST(EncodeTest, LowQfIsSmaller) {
  const RasterImage img = NaturalImage(64, 64, 5);
  EXPECT_LT(Encode(img, QualityFactor(10)).bytes.size(),
            Encode(img, QualityFactor(90)).bytes.size());
}

TEST(EncodeTest, MeanSizeMonotoneInQf) {
  double previous = 0.0;
  for (int q = 10; q <= 90; q += 10) {
    double total = 0.0;
    for (int i = 0; i < 20; ++i) {
      total += Encode(NaturalImage(48, 40, 100 + i), QualityFactor(q)).bytes.size();
    }
    EXPECT_GE(total / 20, previous) << "q=" << q;
    previous = total / 20;
  }
}

TEST(DecodeTest, ConstantImageExact) {
  const RasterImage img = ConstantImage(24, 16, 128);
  EXPECT_EQ(RoundTrip(img, QualityFactor(50)), img);
}

// Gray noise: with 4:2:0 chroma, independent per-channel noise cannot be
// kept (about 13 dB under either codec), so the bound is checked on noise
// the chroma planes carry exactly.
TEST(DecodeTest, NoiseAtQf100) {
  RasterImage img = NoiseImage(32, 32, 11);
  for (int c = 1; c < 3; ++c) {
    std::copy(img.plane(0).begin(), img.plane(0).end(), img.plane(c).begin());
  }
  EXPECT_GE(Psnr(img, RoundTrip(img, QualityFactor(100))), 38.0);
  RasterImage ref;
  ASSERT_TRUE(ReferenceDecode(ReferenceEncode(img, 100), &ref));
  EXPECT_GE(Psnr(img, ref), 38.0);
}

TEST(DecodeTest, ColorNoiseTracksReference) {
  const RasterImage img = NoiseImage(32, 32, 12);
  RasterImage ref;
  ASSERT_TRUE(ReferenceDecode(ReferenceEncode(img, 100), &ref));
  EXPECT_NEAR(Psnr(img, RoundTrip(img, QualityFactor(100))), Psnr(img, ref), 0.1);
}

TEST(DecodeTest, MissingSoi) {
  std::vector<uint8_t> bytes = Encode(NaturalImage(8, 8, 2), QualityFactor(50)).bytes;
  bytes[1] = 0x00;
  EXPECT_QFS_ERROR(Decode(bytes), ErrorCode::kMalformedStream);
  EXPECT_QFS_ERROR(Decode(std::span<const uint8_t>()), ErrorCode::kMalformedStream);
}

TEST(DecodeTest, TruncatedStream) {
  std::vector<uint8_t> bytes = Encode(NaturalImage(32, 32, 2), QualityFactor(50)).bytes;
  bytes.resize(bytes.size() / 3);
  EXPECT_THROW(Decode(bytes), Error);
}

TEST(InteropTest, OurStreamsUnderReferenceDecoder) {
  const auto start = std::chrono::steady_clock::now();
  const int sizes[][2] = {{32, 32}, {17, 9}, {40, 24}, {8, 8}, {33, 47}};
  for (int i = 0; i < 20; ++i) {
    const RasterImage img = NaturalImage(sizes[i % 5][0], sizes[i % 5][1], 200 + i);
    for (int q = 10; q <= 90; q += 10) {
      const JpegBytes j = Encode(img, QualityFactor(q));
      RasterImage ref;
      ASSERT_TRUE(ReferenceDecode(j.bytes, &ref)) << "i=" << i << " q=" << q;
      EXPECT_LE(MaxDeviation(ref, Decode(j.bytes)), 1) << "i=" << i << " q=" << q;
    }
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count(),
            30.0);
}

TEST(InteropTest, ReferenceStreamsUnderOurDecoder) {
  for (int i = 0; i < 10; ++i) {
    const RasterImage img = NaturalImage(31 + i, 20 + 2 * i, 300 + i);
    for (int q : {10, 50, 95}) {
      const std::vector<uint8_t> bytes = ReferenceEncode(img, q);
      RasterImage ref;
      ASSERT_TRUE(ReferenceDecode(bytes, &ref));
      EXPECT_LE(MaxDeviation(ref, Decode(bytes)), 1) << "i=" << i << " q=" << q;
    }
  }
}

TEST(InteropTest, NoiseAndEdgeSizes) {
  for (int w : {1, 2, 7, 15, 16, 17}) {
    const RasterImage img = NoiseImage(w, 23 - w, 400 + w);
    for (int q : {1, 25, 100}) {
      const JpegBytes j = Encode(img, QualityFactor(q));
      RasterImage ref;
      ASSERT_TRUE(ReferenceDecode(j.bytes, &ref));
      EXPECT_LE(MaxDeviation(ref, Decode(j.bytes)), 1) << "w=" << w << " q=" << q;
    }
  }
}

}  // namespace
}  // namespace qfs
