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

#include "qfs/dataset_io.h"

#include <gtest/gtest.h>

#include <fstream>

#include "qfs/image.h"
#include "test_images.h"
#include "test_util.h"

namespace qfs {
namespace {

using testing::TempDir;

void WriteText(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

TEST(ManifestTest, TwoRowsInFileOrder) {
  TempDir dir;
  WriteFileAtomic(dir / "b.png", EncodePng(RasterImage(4, 4, 10)));
  WriteFileAtomic(dir / "a.png", EncodePng(RasterImage(4, 4, 20)));
  WriteText(dir / "m.csv",
            "# num_classes=3\nimage_id,path,gt_label\nb,b.png,2\na,a.png,0\n");
  const Manifest m = LoadManifest(dir / "m.csv");
  EXPECT_EQ(m.num_classes, 3);
  ASSERT_EQ(m.records.size(), 2u);
  EXPECT_EQ(m.records[0].image_id, "b");
  EXPECT_EQ(m.records[1].image_id, "a");
  EXPECT_EQ(m.records[0].gt_label, 2);
  EXPECT_EQ(m.records[0].original_bytes,
            std::filesystem::file_size(dir / "b.png"));
  EXPECT_EQ(LoadImage(m.records[1]), RasterImage(4, 4, 20));
}

TEST(ManifestTest, DuplicateId) {
  TempDir dir;
  WriteFileAtomic(dir / "a.png", EncodePng(RasterImage(4, 4, 1)));
  WriteText(dir / "m.csv",
            "# num_classes=2\nimage_id,path,gt_label\na,a.png,0\na,a.png,1\n");
  try {
    LoadManifest(dir / "m.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateId);
    EXPECT_NE(std::string(e.what()).find("DuplicateId(\"a\")"), std::string::npos);
  }
}

TEST(ManifestTest, LabelOutOfRange) {
  TempDir dir;
  WriteFileAtomic(dir / "a.png", EncodePng(RasterImage(4, 4, 1)));
  WriteText(dir / "m.csv", "# num_classes=10\nimage_id,path,gt_label\na,a.png,10\n");
  EXPECT_QFS_ERROR(LoadManifest(dir / "m.csv"), ErrorCode::kLabelOutOfRange);
}

TEST(ManifestTest, MissingFiles) {
  TempDir dir;
  EXPECT_QFS_ERROR(LoadManifest(dir / "none.csv"), ErrorCode::kMissingFile);
  WriteText(dir / "m.csv", "# num_classes=2\nimage_id,path,gt_label\na,gone.png,0\n");
  EXPECT_QFS_ERROR(LoadManifest(dir / "m.csv"), ErrorCode::kMissingFile);
}

TEST(ManifestTest, WriteRoundTrip) {
  TempDir dir;
  WriteFileAtomic(dir / "x.png", EncodePng(RasterImage(4, 4, 1)));
  Manifest m;
  m.num_classes = 4;
  m.records.push_back({"x", dir / "x.png", 3, 0});
  WriteManifest(m, dir / "m.csv");
  const Manifest back = LoadManifest(dir / "m.csv");
  ASSERT_EQ(back.records.size(), 1u);
  EXPECT_EQ(back.num_classes, 4);
  EXPECT_EQ(back.records[0].gt_label, 3);
  EXPECT_EQ(back.TotalOriginalBytes(), std::filesystem::file_size(dir / "x.png"));
}

TEST(ImageDecodeTest, PpmGray128) {
  const std::string ppm = "P6\n4 4\n255\n" + std::string(48, char(128));
  const RasterImage img = DecodeImageBytes(
      std::span(reinterpret_cast<const uint8_t*>(ppm.data()), ppm.size()));
  EXPECT_EQ(img, RasterImage(4, 4, 128));
}

TEST(ImageDecodeTest, GrayscalePngReplicates) {
  // 1x1 8-bit grayscale PNG with value 7, built by hand.
  const std::vector<uint8_t> png = {
      0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A, 0x00, 0x00, 0x00, 0x0D,
      0x49, 0x48, 0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01,
      0x08, 0x00, 0x00, 0x00, 0x00, 0x3A, 0x7E, 0x9B, 0x55, 0x00, 0x00, 0x00,
      0x0A, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9C, 0x63, 0x60, 0x07, 0x00, 0x00,
      0x09, 0x00, 0x08, 0x20, 0x23, 0xC3, 0x8C, 0x00, 0x00, 0x00, 0x00, 0x49,
      0x45, 0x4E, 0x44, 0xAE, 0x42, 0x60, 0x82};
  const RasterImage img = DecodeImageBytes(png);
  EXPECT_EQ(img, RasterImage(1, 1, 7));
}

TEST(ImageDecodeTest, TruncatedPng) {
  std::vector<uint8_t> png = EncodePng(testing::NaturalImage(16, 16, 3));
  png.resize(png.size() / 2);
  EXPECT_QFS_ERROR(DecodeImageBytes(png), ErrorCode::kDecodeFailed);
}

TEST(ImageDecodeTest, PngAndPpmRoundTrip) {
  const RasterImage img = testing::NaturalImage(13, 7, 9);
  EXPECT_EQ(DecodeImageBytes(EncodePng(img)), img);
  EXPECT_EQ(DecodeImageBytes(EncodePpm(img)), img);
}

TEST(ImageDecodeTest, UnknownFormat) {
  const std::vector<uint8_t> junk = {1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_QFS_ERROR(DecodeImageBytes(junk), ErrorCode::kUnsupportedFormat);
}

TEST(AtomicWriteTest, ReplacesWithoutTempLeftovers) {
  TempDir dir;
  WriteFileAtomic(dir / "f.txt", std::string("one"));
  WriteFileAtomic(dir / "f.txt", std::string("two"));
  const auto bytes = ReadFileBytes(dir / "f.txt");
  EXPECT_EQ(std::string(bytes.begin(), bytes.end()), "two");
  int entries = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    (void)e;
    ++entries;
  }
  EXPECT_EQ(entries, 1);
}

}  // namespace
}  // namespace qfs
