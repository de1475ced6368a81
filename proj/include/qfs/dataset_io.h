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

// Image corpora described by a CSV manifest:
//
//   # num_classes=10
//   image_id,path,gt_label
//   cat_001,images/cat_001.png,3
//
// Relative paths resolve against the manifest's directory. Lines starting
// with '#' other than the pragma are comments.

#ifndef QFS_DATASET_IO_H_
#define QFS_DATASET_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qfs/image.h"

namespace qfs {

struct ImageRecord {
  std::string image_id;
  std::filesystem::path path;
  int gt_label = 0;
  uint64_t original_bytes = 0;
};

struct Manifest {
  int num_classes = 0;
  std::vector<ImageRecord> records;

  uint64_t TotalOriginalBytes() const;
};

Manifest LoadManifest(const std::filesystem::path& path);

// Writes a manifest with paths relative to the manifest's directory when
// they live beneath it.
void WriteManifest(const Manifest& manifest, const std::filesystem::path& path);

RasterImage LoadImage(const ImageRecord& record);

// Sniffs PNG, binary PPM/PGM or JPEG from the leading bytes.
RasterImage DecodeImageBytes(std::span<const uint8_t> bytes);

std::vector<uint8_t> EncodePng(const RasterImage& img);
std::vector<uint8_t> EncodePpm(const RasterImage& img);

std::vector<uint8_t> ReadFileBytes(const std::filesystem::path& path);

// Writes through a temporary sibling file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::span<const uint8_t> bytes);
void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& text);

}  // namespace qfs

#endif  // QFS_DATASET_IO_H_
