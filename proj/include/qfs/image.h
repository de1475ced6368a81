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

#ifndef QFS_IMAGE_H_
#define QFS_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qfs {

// Decoded 8-bit RGB image stored as three planes (R, G, B), each row-major.
class RasterImage {
 public:
  static constexpr int kChannels = 3;

  RasterImage() = default;
  RasterImage(int width, int height, uint8_t fill = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }
  size_t plane_size() const { return static_cast<size_t>(width_) * height_; }

  std::span<uint8_t> plane(int c) {
    return {data_.data() + c * plane_size(), plane_size()};
  }
  std::span<const uint8_t> plane(int c) const {
    return {data_.data() + c * plane_size(), plane_size()};
  }

  uint8_t& at(int c, int x, int y) {
    return data_[c * plane_size() + static_cast<size_t>(y) * width_ + x];
  }
  uint8_t at(int c, int x, int y) const {
    return data_[c * plane_size() + static_cast<size_t>(y) * width_ + x];
  }

  // All planes back to back: R plane, G plane, B plane.
  std::span<const uint8_t> data() const { return data_; }

  bool operator==(const RasterImage& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> data_;
};

// BT.601 luma in [0, 255] as doubles, row-major.
std::vector<double> LumaPlane(const RasterImage& img);

}  // namespace qfs

#endif  // QFS_IMAGE_H_
