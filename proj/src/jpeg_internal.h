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

#ifndef QFS_SRC_JPEG_INTERNAL_H_
#define QFS_SRC_JPEG_INTERNAL_H_

#include <array>
#include <cstdint>
#include <vector>

namespace qfs::jpeg_internal {

// kZigzagToNatural[i] is the natural-order index of the i-th coefficient in
// zigzag scan order.
inline constexpr std::array<uint8_t, 64> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

// DHT payload: code counts per length 1..16 followed by symbol values.
struct HuffmanSpec {
  std::array<uint8_t, 16> counts;
  std::vector<uint8_t> symbols;
};

const HuffmanSpec& StdDcLuma();
const HuffmanSpec& StdDcChroma();
const HuffmanSpec& StdAcLuma();
const HuffmanSpec& StdAcChroma();

// Marker codes (second byte after 0xFF).
enum Marker : uint8_t {
  kSOF0 = 0xC0,
  kSOF1 = 0xC1,
  kSOF2 = 0xC2,
  kDHT = 0xC4,
  kRST0 = 0xD0,
  kSOI = 0xD8,
  kEOI = 0xD9,
  kSOS = 0xDA,
  kDQT = 0xDB,
  kDRI = 0xDD,
  kAPP0 = 0xE0,
};

}  // namespace qfs::jpeg_internal

#endif  // QFS_SRC_JPEG_INTERNAL_H_
