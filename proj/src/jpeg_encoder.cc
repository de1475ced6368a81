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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "jpeg_internal.h"
#include "qfs/jpeg_codec.h"
#include "qfs/status.h"

namespace qfs {
namespace {

using jpeg_internal::HuffmanSpec;
using jpeg_internal::kZigzagToNatural;

constexpr int kDctBits = 13;

// Orthonormal 1-D DCT-II basis scaled by 2^13: row u, sample x.
struct DctTable {
  std::array<std::array<int64_t, 8>, 8> m;
  DctTable() {
    for (int u = 0; u < 8; ++u) {
      const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
      for (int x = 0; x < 8; ++x) {
        m[u][x] = std::llround(std::ldexp(
            cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0),
            kDctBits));
      }
    }
  }
};

const DctTable& Dct() {
  static const DctTable table;
  return table;
}

// Forward DCT of level-shifted samples followed by quantization. Output is in
// natural order.
void ForwardDctQuantize(const std::array<int, 64>& samples,
                        const std::array<uint16_t, 64>& quant,
                        std::array<int, 64>& out) {
  const auto& t = Dct().m;
  std::array<int64_t, 64> rows;
  for (int y = 0; y < 8; ++y) {
    for (int u = 0; u < 8; ++u) {
      int64_t acc = 0;
      for (int x = 0; x < 8; ++x) acc += t[u][x] * samples[y * 8 + x];
      rows[y * 8 + u] = acc;
    }
  }
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 8; ++u) {
      int64_t acc = 0;
      for (int y = 0; y < 8; ++y) acc += t[v][y] * rows[y * 8 + u];
      const int64_t den = static_cast<int64_t>(quant[v * 8 + u])
                          << (2 * kDctBits);
      const int64_t mag = (std::llabs(acc) + den / 2) / den;
      out[v * 8 + u] = static_cast<int>(acc < 0 ? -mag : mag);
    }
  }
}

struct HuffmanCode {
  uint16_t code = 0;
  uint8_t length = 0;
};

using HuffmanEncoder = std::array<HuffmanCode, 256>;

HuffmanEncoder BuildEncoder(const HuffmanSpec& spec) {
  HuffmanEncoder enc{};
  uint16_t code = 0;
  size_t k = 0;
  for (int len = 1; len <= 16; ++len) {
    for (int i = 0; i < spec.counts[len - 1]; ++i) {
      enc[spec.symbols[k++]] = {code, static_cast<uint8_t>(len)};
      ++code;
    }
    code <<= 1;
  }
  return enc;
}

class BitWriter {
 public:
  explicit BitWriter(std::vector<uint8_t>& out) : out_(out) {}

  void Put(uint32_t value, int count) {
    if (count == 0) return;
    buffer_ = (buffer_ << count) | (value & ((1u << count) - 1));
    bits_ += count;
    while (bits_ >= 8) {
      const uint8_t byte = static_cast<uint8_t>(buffer_ >> (bits_ - 8));
      out_.push_back(byte);
      if (byte == 0xFF) out_.push_back(0x00);
      bits_ -= 8;
    }
    buffer_ &= (uint64_t{1} << bits_) - 1;
  }

  void Put(const HuffmanCode& c) { Put(c.code, c.length); }

  // Pads the final partial byte with one bits.
  void Flush() {
    const int pad = (8 - bits_ % 8) % 8;
    Put((1u << pad) - 1, pad);
  }

 private:
  std::vector<uint8_t>& out_;
  uint64_t buffer_ = 0;
  int bits_ = 0;
};

int BitLength(int v) {
  int n = 0;
  for (unsigned a = static_cast<unsigned>(std::abs(v)); a != 0; a >>= 1) ++n;
  return n;
}

void EncodeBlock(const std::array<int, 64>& coefs, int& dc_pred,
                 const HuffmanEncoder& dc, const HuffmanEncoder& ac,
                 BitWriter& w) {
  const int diff = coefs[0] - dc_pred;
  dc_pred = coefs[0];
  const int dc_bits = BitLength(diff);
  w.Put(dc[dc_bits]);
  w.Put(static_cast<uint32_t>(diff < 0 ? diff - 1 : diff), dc_bits);

  int run = 0;
  for (int k = 1; k < 64; ++k) {
    const int v = coefs[kZigzagToNatural[k]];
    if (v == 0) {
      ++run;
      continue;
    }
    while (run > 15) {
      w.Put(ac[0xF0]);
      run -= 16;
    }
    const int n = BitLength(v);
    w.Put(ac[(run << 4) | n]);
    w.Put(static_cast<uint32_t>(v < 0 ? v - 1 : v), n);
    run = 0;
  }
  if (run > 0) w.Put(ac[0x00]);
}

void PutU16(std::vector<uint8_t>& out, int v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v & 0xFF));
}

void PutMarker(std::vector<uint8_t>& out, uint8_t marker) {
  out.push_back(0xFF);
  out.push_back(marker);
}

void WriteHuffmanTable(std::vector<uint8_t>& out, uint8_t klass_id,
                       const HuffmanSpec& spec) {
  out.push_back(klass_id);
  out.insert(out.end(), spec.counts.begin(), spec.counts.end());
  out.insert(out.end(), spec.symbols.begin(), spec.symbols.end());
}

// Full-resolution Y/Cb/Cr planes padded to whole MCUs by edge replication.
struct YccPlanes {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> y, cb, cr;
};

YccPlanes ToPaddedYcc(const RasterImage& img, int padded_w, int padded_h) {
  YccPlanes p;
  p.width = padded_w;
  p.height = padded_h;
  const size_t n = static_cast<size_t>(padded_w) * padded_h;
  p.y.resize(n);
  p.cb.resize(n);
  p.cr.resize(n);
  for (int yy = 0; yy < padded_h; ++yy) {
    const int sy = std::min(yy, img.height() - 1);
    for (int xx = 0; xx < padded_w; ++xx) {
      const int sx = std::min(xx, img.width() - 1);
      const int32_t r = img.at(0, sx, sy);
      const int32_t g = img.at(1, sx, sy);
      const int32_t b = img.at(2, sx, sy);
      const size_t i = static_cast<size_t>(yy) * padded_w + xx;
      p.y[i] = static_cast<uint8_t>((19595 * r + 38470 * g + 7471 * b + 32768) >> 16);
      p.cb[i] = static_cast<uint8_t>(
          (-11059 * r - 21709 * g + 32768 * b + (128 << 16) + 32767) >> 16);
      p.cr[i] = static_cast<uint8_t>(
          (32768 * r - 27439 * g - 5329 * b + (128 << 16) + 32767) >> 16);
    }
  }
  return p;
}

std::vector<uint8_t> Downsample2x2(const std::vector<uint8_t>& src, int w,
                                   int h) {
  const int dw = w / 2;
  const int dh = h / 2;
  std::vector<uint8_t> out(static_cast<size_t>(dw) * dh);
  for (int y = 0; y < dh; ++y) {
    for (int x = 0; x < dw; ++x) {
      const size_t i = static_cast<size_t>(2 * y) * w + 2 * x;
      out[static_cast<size_t>(y) * dw + x] = static_cast<uint8_t>(
          (src[i] + src[i + 1] + src[i + w] + src[i + w + 1] + 2) >> 2);
    }
  }
  return out;
}

void LoadBlock(const std::vector<uint8_t>& plane, int stride, int bx, int by,
               std::array<int, 64>& block) {
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      block[y * 8 + x] =
          static_cast<int>(plane[static_cast<size_t>(by * 8 + y) * stride +
                                 bx * 8 + x]) -
          128;
    }
  }
}

}  // namespace

JpegBytes Encode(const RasterImage& img, QualityFactor qf) {
  if (img.empty()) Fail(ErrorCode::kInvalidArgument, "cannot encode empty image");
  if (img.width() > 65535 || img.height() > 65535) {
    Fail(ErrorCode::kDimensionTooLarge,
         "image dimensions exceed 65535: " + std::to_string(img.width()) +
             "x" + std::to_string(img.height()));
  }
  const QuantTables tables = QualityToTables(qf);
  const int mcus_x = (img.width() + 15) / 16;
  const int mcus_y = (img.height() + 15) / 16;
  const YccPlanes ycc = ToPaddedYcc(img, mcus_x * 16, mcus_y * 16);
  const auto cb = Downsample2x2(ycc.cb, ycc.width, ycc.height);
  const auto cr = Downsample2x2(ycc.cr, ycc.width, ycc.height);
  const int chroma_stride = ycc.width / 2;

  std::vector<uint8_t> out;
  out.reserve(1024 + img.plane_size() / 2);
  PutMarker(out, jpeg_internal::kSOI);

  PutMarker(out, jpeg_internal::kAPP0);
  PutU16(out, 16);
  for (char c : {'J', 'F', 'I', 'F', '\0'}) out.push_back(static_cast<uint8_t>(c));
  out.insert(out.end(), {1, 1, 0, 0, 1, 0, 1, 0, 0});

  PutMarker(out, jpeg_internal::kDQT);
  PutU16(out, 2 + 2 * 65);
  for (int t = 0; t < 2; ++t) {
    const auto& q = t == 0 ? tables.luma : tables.chroma;
    out.push_back(static_cast<uint8_t>(t));
    for (int k = 0; k < 64; ++k) {
      out.push_back(static_cast<uint8_t>(q[kZigzagToNatural[k]]));
    }
  }

  PutMarker(out, jpeg_internal::kSOF0);
  PutU16(out, 8 + 3 * 3);
  out.push_back(8);
  PutU16(out, img.height());
  PutU16(out, img.width());
  out.push_back(3);
  out.insert(out.end(), {1, 0x22, 0, 2, 0x11, 1, 3, 0x11, 1});

  const auto& dc_l = jpeg_internal::StdDcLuma();
  const auto& ac_l = jpeg_internal::StdAcLuma();
  const auto& dc_c = jpeg_internal::StdDcChroma();
  const auto& ac_c = jpeg_internal::StdAcChroma();
  PutMarker(out, jpeg_internal::kDHT);
  PutU16(out, static_cast<int>(2 + 4 * 17 + dc_l.symbols.size() +
                               ac_l.symbols.size() + dc_c.symbols.size() +
                               ac_c.symbols.size()));
  WriteHuffmanTable(out, 0x00, dc_l);
  WriteHuffmanTable(out, 0x10, ac_l);
  WriteHuffmanTable(out, 0x01, dc_c);
  WriteHuffmanTable(out, 0x11, ac_c);

  PutMarker(out, jpeg_internal::kSOS);
  PutU16(out, 6 + 2 * 3);
  out.insert(out.end(), {3, 1, 0x00, 2, 0x11, 3, 0x11, 0, 63, 0});

  static const HuffmanEncoder enc_dc_l = BuildEncoder(dc_l);
  static const HuffmanEncoder enc_ac_l = BuildEncoder(ac_l);
  static const HuffmanEncoder enc_dc_c = BuildEncoder(dc_c);
  static const HuffmanEncoder enc_ac_c = BuildEncoder(ac_c);

  BitWriter writer(out);
  int pred_y = 0, pred_cb = 0, pred_cr = 0;
  std::array<int, 64> block, coefs;
  for (int my = 0; my < mcus_y; ++my) {
    for (int mx = 0; mx < mcus_x; ++mx) {
      for (int sub = 0; sub < 4; ++sub) {
        LoadBlock(ycc.y, ycc.width, mx * 2 + (sub & 1), my * 2 + (sub >> 1),
                  block);
        ForwardDctQuantize(block, tables.luma, coefs);
        EncodeBlock(coefs, pred_y, enc_dc_l, enc_ac_l, writer);
      }
      LoadBlock(cb, chroma_stride, mx, my, block);
      ForwardDctQuantize(block, tables.chroma, coefs);
      EncodeBlock(coefs, pred_cb, enc_dc_c, enc_ac_c, writer);
      LoadBlock(cr, chroma_stride, mx, my, block);
      ForwardDctQuantize(block, tables.chroma, coefs);
      EncodeBlock(coefs, pred_cr, enc_dc_c, enc_ac_c, writer);
    }
  }
  writer.Flush();
  PutMarker(out, jpeg_internal::kEOI);
  return {std::move(out), qf};
}

RasterImage RoundTrip(const RasterImage& img, QualityFactor qf,
                      size_t* encoded_size) {
  const JpegBytes jpeg = Encode(img, qf);
  if (encoded_size != nullptr) *encoded_size = jpeg.bytes.size();
  return Decode(jpeg.bytes);
}

}  // namespace qfs
