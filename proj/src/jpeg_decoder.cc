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
#include <optional>
#include <string>

#include "jpeg_internal.h"
#include "qfs/jpeg_codec.h"
#include "qfs/status.h"

namespace qfs {
namespace {

using jpeg_internal::kZigzagToNatural;

[[noreturn]] void Malformed(const std::string& what) {
  Fail(ErrorCode::kMalformedStream, "malformed JPEG: " + what);
}

class HuffmanDecoder {
 public:
  HuffmanDecoder() = default;

  HuffmanDecoder(const std::array<uint8_t, 16>& counts,
                 std::vector<uint8_t> symbols)
      : symbols_(std::move(symbols)) {
    int code = 0;
    int k = 0;
    for (int len = 1; len <= 16; ++len) {
      val_offset_[len] = k - code;
      if (counts[len - 1] != 0) {
        k += counts[len - 1];
        code += counts[len - 1];
        max_code_[len] = code - 1;
      } else {
        max_code_[len] = -1;
      }
      if (code > (1 << len)) Malformed("oversubscribed Huffman table");
      code <<= 1;
    }
    valid_ = true;
  }

  bool valid() const { return valid_; }

  template <typename BitSource>
  uint8_t Decode(BitSource& bits) const {
    int code = 0;
    for (int len = 1; len <= 16; ++len) {
      code = (code << 1) | bits.Bit();
      if (code <= max_code_[len]) {
        return symbols_[static_cast<size_t>(code + val_offset_[len])];
      }
    }
    Malformed("invalid Huffman code");
  }

 private:
  std::array<int, 17> max_code_{};
  std::array<int, 17> val_offset_{};
  std::vector<uint8_t> symbols_;
  bool valid_ = false;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  bool AtEnd() const { return pos_ >= data_.size(); }
  size_t pos() const { return pos_; }
  void Seek(size_t pos) { pos_ = pos; }

  uint8_t U8() {
    if (pos_ >= data_.size()) Malformed("unexpected end of data");
    return data_[pos_++];
  }
  int U16() {
    const int hi = U8();
    return (hi << 8) | U8();
  }
  uint8_t Peek(size_t offset = 0) const {
    return pos_ + offset < data_.size() ? data_[pos_ + offset] : 0;
  }

 private:
  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

// Reads entropy-coded bits, removing 0xFF00 stuffing. Stops at markers.
class BitReader {
 public:
  explicit BitReader(ByteReader& in) : in_(in) {}

  int Bit() {
    if (bits_left_ == 0) Fill();
    --bits_left_;
    return (current_ >> bits_left_) & 1;
  }

  int Bits(int n) {
    int v = 0;
    for (int i = 0; i < n; ++i) v = (v << 1) | Bit();
    return v;
  }

  // Discards the rest of the current byte.
  void Align() { bits_left_ = 0; }

 private:
  void Fill() {
    if (in_.AtEnd()) Malformed("entropy-coded data truncated");
    const uint8_t b = in_.Peek();
    if (b == 0xFF) {
      if (in_.Peek(1) != 0x00) Malformed("marker inside entropy-coded data");
      in_.U8();
      in_.U8();
    } else {
      in_.U8();
    }
    current_ = b;
    bits_left_ = 8;
  }

  ByteReader& in_;
  uint8_t current_ = 0;
  int bits_left_ = 0;
};

int Extend(int v, int n) { return v < (1 << (n - 1)) ? v - (1 << n) + 1 : v; }

struct Component {
  int id = 0;
  int h = 1;
  int v = 1;
  int tq = 0;
  int td = 0;
  int ta = 0;
  int blocks_w = 0;   // allocated block columns (whole MCUs)
  int blocks_h = 0;
  int sample_w = 0;   // ceil(width * h / hmax)
  int sample_h = 0;
  int dc_pred = 0;
  std::vector<int16_t> coefs;  // natural order, block-major
};

// ---------------------------------------------------------------------------
// Inverse DCT with the IJG "islow" fixed-point arithmetic.

constexpr int kConstBits = 13;
constexpr int kPass1Bits = 2;
constexpr int64_t kFix0_298631336 = 2446;
constexpr int64_t kFix0_390180644 = 3196;
constexpr int64_t kFix0_541196100 = 4433;
constexpr int64_t kFix0_765366865 = 6270;
constexpr int64_t kFix0_899976223 = 7373;
constexpr int64_t kFix1_175875602 = 9633;
constexpr int64_t kFix1_501321110 = 12299;
constexpr int64_t kFix1_847759065 = 15137;
constexpr int64_t kFix1_961570560 = 16069;
constexpr int64_t kFix2_053119869 = 16819;
constexpr int64_t kFix2_562915447 = 20995;
constexpr int64_t kFix3_072711026 = 25172;

inline int64_t Descale(int64_t x, int n) {
  return (x + (int64_t{1} << (n - 1))) >> n;
}

inline uint8_t ClampSample(int64_t v) {
  return static_cast<uint8_t>(std::clamp<int64_t>(v, 0, 255));
}

// One 1-D pass. `in` holds 8 values with stride `stride`; results are the
// eight unscaled outputs before descaling.
struct IdctOut {
  int64_t v[8];
};

IdctOut Idct1D(int64_t i0, int64_t i1, int64_t i2, int64_t i3, int64_t i4,
               int64_t i5, int64_t i6, int64_t i7) {
  int64_t z1 = (i2 + i6) * kFix0_541196100;
  const int64_t tmp2_e = z1 + i6 * -kFix1_847759065;
  const int64_t tmp3_e = z1 + i2 * kFix0_765366865;
  const int64_t tmp0_e = (i0 + i4) << kConstBits;
  const int64_t tmp1_e = (i0 - i4) << kConstBits;
  const int64_t tmp10 = tmp0_e + tmp3_e;
  const int64_t tmp13 = tmp0_e - tmp3_e;
  const int64_t tmp11 = tmp1_e + tmp2_e;
  const int64_t tmp12 = tmp1_e - tmp2_e;

  int64_t tmp0 = i7, tmp1 = i5, tmp2 = i3, tmp3 = i1;
  z1 = tmp0 + tmp3;
  int64_t z2 = tmp1 + tmp2;
  int64_t z3 = tmp0 + tmp2;
  int64_t z4 = tmp1 + tmp3;
  const int64_t z5 = (z3 + z4) * kFix1_175875602;
  tmp0 *= kFix0_298631336;
  tmp1 *= kFix2_053119869;
  tmp2 *= kFix3_072711026;
  tmp3 *= kFix1_501321110;
  z1 *= -kFix0_899976223;
  z2 *= -kFix2_562915447;
  z3 *= -kFix1_961570560;
  z4 *= -kFix0_390180644;
  z3 += z5;
  z4 += z5;
  tmp0 += z1 + z3;
  tmp1 += z2 + z4;
  tmp2 += z2 + z3;
  tmp3 += z1 + z4;

  return {{tmp10 + tmp3, tmp11 + tmp2, tmp12 + tmp1, tmp13 + tmp0,
           tmp13 - tmp0, tmp12 - tmp1, tmp11 - tmp2, tmp10 - tmp3}};
}

void InverseDct(const int16_t* coefs, const std::array<uint16_t, 64>& quant,
                uint8_t* out, int stride) {
  int64_t ws[64];
  for (int col = 0; col < 8; ++col) {
    auto deq = [&](int row) {
      return static_cast<int64_t>(coefs[row * 8 + col]) * quant[row * 8 + col];
    };
    bool ac_zero = true;
    for (int row = 1; row < 8; ++row) ac_zero = ac_zero && coefs[row * 8 + col] == 0;
    if (ac_zero) {
      const int64_t dc = deq(0) * (1 << kPass1Bits);
      for (int row = 0; row < 8; ++row) ws[row * 8 + col] = dc;
      continue;
    }
    const IdctOut r = Idct1D(deq(0), deq(1), deq(2), deq(3), deq(4), deq(5),
                             deq(6), deq(7));
    for (int row = 0; row < 8; ++row) {
      ws[row * 8 + col] = Descale(r.v[row], kConstBits - kPass1Bits);
    }
  }
  for (int row = 0; row < 8; ++row) {
    const int64_t* w = ws + row * 8;
    uint8_t* o = out + static_cast<ptrdiff_t>(row) * stride;
    const IdctOut r = Idct1D(w[0], w[1], w[2], w[3], w[4], w[5], w[6], w[7]);
    for (int x = 0; x < 8; ++x) {
      o[x] = ClampSample(Descale(r.v[x], kConstBits + kPass1Bits + 3) + 128);
    }
  }
}

// ---------------------------------------------------------------------------
// Upsampling to full resolution. Plane `src` has stride `src_stride` and
// `sw` x `sh` meaningful samples.

std::vector<uint8_t> UpsampleH2V2Fancy(const std::vector<uint8_t>& src,
                                       int src_stride, int sw, int sh,
                                       int out_w, int out_h) {
  std::vector<uint8_t> out(static_cast<size_t>(out_w) * out_h);
  std::vector<int> colsum(static_cast<size_t>(sw));
  std::vector<uint8_t> row(static_cast<size_t>(2 * sw));
  for (int oy = 0; oy < out_h; ++oy) {
    const int r = oy / 2;
    const int nb = oy % 2 == 0 ? std::max(r - 1, 0) : std::min(r + 1, sh - 1);
    const uint8_t* in0 = src.data() + static_cast<size_t>(r) * src_stride;
    const uint8_t* in1 = src.data() + static_cast<size_t>(nb) * src_stride;
    for (int x = 0; x < sw; ++x) colsum[x] = in0[x] * 3 + in1[x];
    row[0] = static_cast<uint8_t>((colsum[0] * 4 + 8) >> 4);
    row[1] = static_cast<uint8_t>((colsum[0] * 3 + colsum[1] + 7) >> 4);
    for (int x = 1; x < sw - 1; ++x) {
      row[2 * x] = static_cast<uint8_t>((colsum[x] * 3 + colsum[x - 1] + 8) >> 4);
      row[2 * x + 1] =
          static_cast<uint8_t>((colsum[x] * 3 + colsum[x + 1] + 7) >> 4);
    }
    row[2 * sw - 2] =
        static_cast<uint8_t>((colsum[sw - 1] * 3 + colsum[sw - 2] + 8) >> 4);
    row[2 * sw - 1] = static_cast<uint8_t>((colsum[sw - 1] * 4 + 7) >> 4);
    std::copy_n(row.begin(), out_w, out.begin() + static_cast<ptrdiff_t>(oy) * out_w);
  }
  return out;
}

std::vector<uint8_t> UpsampleH2V1Fancy(const std::vector<uint8_t>& src,
                                       int src_stride, int sw, int out_w,
                                       int out_h) {
  std::vector<uint8_t> out(static_cast<size_t>(out_w) * out_h);
  std::vector<uint8_t> row(static_cast<size_t>(2 * sw));
  for (int oy = 0; oy < out_h; ++oy) {
    const uint8_t* in = src.data() + static_cast<size_t>(oy) * src_stride;
    row[0] = in[0];
    row[1] = static_cast<uint8_t>((in[0] * 3 + in[1] + 2) >> 2);
    for (int x = 1; x < sw - 1; ++x) {
      row[2 * x] = static_cast<uint8_t>((in[x] * 3 + in[x - 1] + 1) >> 2);
      row[2 * x + 1] = static_cast<uint8_t>((in[x] * 3 + in[x + 1] + 2) >> 2);
    }
    row[2 * sw - 2] = static_cast<uint8_t>((in[sw - 1] * 3 + in[sw - 2] + 1) >> 2);
    row[2 * sw - 1] = in[sw - 1];
    std::copy_n(row.begin(), out_w, out.begin() + static_cast<ptrdiff_t>(oy) * out_w);
  }
  return out;
}

std::vector<uint8_t> UpsampleH1V2Fancy(const std::vector<uint8_t>& src,
                                       int src_stride, int sh, int out_w,
                                       int out_h) {
  std::vector<uint8_t> out(static_cast<size_t>(out_w) * out_h);
  for (int oy = 0; oy < out_h; ++oy) {
    const int r = oy / 2;
    const bool upper = oy % 2 == 0;
    const int nb = upper ? std::max(r - 1, 0) : std::min(r + 1, sh - 1);
    const int bias = upper ? 1 : 2;
    const uint8_t* in0 = src.data() + static_cast<size_t>(r) * src_stride;
    const uint8_t* in1 = src.data() + static_cast<size_t>(nb) * src_stride;
    for (int x = 0; x < out_w; ++x) {
      out[static_cast<size_t>(oy) * out_w + x] =
          static_cast<uint8_t>((in0[x] * 3 + in1[x] + bias) >> 2);
    }
  }
  return out;
}

std::vector<uint8_t> UpsampleBox(const std::vector<uint8_t>& src,
                                 int src_stride, int fx, int fy, int out_w,
                                 int out_h) {
  std::vector<uint8_t> out(static_cast<size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      out[static_cast<size_t>(y) * out_w + x] =
          src[static_cast<size_t>(y / fy) * src_stride + x / fx];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

class Decoder {
 public:
  explicit Decoder(std::span<const uint8_t> data) : in_(data) {}

  RasterImage Run() {
    if (in_.Peek() != 0xFF || in_.Peek(1) != jpeg_internal::kSOI) {
      Malformed("missing SOI marker");
    }
    in_.U8();
    in_.U8();
    bool seen_eoi = false;
    while (!seen_eoi) {
      const uint8_t marker = NextMarker();
      switch (marker) {
        case jpeg_internal::kSOF0:
        case jpeg_internal::kSOF1:
          ReadFrame();
          break;
        case jpeg_internal::kDHT:
          ReadHuffmanTables();
          break;
        case jpeg_internal::kDQT:
          ReadQuantTables();
          break;
        case jpeg_internal::kDRI:
          if (in_.U16() != 4) Malformed("bad DRI length");
          restart_interval_ = in_.U16();
          break;
        case jpeg_internal::kSOS:
          ReadScan();
          break;
        case jpeg_internal::kEOI:
          seen_eoi = true;
          break;
        case jpeg_internal::kSOI:
          Malformed("unexpected SOI");
        default:
          if (marker == jpeg_internal::kSOF2 ||
              (marker >= 0xC3 && marker <= 0xCF && marker != 0xC4 &&
               marker != 0xC8 && marker != 0xCC)) {
            Fail(ErrorCode::kUnsupportedFeature,
                 "unsupported JPEG process (progressive, lossless or "
                 "arithmetic coding)");
          }
          SkipSegment();
      }
    }
    if (!frame_seen_ || !scan_seen_) Malformed("no image data before EOI");
    return Reconstruct();
  }

 private:
  uint8_t NextMarker() {
    if (in_.U8() != 0xFF) Malformed("expected marker");
    uint8_t m = in_.U8();
    while (m == 0xFF) m = in_.U8();  // fill bytes
    return m;
  }

  void SkipSegment() {
    const int len = in_.U16();
    if (len < 2) Malformed("bad segment length");
    for (int i = 0; i < len - 2; ++i) in_.U8();
  }

  void ReadQuantTables() {
    int len = in_.U16() - 2;
    while (len > 0) {
      const int pq_tq = in_.U8();
      const int precision = pq_tq >> 4;
      const int id = pq_tq & 15;
      if (id > 3 || precision > 1) Malformed("bad DQT table spec");
      for (int k = 0; k < 64; ++k) {
        const int v = precision == 0 ? in_.U8() : in_.U16();
        quant_[id][kZigzagToNatural[k]] = static_cast<uint16_t>(v);
      }
      quant_set_[id] = true;
      len -= 1 + 64 * (precision + 1);
    }
    if (len != 0) Malformed("DQT length mismatch");
  }

  void ReadHuffmanTables() {
    int len = in_.U16() - 2;
    while (len > 0) {
      const int tc_th = in_.U8();
      const int tc = tc_th >> 4;
      const int th = tc_th & 15;
      if (tc > 1 || th > 3) Malformed("bad DHT table spec");
      std::array<uint8_t, 16> counts;
      int total = 0;
      for (auto& c : counts) {
        c = in_.U8();
        total += c;
      }
      if (total > 256) Malformed("too many Huffman symbols");
      std::vector<uint8_t> symbols(static_cast<size_t>(total));
      for (auto& s : symbols) s = in_.U8();
      (tc == 0 ? dc_tables_ : ac_tables_)[th] =
          HuffmanDecoder(counts, std::move(symbols));
      len -= 17 + total;
    }
    if (len != 0) Malformed("DHT length mismatch");
  }

  void ReadFrame() {
    if (frame_seen_) Malformed("multiple frames");
    frame_seen_ = true;
    const int len = in_.U16();
    const int precision = in_.U8();
    if (precision != 8) {
      Fail(ErrorCode::kUnsupportedFeature, "only 8-bit JPEG is supported");
    }
    height_ = in_.U16();
    width_ = in_.U16();
    const int n = in_.U8();
    if (width_ == 0 || height_ == 0) Malformed("zero image dimension");
    if (n != 1 && n != 3) {
      Fail(ErrorCode::kUnsupportedFeature,
           "unsupported component count " + std::to_string(n));
    }
    if (len != 8 + 3 * n) Malformed("bad SOF length");
    components_.resize(static_cast<size_t>(n));
    for (auto& c : components_) {
      c.id = in_.U8();
      const int hv = in_.U8();
      c.h = hv >> 4;
      c.v = hv & 15;
      c.tq = in_.U8();
      if (c.h < 1 || c.h > 2 || c.v < 1 || c.v > 2) {
        Fail(ErrorCode::kUnsupportedFeature, "unsupported sampling factors");
      }
      if (c.tq > 3) Malformed("bad quantization table id");
      hmax_ = std::max(hmax_, c.h);
      vmax_ = std::max(vmax_, c.v);
    }
    mcus_x_ = (width_ + 8 * hmax_ - 1) / (8 * hmax_);
    mcus_y_ = (height_ + 8 * vmax_ - 1) / (8 * vmax_);
    for (auto& c : components_) {
      c.blocks_w = mcus_x_ * c.h;
      c.blocks_h = mcus_y_ * c.v;
      c.sample_w = (width_ * c.h + hmax_ - 1) / hmax_;
      c.sample_h = (height_ * c.v + vmax_ - 1) / vmax_;
      c.coefs.assign(static_cast<size_t>(c.blocks_w) * c.blocks_h * 64, 0);
    }
  }

  void ReadScan() {
    if (!frame_seen_) Malformed("SOS before SOF");
    scan_seen_ = true;
    const int len = in_.U16();
    const int ns = in_.U8();
    if (ns < 1 || ns > static_cast<int>(components_.size()) ||
        len != 6 + 2 * ns) {
      Malformed("bad SOS header");
    }
    std::vector<Component*> scan;
    for (int i = 0; i < ns; ++i) {
      const int id = in_.U8();
      const int tables = in_.U8();
      auto it = std::find_if(components_.begin(), components_.end(),
                             [&](const Component& c) { return c.id == id; });
      if (it == components_.end()) Malformed("SOS references unknown component");
      it->td = tables >> 4;
      it->ta = tables & 15;
      if (it->td > 3 || it->ta > 3 || !dc_tables_[it->td].valid() ||
          !ac_tables_[it->ta].valid()) {
        Malformed("SOS references undefined Huffman table");
      }
      scan.push_back(&*it);
    }
    const int ss = in_.U8();
    const int se = in_.U8();
    const int ahal = in_.U8();
    if (ss != 0 || se != 63 || ahal != 0) {
      Fail(ErrorCode::kUnsupportedFeature, "non-sequential scan parameters");
    }
    for (Component* c : scan) c->dc_pred = 0;

    BitReader bits(in_);
    const bool interleaved = ns > 1;
    const int units_x = interleaved
                            ? mcus_x_
                            : (scan[0]->sample_w + 7) / 8;
    const int units_y = interleaved
                            ? mcus_y_
                            : (scan[0]->sample_h + 7) / 8;
    int restarts_left = restart_interval_;
    int next_rst = 0;
    for (int uy = 0; uy < units_y; ++uy) {
      for (int ux = 0; ux < units_x; ++ux) {
        if (restart_interval_ > 0) {
          if (restarts_left == 0) {
            bits.Align();
            if (in_.U8() != 0xFF ||
                in_.U8() != jpeg_internal::kRST0 + next_rst) {
              Malformed("missing restart marker");
            }
            next_rst = (next_rst + 1) & 7;
            for (Component* c : scan) c->dc_pred = 0;
            restarts_left = restart_interval_;
          }
          --restarts_left;
        }
        if (interleaved) {
          for (Component* c : scan) {
            for (int by = 0; by < c->v; ++by) {
              for (int bx = 0; bx < c->h; ++bx) {
                DecodeBlock(bits, *c, ux * c->h + bx, uy * c->v + by);
              }
            }
          }
        } else {
          DecodeBlock(bits, *scan[0], ux, uy);
        }
      }
    }
    bits.Align();
    // Skip anything up to the next marker.
    while (!in_.AtEnd() && !(in_.Peek() == 0xFF && in_.Peek(1) != 0x00)) {
      in_.U8();
    }
  }

  void DecodeBlock(BitReader& bits, Component& c, int bx, int by) {
    int16_t* out =
        c.coefs.data() + (static_cast<size_t>(by) * c.blocks_w + bx) * 64;
    const int s = dc_tables_[c.td].Decode(bits);
    if (s > 11) Malformed("DC magnitude category too large");
    const int diff = s == 0 ? 0 : Extend(bits.Bits(s), s);
    c.dc_pred += diff;
    out[0] = static_cast<int16_t>(c.dc_pred);
    const HuffmanDecoder& ac = ac_tables_[c.ta];
    for (int k = 1; k < 64;) {
      const int rs = ac.Decode(bits);
      const int r = rs >> 4;
      const int size = rs & 15;
      if (size == 0) {
        if (r != 15) break;
        k += 16;
        continue;
      }
      k += r;
      if (k > 63) Malformed("AC coefficient index out of range");
      out[kZigzagToNatural[k]] = static_cast<int16_t>(Extend(bits.Bits(size), size));
      ++k;
    }
  }

  RasterImage Reconstruct() {
    std::vector<std::vector<uint8_t>> planes;
    for (const Component& c : components_) {
      if (!quant_set_[c.tq]) Malformed("undefined quantization table");
      const int stride = c.blocks_w * 8;
      std::vector<uint8_t> samples(static_cast<size_t>(stride) * c.blocks_h * 8);
      for (int by = 0; by < c.blocks_h; ++by) {
        for (int bx = 0; bx < c.blocks_w; ++bx) {
          InverseDct(c.coefs.data() + (static_cast<size_t>(by) * c.blocks_w + bx) * 64,
                     quant_[c.tq],
                     samples.data() + static_cast<size_t>(by) * 8 * stride + bx * 8,
                     stride);
        }
      }
      const int fx = hmax_ / c.h;
      const int fy = vmax_ / c.v;
      if (fx == 1 && fy == 1) {
        std::vector<uint8_t> full(static_cast<size_t>(width_) * height_);
        for (int y = 0; y < height_; ++y) {
          std::copy_n(samples.begin() + static_cast<ptrdiff_t>(y) * stride, width_,
                      full.begin() + static_cast<ptrdiff_t>(y) * width_);
        }
        planes.push_back(std::move(full));
      } else if (fx == 2 && fy == 2 && c.sample_w > 2) {
        planes.push_back(UpsampleH2V2Fancy(samples, stride, c.sample_w,
                                           c.sample_h, width_, height_));
      } else if (fx == 2 && fy == 1 && c.sample_w > 2) {
        planes.push_back(
            UpsampleH2V1Fancy(samples, stride, c.sample_w, width_, height_));
      } else if (fx == 1 && fy == 2) {
        planes.push_back(
            UpsampleH1V2Fancy(samples, stride, c.sample_h, width_, height_));
      } else {
        planes.push_back(UpsampleBox(samples, stride, fx, fy, width_, height_));
      }
    }

    RasterImage img(width_, height_);
    const size_t n = img.plane_size();
    if (planes.size() == 1) {
      for (int ch = 0; ch < 3; ++ch) {
        std::copy(planes[0].begin(), planes[0].end(), img.plane(ch).begin());
      }
      return img;
    }
    const bool rgb = components_[0].id == 'R' && components_[1].id == 'G' &&
                     components_[2].id == 'B';
    auto r = img.plane(0);
    auto g = img.plane(1);
    auto b = img.plane(2);
    if (rgb) {
      std::copy(planes[0].begin(), planes[0].end(), r.begin());
      std::copy(planes[1].begin(), planes[1].end(), g.begin());
      std::copy(planes[2].begin(), planes[2].end(), b.begin());
      return img;
    }
    constexpr int kScaleBits = 16;
    constexpr int64_t kHalf = int64_t{1} << (kScaleBits - 1);
    constexpr int64_t kCrR = 91881;   // 1.40200 * 2^16
    constexpr int64_t kCbB = 116130;  // 1.77200 * 2^16
    constexpr int64_t kCrG = 46802;   // 0.71414 * 2^16
    constexpr int64_t kCbG = 22554;   // 0.34414 * 2^16
    for (size_t i = 0; i < n; ++i) {
      const int64_t y = planes[0][i];
      const int64_t cb = static_cast<int64_t>(planes[1][i]) - 128;
      const int64_t cr = static_cast<int64_t>(planes[2][i]) - 128;
      r[i] = ClampSample(y + ((kCrR * cr + kHalf) >> kScaleBits));
      g[i] = ClampSample(y + ((-kCbG * cb + kHalf - kCrG * cr) >> kScaleBits));
      b[i] = ClampSample(y + ((kCbB * cb + kHalf) >> kScaleBits));
    }
    return img;
  }

  ByteReader in_;
  std::array<std::array<uint16_t, 64>, 4> quant_{};
  std::array<bool, 4> quant_set_{};
  std::array<HuffmanDecoder, 4> dc_tables_;
  std::array<HuffmanDecoder, 4> ac_tables_;
  std::vector<Component> components_;
  int width_ = 0;
  int height_ = 0;
  int hmax_ = 1;
  int vmax_ = 1;
  int mcus_x_ = 0;
  int mcus_y_ = 0;
  int restart_interval_ = 0;
  bool frame_seen_ = false;
  bool scan_seen_ = false;
};

}  // namespace

RasterImage Decode(std::span<const uint8_t> bytes) {
  return Decoder(bytes).Run();
}

}  // namespace qfs
