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

#include <png.h>

#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "qfs/jpeg_codec.h"
#include "qfs/status.h"

namespace qfs {
namespace fs = std::filesystem;

namespace {

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(Trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool ParseInt(const std::string& s, int& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

RasterImage DecodePng(std::span<const uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    Fail(ErrorCode::kDecodeFailed,
         std::string("PNG header unreadable: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    Fail(ErrorCode::kDecodeFailed, "PNG decode failed: " + msg);
  }
  RasterImage img(static_cast<int>(image.width), static_cast<int>(image.height));
  for (size_t i = 0; i < img.plane_size(); ++i) {
    for (int c = 0; c < 3; ++c) img.plane(c)[i] = buffer[i * 3 + c];
  }
  return img;
}

// Binary PPM (P6) or PGM (P5), maxval <= 255.
RasterImage DecodePnm(std::span<const uint8_t> bytes) {
  size_t pos = 2;
  auto next_token = [&]() -> int {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    long v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      any = true;
      if (v > 1 << 24) break;
    }
    if (!any) Fail(ErrorCode::kDecodeFailed, "malformed PNM header");
    return static_cast<int>(v);
  };
  const bool color = bytes[1] == '6';
  const int w = next_token();
  const int h = next_token();
  const int maxval = next_token();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    Fail(ErrorCode::kUnsupportedFormat, "unsupported PNM dimensions or maxval");
  }
  ++pos;  // single whitespace after maxval
  const int channels = color ? 3 : 1;
  const size_t need = static_cast<size_t>(w) * h * channels;
  if (pos + need > bytes.size()) Fail(ErrorCode::kDecodeFailed, "truncated PNM");
  RasterImage img(w, h);
  for (size_t i = 0; i < img.plane_size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const int v = bytes[pos + i * channels + (color ? c : 0)];
      img.plane(c)[i] = static_cast<uint8_t>(maxval == 255 ? v : v * 255 / maxval);
    }
  }
  return img;
}

}  // namespace

uint64_t Manifest::TotalOriginalBytes() const {
  uint64_t total = 0;
  for (const auto& r : records) total += r.original_bytes;
  return total;
}

Manifest LoadManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kMissingFile, "manifest not found: " + path.string());
  const fs::path base = path.parent_path();
  Manifest m;
  bool header_seen = false;
  std::set<std::string> ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const std::string body = Trim(std::string_view(t).substr(1));
      constexpr std::string_view kPragma = "num_classes=";
      if (body.rfind(kPragma, 0) == 0 &&
          (!ParseInt(Trim(body.substr(kPragma.size())), m.num_classes) ||
           m.num_classes < 1)) {
        Fail(ErrorCode::kMalformedRow, "bad num_classes pragma: " + t);
      }
      continue;
    }
    const auto fields = SplitCsv(t);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"image_id", "path", "gt_label"}) {
        Fail(ErrorCode::kMalformedRow,
             "manifest header must be image_id,path,gt_label");
      }
      header_seen = true;
      continue;
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 3 || fields[0].empty()) {
      Fail(ErrorCode::kMalformedRow, "malformed manifest row at " + where);
    }
    if (m.num_classes < 1) {
      Fail(ErrorCode::kMalformedRow, "num_classes pragma must precede rows");
    }
    ImageRecord rec;
    rec.image_id = fields[0];
    if (!ids.insert(rec.image_id).second) {
      Fail(ErrorCode::kDuplicateId, "DuplicateId(\"" + rec.image_id + "\")");
    }
    if (!ParseInt(fields[2], rec.gt_label)) {
      Fail(ErrorCode::kMalformedRow, "gt_label is not an integer at " + where);
    }
    if (rec.gt_label < 0 || rec.gt_label >= m.num_classes) {
      Fail(ErrorCode::kLabelOutOfRange,
           "gt_label " + fields[2] + " outside [0," +
               std::to_string(m.num_classes) + ") at " + where);
    }
    rec.path = fs::path(fields[1]);
    if (rec.path.is_relative()) rec.path = base / rec.path;
    std::error_code ec;
    const auto size = fs::file_size(rec.path, ec);
    if (ec) Fail(ErrorCode::kMissingFile, "image file absent: " + rec.path.string());
    rec.original_bytes = size;
    m.records.push_back(std::move(rec));
  }
  if (!header_seen || m.records.empty()) {
    Fail(ErrorCode::kEmptyInput, "manifest has no records: " + path.string());
  }
  return m;
}

void WriteManifest(const Manifest& manifest, const fs::path& path) {
  std::ostringstream out;
  out << "# num_classes=" << manifest.num_classes << "\n";
  out << "image_id,path,gt_label\n";
  const fs::path base = path.parent_path();
  for (const auto& r : manifest.records) {
    fs::path p = r.path;
    if (!base.empty()) {
      const fs::path rel = p.lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    out << r.image_id << "," << p.generic_string() << "," << r.gt_label << "\n";
  }
  WriteFileAtomic(path, out.str());
}

std::vector<uint8_t> ReadFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kMissingFile, "cannot open " + path.string());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

RasterImage DecodeImageBytes(std::span<const uint8_t> bytes) {
  static constexpr uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0) {
    return DecodePng(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '5')) {
    return DecodePnm(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) {
    try {
      return Decode(bytes);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kMalformedStream) {
        Fail(ErrorCode::kDecodeFailed, e.what());
      }
      throw;
    }
  }
  Fail(ErrorCode::kUnsupportedFormat, "unrecognized image format");
}

RasterImage LoadImage(const ImageRecord& record) {
  const auto bytes = ReadFileBytes(record.path);
  try {
    return DecodeImageBytes(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), record.path.string() + ": " + e.what());
  }
}

std::vector<uint8_t> EncodePng(const RasterImage& img) {
  std::vector<uint8_t> interleaved(img.plane_size() * 3);
  for (size_t i = 0; i < img.plane_size(); ++i) {
    for (int c = 0; c < 3; ++c) interleaved[i * 3 + c] = img.plane(c)[i];
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, interleaved.data(),
                                 0, nullptr)) {
    Fail(ErrorCode::kIoError, std::string("PNG encode failed: ") + image.message);
  }
  std::vector<uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0,
                                 interleaved.data(), 0, nullptr)) {
    Fail(ErrorCode::kIoError, std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

std::vector<uint8_t> EncodePpm(const RasterImage& img) {
  const std::string header = "P6\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.plane_size() * 3);
  for (size_t i = 0; i < img.plane_size(); ++i) {
    for (int c = 0; c < 3; ++c) out.push_back(img.plane(c)[i]);
  }
  return out;
}

void WriteFileAtomic(const fs::path& path, std::span<const uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIoError, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) Fail(ErrorCode::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) Fail(ErrorCode::kIoError, "cannot rename into " + path.string());
}

void WriteFileAtomic(const fs::path& path, const std::string& text) {
  WriteFileAtomic(path, std::span<const uint8_t>(
                            reinterpret_cast<const uint8_t*>(text.data()),
                            text.size()));
}

}  // namespace qfs
