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

#include "qfs/image.h"

#include "qfs/status.h"

namespace qfs {

RasterImage::RasterImage(int width, int height, uint8_t fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    Fail(ErrorCode::kInvalidArgument, "negative image dimensions");
  }
  data_.assign(static_cast<size_t>(kChannels) * width * height, fill);
}

std::vector<double> LumaPlane(const RasterImage& img) {
  std::vector<double> luma(img.plane_size());
  auto r = img.plane(0);
  auto g = img.plane(1);
  auto b = img.plane(2);
  for (size_t i = 0; i < luma.size(); ++i) {
    luma[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  }
  return luma;
}

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kDecodeFailed: return "DecodeFailed";
    case ErrorCode::kMalformedStream: return "MalformedStream";
    case ErrorCode::kUnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::kDimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kImageTooSmall: return "ImageTooSmall";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kInvalidRank: return "InvalidRank";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kMissingRank: return "MissingRank";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNoCandidateQf: return "NoCandidateQf";
    case ErrorCode::kModelMismatch: return "ModelMismatch";
    case ErrorCode::kCoverageMismatch: return "CoverageMismatch";
    case ErrorCode::kNoData: return "NoData";
  }
  return "Unknown";
}

}  // namespace qfs
