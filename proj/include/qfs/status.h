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

#ifndef QFS_STATUS_H_
#define QFS_STATUS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qfs {

// Failure categories surfaced by the library. The CLI prints the name as the
// machine-parseable part of its error line.
enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  kMissingFile,
  kDuplicateId,
  kLabelOutOfRange,
  kUnsupportedFormat,
  kDecodeFailed,
  kMalformedStream,
  kUnsupportedFeature,
  kDimensionTooLarge,
  kShapeMismatch,
  kImageTooSmall,
  kMalformedRow,
  kDuplicateKey,
  kInvalidRank,
  kDegenerateLabels,
  kMissingRank,
  kEmptyInput,
  kNoCandidateQf,
  kModelMismatch,
  kCoverageMismatch,
  kNoData,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace qfs

#endif  // QFS_STATUS_H_
