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

#include "qfs/qf_set.h"

#include <algorithm>
#include <charconv>

#include "qfs/status.h"

namespace qfs {

QfSet::QfSet(std::vector<int> values) : values_(std::move(values)) {
  for (size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] < 1 || values_[i] > 100) {
      Fail(ErrorCode::kInvalidArgument,
           "quality factor out of range: " + std::to_string(values_[i]));
    }
    if (i > 0 && values_[i] <= values_[i - 1]) {
      Fail(ErrorCode::kInvalidArgument, "QF set must be strictly ascending");
    }
  }
}

QfSet QfSet::Default() { return QfSet({10, 20, 30, 40, 50, 60, 70, 80, 90}); }

QfSet QfSet::Parse(std::string_view text) {
  std::vector<int> values;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view tok = text.substr(pos, comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      Fail(ErrorCode::kInvalidArgument, "bad QF list: '" + std::string(text) + "'");
    }
    values.push_back(v);
    pos = comma + 1;
  }
  return QfSet(std::move(values));
}

bool QfSet::Contains(int qf) const { return IndexOf(qf) >= 0; }

int QfSet::IndexOf(int qf) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), qf);
  if (it == values_.end() || *it != qf) return -1;
  return static_cast<int>(it - values_.begin());
}

int QfSet::Max() const {
  if (values_.empty()) Fail(ErrorCode::kNoCandidateQf, "NoCandidateQf: empty QF set");
  return values_.back();
}

std::string QfSet::ToString() const {
  std::string out;
  for (size_t i = 0; i < values_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(values_[i]);
  }
  return out;
}

}  // namespace qfs
