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

#ifndef QFS_QF_SET_H_
#define QFS_QF_SET_H_

#include <string>
#include <string_view>
#include <vector>

namespace qfs {

// Strictly ascending list of quality factors in [1, 100]. A calibrated set
// may be empty; user-supplied candidate sets may not (see Parse).
class QfSet {
 public:
  QfSet() = default;
  // Throws kInvalidArgument if not strictly ascending or out of range.
  explicit QfSet(std::vector<int> values);

  // {10, 20, ..., 90}.
  static QfSet Default();
  // Comma list such as "10,20,30". Throws kInvalidArgument on empty input.
  static QfSet Parse(std::string_view text);

  const std::vector<int>& values() const { return values_; }
  size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  int operator[](size_t i) const { return values_[i]; }
  bool Contains(int qf) const;
  // Index of qf, or -1.
  int IndexOf(int qf) const;
  int Max() const;

  std::string ToString() const;

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }
  bool operator==(const QfSet&) const = default;

 private:
  std::vector<int> values_;
};

}  // namespace qfs

#endif  // QFS_QF_SET_H_
