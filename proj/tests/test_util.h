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

#ifndef QFS_TESTS_TEST_UTIL_H_
#define QFS_TESTS_TEST_UTIL_H_

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "qfs/dataset_io.h"
#include "qfs/image.h"
#include "qfs/status.h"

namespace qfs::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string name = "qfs_";
    if (info != nullptr) {
      name += std::string(info->test_suite_name()) + "_" + info->name();
    }
    for (char& c : name) {
      if (c == '/') c = '_';
    }
    path_ = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const {
    return path_ / leaf;
  }

 private:
  std::filesystem::path path_;
};

// Writes img_NNN.png files plus manifest.csv and loads the manifest back.
inline Manifest WriteCorpus(const std::filesystem::path& dir,
                            const std::vector<RasterImage>& images,
                            const std::vector<int>& labels, int num_classes) {
  Manifest m;
  m.num_classes = num_classes;
  for (size_t i = 0; i < images.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%03zu.png", i);
    WriteFileAtomic(dir / name, EncodePng(images[i]));
    m.records.push_back({std::string(name, 7), dir / name, labels[i], 0});
  }
  WriteManifest(m, dir / "manifest.csv");
  return LoadManifest(dir / "manifest.csv");
}

}  // namespace qfs::testing

#define EXPECT_QFS_ERROR(statement, expected_code)                       \
  do {                                                                   \
    bool qfs_thrown_ = false;                                            \
    try {                                                                \
      statement;                                                         \
    } catch (const ::qfs::Error& e) {                                    \
      qfs_thrown_ = true;                                                \
      EXPECT_EQ(::qfs::ErrorCodeName(e.code()),                          \
                ::qfs::ErrorCodeName(expected_code))                     \
          << e.what();                                                   \
    }                                                                    \
    EXPECT_TRUE(qfs_thrown_) << "expected " << ::qfs::ErrorCodeName(expected_code); \
  } while (0)

#endif  // QFS_TESTS_TEST_UTIL_H_
