// Copyright 2026 The Fablegen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared helpers for the test binaries.
//
// Golden files are compared byte for byte. Run with FABLEGEN_UPDATE_GOLDEN=1
// to rewrite them, then review the diff before committing.

#ifndef FABLEGEN_TESTS_TEST_UTIL_H_
#define FABLEGEN_TESTS_TEST_UTIL_H_

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <unistd.h>

#include "fablegen/corpus.h"

namespace fablegen::testing {

inline std::filesystem::path SourceDir() { return FABLEGEN_SOURCE_DIR; }
inline std::filesystem::path FixtureDir() { return SourceDir() / "tests" / "fixtures"; }
inline std::filesystem::path GoldenDir() { return SourceDir() / "tests" / "golden"; }

inline std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::filesystem::path &path, const std::string &text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline const corpus::Corpus &FixtureCorpus() {
  static const corpus::Corpus c =
      corpus::LoadCorpus(FixtureDir() / "corpus", corpus::FormatProfile::kCanonicalJson);
  return c;
}

inline std::shared_ptr<const corpus::Corpus> SharedFixtureCorpus() {
  static const auto c = std::make_shared<const corpus::Corpus>(FixtureCorpus());
  return c;
}

inline bool UpdateGolden() {
  const char *v = std::getenv("FABLEGEN_UPDATE_GOLDEN");
  return v != nullptr && std::string(v) == "1";
}

// Returns the expected text. In update mode the file is rewritten with
// `actual` first, so the comparison passes.
inline std::string Golden(const std::filesystem::path &path, const std::string &actual) {
  if (UpdateGolden()) WriteFile(path, actual);
  return ReadFile(path);
}

// Fresh directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("fablegen-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fablegen::testing

#endif  // FABLEGEN_TESTS_TEST_UTIL_H_
