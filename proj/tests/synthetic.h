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

// Synthetic training sets for the learned components.

#ifndef FABLEGEN_TESTS_SYNTHETIC_H_
#define FABLEGEN_TESTS_SYNTHETIC_H_

#include <random>
#include <string>
#include <vector>

#include "fablegen/qgen.h"
#include "fablegen/ranker.h"

namespace fablegen::testing {

inline std::string RandomWords(std::mt19937 &rng, int n) {
  static const char *kWords[] = {"fox",  "hen",   "mill", "river", "boat",  "cow",
                                 "bread", "lamp", "wind", "stone", "house", "field",
                                 "went", "saw",   "took", "gave",  "ran",   "sang"};
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? " " : "") + std::string(kWords[rng() % 18]);
  return s;
}

// Positives carry the token "zqxv" in the question and nowhere else, so only
// a layout that includes the question can separate the classes.
inline std::vector<ranker::RankingExample> SentinelDataset(uint64_t seed, int groups = 40,
                                                           int per_group = 6) {
  std::mt19937 rng(static_cast<uint32_t>(seed));
  std::vector<ranker::RankingExample> out;
  for (int g = 0; g < groups; ++g) {
    const std::string section = RandomWords(rng, 20);
    for (int i = 0; i < per_group; ++i) {
      ranker::RankingExample e;
      e.section_text = section;
      e.label = i % 2;
      e.question = "what " + RandomWords(rng, 3) + (e.label ? " zqxv" : "") + "?";
      e.answer = RandomWords(rng, 3);
      e.group = "synthetic:" + std::to_string(g);
      out.push_back(std::move(e));
    }
  }
  return out;
}

// Ten pairs whose target repeats the first words of the input.
inline std::vector<qgen::TrainingPair> CopyTask() {
  std::mt19937 rng(41);
  std::vector<qgen::TrainingPair> out;
  for (int i = 0; i < 10; ++i) {
    const std::string answer = RandomWords(rng, 3);
    out.push_back({answer + " <sep> " + RandomWords(rng, 12), answer});
  }
  return out;
}

}  // namespace fablegen::testing

#endif  // FABLEGEN_TESTS_SYNTHETIC_H_
