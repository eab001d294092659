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

#ifndef FABLEGEN_SHUFFLE_H_
#define FABLEGEN_SHUFFLE_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace fablegen {

// Fisher-Yates over mt19937_64. Unlike std::shuffle the permutation is the
// same on every standard library.
template <typename T>
void SeededShuffle(std::vector<T> *items, uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (size_t i = items->size(); i > 1; --i) {
    std::swap((*items)[i - 1], (*items)[rng() % i]);
  }
}

}  // namespace fablegen

#endif  // FABLEGEN_SHUFFLE_H_
