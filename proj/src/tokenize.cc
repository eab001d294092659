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

#include "fablegen/tokenize.h"

#include "fablegen/text.h"

namespace fablegen::eval {

std::vector<std::string> TokenizeForRouge(std::string_view text) {
  std::vector<std::string> tokens;
  std::u32string chars = DecodeUtf8(text);
  size_t i = 0;
  const size_t n = chars.size();
  while (i < n) {
    while (i < n && IsSpace(chars[i])) ++i;
    size_t start = i;
    while (i < n && !IsSpace(chars[i])) ++i;
    size_t end = i;
    while (start < end && IsPunct(chars[start])) ++start;
    while (end > start && IsPunct(chars[end - 1])) --end;
    if (start == end) continue;
    std::u32string piece;
    piece.reserve(end - start);
    for (size_t k = start; k < end; ++k) piece.push_back(ToLower(chars[k]));
    tokens.push_back(EncodeUtf8(piece));
  }
  return tokens;
}

}  // namespace fablegen::eval
