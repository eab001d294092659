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

#ifndef FABLEGEN_TOKENIZE_H_
#define FABLEGEN_TOKENIZE_H_

#include <string>
#include <string_view>
#include <vector>

namespace fablegen::eval {

// Metric tokenizer. Lowercases, splits on whitespace, strips leading and
// trailing punctuation from each piece and drops pieces that end up empty.
// No stemming. Corpus statistics count tokens with this same function.
std::vector<std::string> TokenizeForRouge(std::string_view text);

}  // namespace fablegen::eval

#endif  // FABLEGEN_TOKENIZE_H_
