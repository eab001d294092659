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

// Contents of data/*.{tsv,txt}; definitions are generated at configure time.

#ifndef FABLEGEN_EMBEDDED_DATA_H_
#define FABLEGEN_EMBEDDED_DATA_H_

#include <string_view>

namespace fablegen::data {

extern const std::string_view kLexiconTsv;
extern const std::string_view kEmotionsTxt;
extern const std::string_view kPlacesTxt;
extern const std::string_view kTimesTxt;

}  // namespace fablegen::data

#endif  // FABLEGEN_EMBEDDED_DATA_H_
