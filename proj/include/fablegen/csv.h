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

#ifndef FABLEGEN_CSV_H_
#define FABLEGEN_CSV_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fablegen {

// RFC 4180 subset: comma separated, double-quoted fields with "" escapes,
// quoted fields may span lines. Throws kParse on an unterminated quote.
std::vector<std::vector<std::string>> ParseCsv(std::string_view text);

// First row is the header. Rows shorter than the header are padded.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // -1 when absent. Header names are compared case-insensitively.
  int Column(std::string_view name) const;
};

CsvTable ParseCsvTable(std::string_view text);

std::string CsvEscape(std::string_view field);
std::string CsvRow(const std::vector<std::string> &fields);

}  // namespace fablegen

#endif  // FABLEGEN_CSV_H_
