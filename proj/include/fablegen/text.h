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

// Small UTF-8 and string helpers shared by every module.

#ifndef FABLEGEN_TEXT_H_
#define FABLEGEN_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fablegen {

// Decodes UTF-8 into Unicode scalar values. Invalid bytes decode to U+FFFD.
std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view text);
void AppendUtf8(char32_t c, std::string *out);

// Unicode-aware only for ASCII; other scalar values are treated as letters.
bool IsSpace(char32_t c);
bool IsPunct(char32_t c);
bool IsUpper(char32_t c);
bool IsDigit(char32_t c);
char32_t ToLower(char32_t c);

std::string ToLower(std::string_view text);
std::string Trim(std::string_view text);
std::string TrimRight(std::string_view text);
std::vector<std::string> SplitWhitespace(std::string_view text);
std::vector<std::string> Split(std::string_view text, char delim);
std::string Join(const std::vector<std::string> &parts, std::string_view sep);
bool StartsWith(std::string_view text, std::string_view prefix);

// Stable 64-bit FNV-1a; used wherever hashes must agree across platforms.
uint64_t Fnv1a(std::string_view text, uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace fablegen

#endif  // FABLEGEN_TEXT_H_
