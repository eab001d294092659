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

#ifndef FABLEGEN_ERROR_H_
#define FABLEGEN_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fablegen {

enum class ErrorCode {
  kInvalidArgument,     // precondition violation
  kParse,               // malformed input file or record
  kValidation,          // one or more invariant violations
  kNotFound,
  kAnnotation,          // annotation backend failure
  kGeneration,          // question/answer generation failure
  kBackendUnavailable,  // learned backend cannot be loaded or trained here
  kRanker,
  kConflict,
  kInternal,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported with this exception type. Validation
// errors carry every violation found, not only the first one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message,
        std::vector<std::string> details = {})
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const { return code_; }
  const std::vector<std::string> &details() const { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

inline void Require(bool condition, const std::string &message) {
  if (!condition) throw Error(ErrorCode::kInvalidArgument, message);
}

}  // namespace fablegen

#endif  // FABLEGEN_ERROR_H_
