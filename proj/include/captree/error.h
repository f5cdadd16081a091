// Copyright 2026 The captree Authors.
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


#ifndef CAPTREE_ERROR_H_
#define CAPTREE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace captree {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyCaption,
  kNoNounPhrase,
  kInvalidConstraint,
  kMissingFile,
  kMalformedRecord,
  kUnknownWord,
  kOracleUnavailable,
  kRemoteUnavailable,
  kEmptyInput,
  kIndexOutOfRange,
  kNonSquare,
  kEmptyTree,
  kIdenticalTexts,
  kUndiffable,
  kShapeMismatch,
  kEmptyDataset,
  kNoFailure,
  kParse,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. The code
// lets callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  // The message without the code prefix what() carries.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace captree

#endif  // CAPTREE_ERROR_H_
