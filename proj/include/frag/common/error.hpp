/*
 * Copyright 2026 The FRAG Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FRAG_COMMON_ERROR_HPP_
#define FRAG_COMMON_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace frag {

// Numeric values travel in ERROR frames; never renumber existing entries.
enum class ErrorCode : std::uint16_t {
  kInvalidParams = 1,
  kPlaintextOutOfRange = 2,
  kDegreeUnsupported = 3,
  kParamsMismatch = 4,
  kScaleMismatch = 5,
  kDegreeMismatch = 6,
  kDepthExceeded = 7,
  kMalformedFrame = 8,
  kInvalidShareCount = 9,
  kShareSetIncomplete = 10,
  kCommitmentMismatch = 11,
  kInvalidConfig = 12,
  kRepresentationOverflow = 13,
  kZeroPoolEmpty = 14,
  kDivideByZeroScale = 15,
  kDuplicateId = 16,
  kDimMismatch = 17,
  kIoError = 18,
  kMalformedFile = 19,
  kNodeUnreachable = 20,
  kUnknownMode = 21,
  kDuplicatePartial = 22,
  kContractViolation = 23,
  kBindFailure = 24,
  kUnknownSuite = 25,
  kUsage = 26,
  kScaleOverflow = 27,
  kInternal = 99,
};

// Upper-snake name, e.g. "PARAMS_MISMATCH".
std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace frag

#endif  // FRAG_COMMON_ERROR_HPP_
