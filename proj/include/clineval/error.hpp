// Copyright 2026 The clineval Authors.
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

#ifndef CLINEVAL_ERROR_HPP_
#define CLINEVAL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace clineval {

enum class Errc {
  kIoError,
  kParseError,
  kDuplicateId,
  kMissingField,
  kNegativeCount,
  kCountInconsistent,
  kUnknownPair,
  kNaNValue,
  kInvalidWindow,
  kInvalidN,
  kHeaderMismatch,
  kDimMismatch,
  kDuplicateKey,
  kZeroVector,
  kTokenMismatch,
  kProviderError,
  kEmptyDocument,
  kLengthMismatch,
  kUndefinedScore,
  kEmptyCorpus,
  kMissingPair,
  kEmptyTarget,
  kEmptyText,
  kDegenerateColumn,
  kMissingMember,
  kDegenerateInput,
  kNoSharedMetrics,
  kConfigError,
  kNoOverlap,
  kInsufficientAnnotators,
};

inline std::string_view ErrcName(Errc code) {
  switch (code) {
    case Errc::kIoError: return "IoError";
    case Errc::kParseError: return "ParseError";
    case Errc::kDuplicateId: return "DuplicateId";
    case Errc::kMissingField: return "MissingField";
    case Errc::kNegativeCount: return "NegativeCount";
    case Errc::kCountInconsistent: return "CountInconsistent";
    case Errc::kUnknownPair: return "UnknownPair";
    case Errc::kNaNValue: return "NaNValue";
    case Errc::kInvalidWindow: return "InvalidWindow";
    case Errc::kInvalidN: return "InvalidN";
    case Errc::kHeaderMismatch: return "HeaderMismatch";
    case Errc::kDimMismatch: return "DimMismatch";
    case Errc::kDuplicateKey: return "DuplicateKey";
    case Errc::kZeroVector: return "ZeroVector";
    case Errc::kTokenMismatch: return "TokenMismatch";
    case Errc::kProviderError: return "ProviderError";
    case Errc::kEmptyDocument: return "EmptyDocument";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kUndefinedScore: return "UndefinedScore";
    case Errc::kEmptyCorpus: return "EmptyCorpus";
    case Errc::kMissingPair: return "MissingPair";
    case Errc::kEmptyTarget: return "EmptyTarget";
    case Errc::kEmptyText: return "EmptyText";
    case Errc::kDegenerateColumn: return "DegenerateColumn";
    case Errc::kMissingMember: return "MissingMember";
    case Errc::kDegenerateInput: return "DegenerateInput";
    case Errc::kNoSharedMetrics: return "NoSharedMetrics";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kNoOverlap: return "NoOverlap";
    case Errc::kInsufficientAnnotators: return "InsufficientAnnotators";
  }
  return "Unknown";
}

// All library failures are reported as Error; `code()` identifies the kind.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(ErrcName(code)) + ": " + detail),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace clineval

#endif  // CLINEVAL_ERROR_HPP_
