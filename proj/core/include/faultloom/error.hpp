// Copyright 2026 The FaultLoom Authors.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace faultloom {

// Every failure surfaced by the library carries one of these codes so callers
// (and the CLI's exit status) can branch without parsing messages.
enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kMalformedDocument,
  // taxonomy
  kDuplicateId,
  kDuplicateName,
  kMissingDefinition,
  kLevelViolation,
  kCycle,
  kNoMatch,
  kAmbiguousMatch,
  kNotInTaxonomy,
  // corpus
  kMalformedRecord,
  kDuplicateKey,
  kTimestampOrder,
  kInsufficientStratum,
  kNetwork,
  kAuth,
  kRateLimited,
  // llm gateway
  kUnknownModel,
  kMissingCredentials,
  kProviderRejected,
  kRetriesExhausted,
  kReplayMiss,
  kNoStructuredObject,
  kMissingField,
  // stages
  kEmptyPlan,
  kEmptyReference,
  kMissingGold,
  kNothingToScore,
  kUnresolvableGold,
  // orchestration
  kConfig,
  kMissingArtifact,
  kArtifactConflict,
  kRunLocked,
  kStageFailed,
  kInternal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {});

  ErrorCode code() const noexcept { return code_; }
  // The offending id, key, digest or path, when there is one.
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace faultloom
