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

#include "faultloom/error.hpp"

namespace faultloom {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMalformedDocument: return "malformed_document";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kDuplicateName: return "duplicate_name";
    case ErrorCode::kMissingDefinition: return "missing_definition";
    case ErrorCode::kLevelViolation: return "level_violation";
    case ErrorCode::kCycle: return "cycle";
    case ErrorCode::kNoMatch: return "no_match";
    case ErrorCode::kAmbiguousMatch: return "ambiguous_match";
    case ErrorCode::kNotInTaxonomy: return "not_in_taxonomy";
    case ErrorCode::kMalformedRecord: return "malformed_record";
    case ErrorCode::kDuplicateKey: return "duplicate_key";
    case ErrorCode::kTimestampOrder: return "timestamp_order";
    case ErrorCode::kInsufficientStratum: return "insufficient_stratum";
    case ErrorCode::kNetwork: return "network";
    case ErrorCode::kAuth: return "auth";
    case ErrorCode::kRateLimited: return "rate_limited";
    case ErrorCode::kUnknownModel: return "unknown_model";
    case ErrorCode::kMissingCredentials: return "missing_credentials";
    case ErrorCode::kProviderRejected: return "provider_rejected";
    case ErrorCode::kRetriesExhausted: return "retries_exhausted";
    case ErrorCode::kReplayMiss: return "replay_miss";
    case ErrorCode::kNoStructuredObject: return "no_structured_object";
    case ErrorCode::kMissingField: return "missing_field";
    case ErrorCode::kEmptyPlan: return "empty_plan";
    case ErrorCode::kEmptyReference: return "empty_reference";
    case ErrorCode::kMissingGold: return "missing_gold";
    case ErrorCode::kNothingToScore: return "nothing_to_score";
    case ErrorCode::kUnresolvableGold: return "unresolvable_gold";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kMissingArtifact: return "missing_artifact";
    case ErrorCode::kArtifactConflict: return "artifact_conflict";
    case ErrorCode::kRunLocked: return "run_locked";
    case ErrorCode::kStageFailed: return "stage_failed";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

Error::Error(ErrorCode code, std::string message, std::string subject)
    : std::runtime_error(std::move(message)), code_(code), subject_(std::move(subject)) {}

}  // namespace faultloom
