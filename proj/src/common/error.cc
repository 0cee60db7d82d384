// Copyright 2026 The GateHub Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gatehub/common/error.h"

namespace gatehub {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kCycle: return "CycleError";
    case ErrorCode::kUnboundNode: return "UnboundNode";
    case ErrorCode::kUnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorCode::kMalformedTemplate: return "MalformedTemplate";
    case ErrorCode::kUnknownProfile: return "UnknownProfile";
    case ErrorCode::kEmptyAxis: return "EmptyAxis";
    case ErrorCode::kInvalidSweep: return "InvalidSweep";
    case ErrorCode::kInvalidBinding: return "InvalidBinding";
    case ErrorCode::kValidationFailed: return "ValidationFailed";
    case ErrorCode::kMissingArtifact: return "MissingArtifact";
    case ErrorCode::kNonPositiveScale: return "NonPositiveScale";
    case ErrorCode::kNoObservations: return "NoObservations";
    case ErrorCode::kUnschedulable: return "Unschedulable";
    case ErrorCode::kNotCheckpointable: return "NotCheckpointable";
    case ErrorCode::kIllegalTransition: return "IllegalTransition";
    case ErrorCode::kUnknownRun: return "UnknownRun";
    case ErrorCode::kSpawnError: return "SpawnError";
    case ErrorCode::kStagingError: return "StagingError";
    case ErrorCode::kUnknownQueue: return "UnknownQueue";
    case ErrorCode::kMissingCheckpoint: return "MissingCheckpoint";
    case ErrorCode::kSiteUnreachable: return "SiteUnreachable";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kVersionConflict: return "VersionConflict";
    case ErrorCode::kPermissionDenied: return "PermissionDenied";
    case ErrorCode::kUnauthenticated: return "Unauthenticated";
  }
  return "Unknown";
}

}  // namespace gatehub
