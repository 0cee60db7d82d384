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

#pragma once

#include <string_view>

#include "gatehub/repository/store.h"

namespace gatehub::service {

/// Every authenticated operation of the HTTP API.
enum class Action {
  kWhoAmI,
  kListUsers,
  kCreateUser,
  kUpdateUser,
  kDeleteUser,
  kListTemplates,
  kGetTemplate,
  kCreateTemplate,
  kPublishTemplate,
  kCloneTemplate,
  kCatalog,
  kListSites,
  kOccupancy,
  kCreateRun,
  kListRuns,
  kGetRun,
  kRunSummary,
  kCancelRun,
  kRerunFaulty,
  kListJobs,
  kGetJob,
  kJobEvents,
  kListArtifacts,
  kDownloadArtifact,
};

inline constexpr Action kAllActions[] = {
    Action::kWhoAmI,         Action::kListUsers,     Action::kCreateUser,    Action::kUpdateUser,
    Action::kDeleteUser,     Action::kListTemplates, Action::kGetTemplate,   Action::kCreateTemplate,
    Action::kPublishTemplate, Action::kCloneTemplate, Action::kCatalog,      Action::kListSites,
    Action::kOccupancy,      Action::kCreateRun,     Action::kListRuns,      Action::kGetRun,
    Action::kRunSummary,     Action::kCancelRun,     Action::kRerunFaulty,   Action::kListJobs,
    Action::kGetJob,         Action::kJobEvents,     Action::kListArtifacts, Action::kDownloadArtifact,
};

std::string_view to_string(Action a);

/// The role matrix. User management is admin-only, authoring and publishing
/// templates needs power_user or above, everything else is open to every
/// signed-in role. Ownership rules (own runs, own drafts) apply on top.
bool allowed(Action action, repository::Role role);

}  // namespace gatehub::service
