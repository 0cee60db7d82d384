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

#include "gatehub/service/permissions.h"

namespace gatehub::service {

using repository::Role;

std::string_view to_string(Action a) {
  switch (a) {
    case Action::kWhoAmI: return "whoami";
    case Action::kListUsers: return "list_users";
    case Action::kCreateUser: return "create_user";
    case Action::kUpdateUser: return "update_user";
    case Action::kDeleteUser: return "delete_user";
    case Action::kListTemplates: return "list_templates";
    case Action::kGetTemplate: return "get_template";
    case Action::kCreateTemplate: return "create_template";
    case Action::kPublishTemplate: return "publish_template";
    case Action::kCloneTemplate: return "clone_template";
    case Action::kCatalog: return "catalog";
    case Action::kListSites: return "list_sites";
    case Action::kOccupancy: return "occupancy";
    case Action::kCreateRun: return "create_run";
    case Action::kListRuns: return "list_runs";
    case Action::kGetRun: return "get_run";
    case Action::kRunSummary: return "run_summary";
    case Action::kCancelRun: return "cancel_run";
    case Action::kRerunFaulty: return "rerun_faulty";
    case Action::kListJobs: return "list_jobs";
    case Action::kGetJob: return "get_job";
    case Action::kJobEvents: return "job_events";
    case Action::kListArtifacts: return "list_artifacts";
    case Action::kDownloadArtifact: return "download_artifact";
  }
  return "unknown";
}

bool allowed(Action action, Role role) {
  switch (action) {
    case Action::kListUsers:
    case Action::kCreateUser:
    case Action::kUpdateUser:
    case Action::kDeleteUser:
      return role == Role::kAdmin;
    case Action::kCreateTemplate:
    case Action::kPublishTemplate:
      return role == Role::kAdmin || role == Role::kPowerUser;
    default:
      return true;
  }
}

}  // namespace gatehub::service
