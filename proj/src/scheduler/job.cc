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

#include "gatehub/scheduler/job.h"

#include "gatehub/common/duration.h"
#include "gatehub/common/error.h"
#include "gatehub/scheduler/policy.h"

namespace gatehub::scheduler {

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::kCreated: return "created";
    case JobState::kEligible: return "eligible";
    case JobState::kQueued: return "queued";
    case JobState::kRunning: return "running";
    case JobState::kFinished: return "finished";
    case JobState::kFailed: return "failed";
    case JobState::kKilledWalltime: return "killed_walltime";
    case JobState::kCancelled: return "cancelled";
    case JobState::kTerminallyFailed: return "terminally_failed";
  }
  return "created";
}

JobState job_state_from_string(std::string_view s) {
  for (auto state : kAllJobStates) {
    if (to_string(state) == s) return state;
  }
  fail(ErrorCode::kParseError, "unknown job state '" + std::string(s) + "'");
}

bool is_terminal(JobState s) {
  return s == JobState::kFinished || s == JobState::kCancelled || s == JobState::kTerminallyFailed;
}

bool is_faulty(JobState s) {
  return s == JobState::kFailed || s == JobState::kKilledWalltime || s == JobState::kTerminallyFailed;
}

Job make_job(workflow::JobSpec spec, std::string user, int max_attempts) {
  Job job;
  job.estimate = spec.estimate;
  job.spec = std::move(spec);
  job.user = std::move(user);
  job.max_attempts = max_attempts;
  return job;
}

Policy policy_from_json(const nlohmann::json& j) {
  Policy p;
  if (j.is_null()) return p;
  if (!j.is_object()) fail(ErrorCode::kParseError, "policy: expected object");
  auto number = [&j](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) fail(ErrorCode::kParseError, std::string("policy.") + key + ": expected number");
    out = j[key].get<double>();
  };
  number("safety", p.safety);
  number("inflation", p.inflation);
  if (j.contains("max_attempts")) {
    if (!j["max_attempts"].is_number_integer()) fail(ErrorCode::kParseError, "policy.max_attempts: expected integer");
    p.max_attempts = j["max_attempts"].get<int>();
  }
  if (j.contains("poll_period")) {
    if (!j["poll_period"].is_string()) fail(ErrorCode::kParseError, "policy.poll_period: expected duration string");
    p.poll_period_s = parse_duration_minutes(j["poll_period"].get<std::string>()) * 60.0;
  }
  if (p.safety < 1.0) fail(ErrorCode::kInvariantViolation, "policy.safety must be >= 1");
  if (p.inflation < 1.0) fail(ErrorCode::kInvariantViolation, "policy.inflation must be >= 1");
  if (p.max_attempts < 1) fail(ErrorCode::kInvariantViolation, "policy.max_attempts must be >= 1");
  if (!(p.poll_period_s > 0)) fail(ErrorCode::kInvariantViolation, "policy.poll_period must be > 0");
  return p;
}

nlohmann::json to_json(const Policy& p) {
  return {{"safety", p.safety},
          {"max_attempts", p.max_attempts},
          {"inflation", p.inflation},
          {"poll_period", format_duration_minutes(p.poll_period_s / 60.0)}};
}

}  // namespace gatehub::scheduler
