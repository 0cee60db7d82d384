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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatehub/resource/model.h"
#include "gatehub/workflow/workflow.h"

namespace gatehub::scheduler {

enum class JobState {
  kCreated,
  kEligible,
  kQueued,
  kRunning,
  kFinished,
  kFailed,
  kKilledWalltime,
  kCancelled,
  kTerminallyFailed,
};

inline constexpr JobState kAllJobStates[] = {
    JobState::kCreated,  JobState::kEligible,       JobState::kQueued,
    JobState::kRunning,  JobState::kFinished,       JobState::kFailed,
    JobState::kKilledWalltime, JobState::kCancelled, JobState::kTerminallyFailed,
};

std::string_view to_string(JobState s);
JobState job_state_from_string(std::string_view s);

/// finished, cancelled and terminally_failed never change again.
bool is_terminal(JobState s);

/// The attempt ended badly: what the faulty-job filter reports.
bool is_faulty(JobState s);

struct Assignment {
  std::string job_id;
  std::string site;
  std::string queue;
  int segments = 1;
  double segment_runtime = 0.0;

  std::string queue_key() const { return site + "/" + queue; }
  bool operator==(const Assignment&) const = default;
};

/// One line of the audit trail.
struct Transition {
  double ts = 0.0;
  std::string job;
  JobState from = JobState::kCreated;
  JobState to = JobState::kCreated;
  std::string detail;
  int attempt = 1;
  std::string queue;  // "site/queue" when assigned

  bool operator==(const Transition&) const = default;
};

struct Job {
  workflow::JobSpec spec;
  std::string user;
  resource::Estimate estimate;
  JobState state = JobState::kCreated;
  std::optional<Assignment> assignment;
  int attempt = 1;
  int max_attempts = 3;
  int segment = 1;
  /// Set after a walltime kill: the next queue must be strictly longer.
  double min_walltime_exclusive = 0.0;
  bool pin_active = true;
  /// Simulator ground truth, overriding the noisy draw around the estimate.
  std::optional<double> true_runtime;
  std::vector<Transition> history;

  const std::string& id() const { return spec.id; }
};

Job make_job(workflow::JobSpec spec, std::string user, int max_attempts);

}  // namespace gatehub::scheduler
