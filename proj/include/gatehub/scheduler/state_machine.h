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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gatehub/scheduler/job.h"
#include "gatehub/scheduler/policy.h"

namespace gatehub::scheduler {

enum class EventKind { kQueued, kStarted, kExited, kWalltimeKilled, kLost };

std::string_view to_string(EventKind k);

struct JobEvent {
  EventKind kind = EventKind::kQueued;
  int exit_code = 0;
  std::string detail;
};

enum class ActionKind {
  /// Same queue, attempt + 1.
  kResubmit,
  /// Back to eligible with an inflated estimate and a strictly longer queue.
  kReplan,
  /// Submit the next checkpoint segment.
  kNextSegment,
  /// Cancel every job downstream of this one.
  kCancelDownstream,
};

struct Action {
  ActionKind kind;
  double inflated_runtime = 0.0;
  double min_walltime_exclusive = 0.0;
};

struct Step {
  JobState to;
  std::string detail;
};

struct Outcome {
  std::vector<Step> steps;
  std::vector<Action> actions;

  JobState final_state(JobState current) const { return steps.empty() ? current : steps.back().to; }
};

/// Edges of the job state machine.
bool transition_allowed(JobState from, JobState to);

/// Pure: decides the transitions and follow-up actions for an executor or
/// scheduler event. Throws kIllegalTransition when the event is not legal
/// in the job's current state. `queue_walltime` is the walltime of the
/// job's current queue (used for walltime-kill remediation).
Outcome on_job_event(const Job& job, const JobEvent& event, const Policy& policy,
                     double queue_walltime = 0.0);

}  // namespace gatehub::scheduler
