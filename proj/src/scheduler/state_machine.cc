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

#include "gatehub/scheduler/state_machine.h"

#include <cmath>

#include "gatehub/common/duration.h"
#include "gatehub/common/error.h"

namespace gatehub::scheduler {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kQueued: return "queued";
    case EventKind::kStarted: return "started";
    case EventKind::kExited: return "exited";
    case EventKind::kWalltimeKilled: return "walltime_killed";
    case EventKind::kLost: return "lost";
  }
  return "queued";
}

bool transition_allowed(JobState from, JobState to) {
  using S = JobState;
  switch (from) {
    case S::kCreated: return to == S::kEligible || to == S::kCancelled;
    case S::kEligible: return to == S::kQueued || to == S::kCancelled || to == S::kTerminallyFailed;
    case S::kQueued: return to == S::kRunning || to == S::kFailed || to == S::kCancelled;
    case S::kRunning:
      return to == S::kFinished || to == S::kFailed || to == S::kKilledWalltime || to == S::kQueued ||
             to == S::kCancelled;
    case S::kFailed: return to == S::kQueued || to == S::kTerminallyFailed || to == S::kCancelled;
    case S::kKilledWalltime:
      return to == S::kEligible || to == S::kTerminallyFailed || to == S::kCancelled;
    case S::kFinished:
    case S::kCancelled:
    case S::kTerminallyFailed: return false;
  }
  return false;
}

namespace {

[[noreturn]] void illegal(const Job& job, const JobEvent& event) {
  fail(ErrorCode::kIllegalTransition, "job " + job.id() + ": event " + std::string(to_string(event.kind)) +
                                          " is not legal in state " + std::string(to_string(job.state)));
}

std::string with_detail(std::string head, const std::string& detail) {
  if (detail.empty()) return head;
  return head + ": " + detail;
}

void retry_or_give_up(const Job& job, Outcome& out, Action retry) {
  if (job.attempt < job.max_attempts) {
    out.actions.push_back(retry);
    return;
  }
  out.steps.push_back({JobState::kTerminallyFailed,
                       "attempt " + std::to_string(job.attempt) + "/" + std::to_string(job.max_attempts) +
                           " exhausted"});
  out.actions.push_back({ActionKind::kCancelDownstream});
}

}  // namespace

Outcome on_job_event(const Job& job, const JobEvent& event, const Policy& policy, double queue_walltime) {
  Outcome out;
  switch (event.kind) {
    case EventKind::kQueued:
      if (job.state != JobState::kEligible && job.state != JobState::kFailed) illegal(job, event);
      out.steps.push_back({JobState::kQueued, event.detail});
      break;

    case EventKind::kStarted:
      if (job.state != JobState::kQueued) illegal(job, event);
      out.steps.push_back({JobState::kRunning, event.detail});
      break;

    case EventKind::kExited:
      if (job.state != JobState::kRunning) illegal(job, event);
      if (event.exit_code == 0) {
        const int segments = job.assignment ? job.assignment->segments : 1;
        if (job.segment < segments) {
          out.steps.push_back({JobState::kQueued, "segment " + std::to_string(job.segment) + "/" +
                                                      std::to_string(segments) + " complete"});
          out.actions.push_back({ActionKind::kNextSegment});
        } else {
          out.steps.push_back({JobState::kFinished, event.detail});
        }
        break;
      }
      out.steps.push_back({JobState::kFailed, with_detail("exit code " + std::to_string(event.exit_code), event.detail)});
      retry_or_give_up(job, out, {ActionKind::kResubmit});
      break;

    case EventKind::kWalltimeKilled: {
      if (job.state != JobState::kRunning) illegal(job, event);
      out.steps.push_back({JobState::kKilledWalltime,
                           with_detail("walltime " + format_duration_minutes(queue_walltime) + " reached", event.detail)});
      Action replan{ActionKind::kReplan};
      replan.inflated_runtime = job.estimate.runtime * policy.inflation;
      replan.min_walltime_exclusive = queue_walltime;
      retry_or_give_up(job, out, replan);
      break;
    }

    case EventKind::kLost:
      if (job.state != JobState::kQueued && job.state != JobState::kRunning) illegal(job, event);
      out.steps.push_back({JobState::kFailed, with_detail("lost", event.detail)});
      retry_or_give_up(job, out, {ActionKind::kResubmit});
      break;
  }
  return out;
}

}  // namespace gatehub::scheduler
