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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "gatehub/scheduler/job.h"

namespace gatehub::scheduler {

struct FaultyAttempt {
  std::string job;
  std::string node;
  int attempt = 1;
  JobState state = JobState::kFailed;
  std::string detail;
  std::string queue;
  double ts = 0.0;

  bool operator==(const FaultyAttempt&) const = default;
};

struct RunSummary {
  std::string run_id;
  int total = 0;
  std::map<JobState, int> counts;  // non-zero entries only
  std::vector<FaultyAttempt> faulty;
  bool complete = false;

  bool operator==(const RunSummary&) const = default;
};

struct JobRef {
  std::string id;
  std::string node;
};

/// Replays an audit trail over the run's job list. Jobs that never
/// transitioned count as created. Every attempt that ended failed or
/// killed_walltime, and every terminal failure not preceded by one, is
/// listed as faulty.
RunSummary summarize(const std::string& run_id, const std::vector<JobRef>& jobs,
                     const std::vector<Transition>& events);

RunSummary summarize(const std::string& run_id, const std::vector<Job>& jobs);

/// Final state per job after replaying `events`.
std::map<std::string, JobState> replay_states(const std::vector<JobRef>& jobs,
                                              const std::vector<Transition>& events);

nlohmann::ordered_json to_json(const RunSummary& s);
RunSummary summary_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Newline-delimited JSON audit trail: {ts, job, from, to, detail, attempt, queue}

std::string to_ndjson(const Transition& t);
Transition transition_from_json(const nlohmann::json& j);

/// Reads an event log. A torn final line (crash mid-write) is ignored;
/// malformed earlier lines throw kParseError.
std::vector<Transition> read_event_log(const std::filesystem::path& path);

}  // namespace gatehub::scheduler
