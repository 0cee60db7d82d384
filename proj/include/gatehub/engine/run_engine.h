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

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gatehub/execution/executor.h"
#include "gatehub/scheduler/job.h"
#include "gatehub/scheduler/planner.h"
#include "gatehub/scheduler/policy.h"
#include "gatehub/scheduler/summary.h"
#include "gatehub/workflow/workflow.h"

namespace gatehub::engine {

using TransitionSink = std::function<void(const scheduler::Transition&)>;

/// Polls every site of `executor`. Unreachable sites keep their last known
/// entries (or zero idle cores if never seen) with the stale flag set.
scheduler::OccupancySnapshot poll(const execution::Executor& executor, const std::vector<resource::Site>& sites,
                                  const scheduler::OccupancySnapshot& previous = {});

/// Drives one run: promotes jobs whose dependencies finished, plans them
/// onto queues, submits, and applies executor events through the job state
/// machine. Single-threaded; the caller pumps step().
class RunEngine {
 public:
  RunEngine(const workflow::JobSet& jobs, std::string user, std::vector<resource::Site> sites,
            execution::Executor& executor, scheduler::Policy policy, TransitionSink sink = {});

  /// Simulator ground truth for one job, in minutes.
  void set_true_runtime(const std::string& job_id, double minutes);

  /// Promotes root jobs and plans the first round.
  void start();
  /// Waits for and applies one batch of executor events. Returns false
  /// once every job is terminal.
  bool step(double max_wait_s = 0.05);
  /// Pumps step() until the run is complete. Returns false on timeout.
  bool run_to_completion(double timeout_s = 1e9);
  /// Cancels every job that has not reached a terminal state.
  void cancel(const std::string& reason = "run cancelled");

  bool complete() const;
  const std::string& run_id() const { return run_id_; }
  const std::vector<scheduler::Job>& jobs() const { return jobs_; }
  const scheduler::Job& job(const std::string& id) const;
  /// Every transition, in the order it happened.
  const std::vector<scheduler::Transition>& log() const { return log_; }
  scheduler::RunSummary summary() const;
  const scheduler::OccupancySnapshot& snapshot() const { return snapshot_; }
  std::vector<execution::ArtifactRecord> artifacts() const;
  const std::vector<std::string>& downstream(const std::string& id) const;

 private:
  scheduler::Job& mut(const std::string& id);
  void transition(scheduler::Job& job, scheduler::JobState to, const std::string& detail);
  void tick();
  void submit(scheduler::Job& job);
  void deliver(scheduler::Job& job, const scheduler::JobEvent& event);
  void cascade(const scheduler::Job& failed);
  void fail_stalled();
  double queue_walltime(const scheduler::Job& job) const;

  std::string run_id_;
  std::vector<resource::Site> sites_;
  execution::Executor& executor_;
  scheduler::Policy policy_;
  TransitionSink sink_;
  std::vector<scheduler::Job> jobs_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::vector<std::string>> downstream_;
  std::map<std::string, std::vector<execution::ArtifactRecord>> artifacts_;
  std::vector<scheduler::Transition> log_;
  scheduler::OccupancySnapshot snapshot_;
};

}  // namespace gatehub::engine
