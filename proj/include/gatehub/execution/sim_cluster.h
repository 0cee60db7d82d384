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

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gatehub/execution/executor.h"

namespace gatehub::execution {

struct SimConfig {
  std::uint64_t seed = 42;
  /// Lognormal sigma of true runtime around the estimate; 0 disables noise.
  double sigma = 0.1;
  /// Probability that an attempt exits(1) at a uniform point of its runtime.
  double failure_rate = 0.0;
  /// Size factor applied to synthetic artifacts.
  double size_scale = 1e-3;
};

/// Discrete-event model of batch clusters: per-queue FIFO, a shared core
/// pool per site, per-user caps per queue and hard walltime kills. Time is
/// kept in whole sim-seconds so kills land exactly on start + walltime.
class SimCluster final : public Executor {
 public:
  SimCluster(std::vector<resource::Site> sites, SimConfig config);
  SimCluster(const SimCluster&) = delete;
  SimCluster& operator=(const SimCluster&) = delete;

  Backend backend() const override { return Backend::kSim; }
  std::vector<std::string> sites() const override;
  std::vector<scheduler::QueueOccupancy> poll(const std::string& site) const override;
  ExecutorHandle submit(const SubmitRequest& request) override;
  void cancel(const std::string& job_id) override;
  CollectResult collect(const scheduler::Job& job, const std::string& run_id) override;
  double now() const override { return static_cast<double>(clock_) / 60.0; }
  bool busy() const override;
  std::vector<ExecEvent> wait_events(double max_wait_s) override;

  /// Lower-level entry used by tests: enqueue with an explicit core count and
  /// user, bypassing the Job record.
  struct Submission {
    std::string job_id;
    std::string user;
    int cores = 1;
    std::string site;
    std::string queue;
    double runtime = 0.0;  // estimate, minutes
    std::optional<double> true_runtime;
    int attempt = 1;
    int segment = 1;
    /// Exit 1 at the end of the runtime, like a stub given --fail.
    bool force_fail = false;
  };
  ExecutorHandle submit_sim(const Submission& s);

  /// Processes everything due up to `until` minutes and moves the clock there.
  std::vector<ExecEvent> advance(double until);
  /// Minutes of the next completion, if anything is running.
  std::optional<double> next_event_time() const;

  void set_reachable(const std::string& site, bool reachable);

  /// Every event emitted so far (queued, started and terminal).
  const std::vector<ExecEvent>& trace() const { return trace_; }
  std::string trace_ndjson() const;

 private:
  struct Pending {
    Submission sub;
    std::int64_t runtime_s = 0;
    std::optional<std::int64_t> fail_after_s;
    std::int64_t seq = 0;
  };
  struct Running {
    Pending p;
    std::int64_t start = 0;
    std::int64_t end = 0;
    scheduler::EventKind kind = scheduler::EventKind::kExited;
    int exit_code = 0;
  };
  struct QueueState {
    const resource::Queue* queue = nullptr;
    std::deque<Pending> waiting;
  };
  struct SiteState {
    resource::Site site;
    std::vector<QueueState> queues;
    long used = 0;
    bool reachable = true;
  };

  SiteState& site_state(const std::string& name);
  QueueState& queue_state(SiteState& s, const std::string& queue);
  int user_running(const std::string& site, const std::string& queue, const std::string& user) const;
  void start_ready();
  void emit(ExecEvent e);

  SimConfig config_;
  std::vector<SiteState> sites_;
  std::mt19937_64 rng_;
  std::int64_t clock_ = 0;
  std::int64_t seq_ = 0;
  std::vector<Running> running_;
  std::vector<ExecEvent> pending_events_;
  std::vector<ExecEvent> trace_;
};

}  // namespace gatehub::execution
