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

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "gatehub/engine/run_engine.h"
#include "gatehub/execution/local_executor.h"
#include "gatehub/execution/sim_cluster.h"
#include "gatehub/repository/store.h"

namespace gatehub::service {

struct RunRequest {
  std::string template_name;
  std::optional<int> version;
  /// Axes replace same-named axes or constants; constants replace likewise.
  workflow::SweepSpec sweep;
  std::string backend = "sim";
  std::uint64_t seed = 42;
  std::optional<scheduler::Policy> policy;
  double sim_sigma = 0.1;
  double sim_failure_rate = 0.0;
  /// Simulator ground-truth runtime per node id, minutes.
  std::map<std::string, double> true_runtime;
  std::string idempotency_key;
  /// Restrict to these sweep points (used when re-running faulty work).
  std::optional<std::set<std::size_t>> points;
  /// Explicit run id; generated when empty.
  std::string run_id;
};

/// Published templates are visible to everyone; drafts to their owner and admins.
bool template_visible(const repository::TemplateEntry& t, const repository::User& user);

/// The requested version, or the newest version the user can see.
std::optional<repository::TemplateEntry> resolve_template(const repository::Store& store, const std::string& name,
                                                          std::optional<int> version, const repository::User& user);

/// Template sweep with the request's axes and constants applied.
workflow::SweepSpec merge_sweep(const workflow::SweepSpec& base, const workflow::SweepSpec& overrides);

/// Validates the request against the template and builds the record to
/// persist. Throws kValidationFailed for bad sweeps or backends.
repository::RunRecord prepare_run(const repository::TemplateEntry& entry, const RunRequest& request,
                                  const std::string& submitter);

/// The job set of a prepared record; deterministic in (template, record).
workflow::JobSet expand_record(const repository::TemplateEntry& entry, const repository::RunRecord& record);

/// Builds the executor a run uses.
std::unique_ptr<execution::Executor> make_executor(const repository::RunRecord& record,
                                                   const std::vector<resource::Site>& sites,
                                                   const execution::LocalConfig& local);

/// Runs a simulated record to completion in the calling thread. Used by the
/// offline CLI; the service produces the same log for the same record.
std::vector<scheduler::Transition> simulate_record(const repository::TemplateEntry& entry,
                                                   const repository::RunRecord& record,
                                                   const std::vector<resource::Site>& sites,
                                                   const engine::TransitionSink& sink = {});

struct ManagerConfig {
  std::vector<resource::Site> sim_sites;
  std::vector<resource::Site> local_sites;
  execution::LocalConfig local;
  /// Real milliseconds between simulator batches (0 runs flat out).
  int sim_pace_ms = 0;
};

struct RunView {
  repository::RunRecord record;
  std::vector<scheduler::Transition> log;
  std::optional<scheduler::OccupancySnapshot> snapshot;
};

/// Owns every live run. All engine mutations happen on one worker thread;
/// request threads enqueue commands and read copies of the run views.
class RunManager {
 public:
  RunManager(repository::Store& store, ManagerConfig config);
  ~RunManager();
  RunManager(const RunManager&) = delete;
  RunManager& operator=(const RunManager&) = delete;

  /// Creates and starts a run; returns the record and whether it was newly
  /// created (false for an idempotent replay).
  std::pair<repository::RunRecord, bool> submit(const RunRequest& request, const repository::User& user);
  void cancel(const std::string& run_id, const std::string& by);
  RunView view(const std::string& run_id) const;
  std::vector<repository::RunRecord> runs() const;
  scheduler::RunSummary summary(const std::string& run_id) const;
  bool active(const std::string& run_id) const;
  /// Blocks until the run leaves the active set or the timeout passes.
  bool wait(const std::string& run_id, double timeout_s) const;

  const ManagerConfig& config() const { return config_; }

 private:
  struct Active {
    repository::RunRecord record;
    std::unique_ptr<execution::Executor> executor;
    std::unique_ptr<engine::RunEngine> engine;
    std::vector<scheduler::Transition> replay;  // persisted prefix being re-derived
    std::size_t emitted = 0;
    bool diverged = false;
    bool cancelled = false;
  };

  void resume();
  void launch(repository::RunRecord record, std::vector<scheduler::Transition> replay);
  void on_transition(Active& run, const scheduler::Transition& t);
  void finish(Active& run);
  void loop(std::stop_token stop);
  void post(std::function<void()> command);

  repository::Store& store_;
  ManagerConfig config_;

  std::mutex submit_mu_;
  mutable std::mutex views_mu_;
  mutable std::condition_variable views_cv_;
  mutable std::map<std::string, RunView> views_;

  std::mutex cmd_mu_;
  std::condition_variable cmd_cv_;
  std::deque<std::function<void()>> commands_;

  // Worker-thread state.
  std::map<std::string, std::unique_ptr<Active>> active_;
  std::jthread worker_;
};

}  // namespace gatehub::service
