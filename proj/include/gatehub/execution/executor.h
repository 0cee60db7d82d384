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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatehub/resource/model.h"
#include "gatehub/scheduler/job.h"
#include "gatehub/scheduler/planner.h"
#include "gatehub/scheduler/state_machine.h"

namespace gatehub::execution {

enum class Backend { kLocal, kSim };

std::string_view to_string(Backend b);

struct ExecutorHandle {
  std::string job_id;
  Backend backend = Backend::kSim;
  /// pid for local processes, submission sequence number for the simulator.
  std::int64_t external_ref = 0;
};

/// An executor-side occurrence delivered to the scheduler.
struct ExecEvent {
  double at = 0.0;  // minutes on the executor clock
  std::string job_id;
  int attempt = 1;
  int segment = 1;
  scheduler::EventKind kind = scheduler::EventKind::kStarted;
  int exit_code = 0;
  std::string detail;
  std::string queue;  // "site/queue"

  bool operator==(const ExecEvent&) const = default;
};

/// One line of the executor trace in the scheduler's event-log format.
std::string to_ndjson(const ExecEvent& e);

struct StagedInput {
  std::string port;
  std::filesystem::path path;
};

struct SubmitRequest {
  const scheduler::Job* job = nullptr;
  std::string run_id;
  std::string site;
  std::string queue;
  int segment = 1;
  int segments = 1;
  /// Planned runtime of this segment, minutes.
  double runtime = 0.0;
  std::vector<StagedInput> inputs;
};

struct ArtifactRecord {
  std::string job_id;
  std::string port;
  std::string path;
  std::uint64_t bytes = 0;
  resource::DataClass data_class = resource::DataClass::kScalar;
  bool within_expected = false;
  bool synthetic = false;

  bool operator==(const ArtifactRecord&) const = default;
};

struct CollectResult {
  std::vector<ArtifactRecord> records;
  std::vector<std::string> missing;  // output patterns with no file
};

/// A backend that runs jobs on one or more sites. All calls come from the
/// scheduler's single event loop.
class Executor {
 public:
  virtual ~Executor() = default;

  virtual Backend backend() const = 0;
  virtual std::vector<std::string> sites() const = 0;

  /// Per-queue occupancy of one site. Throws kSiteUnreachable.
  virtual std::vector<scheduler::QueueOccupancy> poll(const std::string& site) const = 0;

  virtual ExecutorHandle submit(const SubmitRequest& request) = 0;
  virtual void cancel(const std::string& job_id) = 0;

  /// Matches declared outputs after a successful exit.
  virtual CollectResult collect(const scheduler::Job& job, const std::string& run_id) = 0;

  /// Minutes on this executor's clock.
  virtual double now() const = 0;
  /// True while anything is waiting or running.
  virtual bool busy() const = 0;
  /// Next batch of events. The simulator jumps to its next event time; the
  /// local executor blocks for at most `max_wait_s` real seconds.
  virtual std::vector<ExecEvent> wait_events(double max_wait_s) = 0;
};

/// Environment for segment `k` of `n` under `checkpoint_dir`: CKPT_IN (empty
/// for the first segment) and CKPT_OUT. Nothing is injected when n == 1.
/// Throws kMissingCheckpoint when k > 1 and the previous checkpoint is absent.
std::map<std::string, std::string> checkpoint_contract(int k, int n, const std::filesystem::path& checkpoint_dir);

/// Synthetic artifacts for the simulator: one record per declared output,
/// sized at the midpoint of its class range.
CollectResult synthetic_artifacts(const scheduler::Job& job, const std::string& run_id, double size_scale);

/// Matches each declared output of `job` against files under `outputs_dir`.
CollectResult collect_outputs(const scheduler::Job& job, const std::filesystem::path& outputs_dir,
                              double size_scale);

}  // namespace gatehub::execution
