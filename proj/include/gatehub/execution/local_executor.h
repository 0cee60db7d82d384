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

#include <sys/types.h>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gatehub/execution/executor.h"

namespace gatehub::execution {

struct LocalConfig {
  std::filesystem::path runs_root = "runs";
  /// Searched for bare executable names before PATH.
  std::vector<std::filesystem::path> bin_dirs;
  /// Base for relative external input paths.
  std::filesystem::path data_dir = ".";
  int max_parallel = 4;
  /// Real milliseconds per sim-minute (walltime enforcement and stub sleeps).
  double ms_per_minute = 1.0;
  double size_scale = 1e-3;
};

/// Runs jobs as child processes under runs/<run>/<job>/ with captured
/// stdout/stderr. A reaper thread watches children and enforces walltimes;
/// events are handed to the caller through wait_events().
class LocalExecutor final : public Executor {
 public:
  LocalExecutor(std::vector<resource::Site> sites, LocalConfig config);
  ~LocalExecutor() override;
  LocalExecutor(const LocalExecutor&) = delete;
  LocalExecutor& operator=(const LocalExecutor&) = delete;

  Backend backend() const override { return Backend::kLocal; }
  std::vector<std::string> sites() const override;
  std::vector<scheduler::QueueOccupancy> poll(const std::string& site) const override;
  /// Throws kSpawnError for an unresolvable executable, kStagingError for a
  /// missing input and kMissingCheckpoint for a broken segment chain.
  ExecutorHandle submit(const SubmitRequest& request) override;
  void cancel(const std::string& job_id) override;
  CollectResult collect(const scheduler::Job& job, const std::string& run_id) override;
  double now() const override;
  bool busy() const override;
  std::vector<ExecEvent> wait_events(double max_wait_s) override;

  std::filesystem::path job_dir(const std::string& run_id, const std::string& job_id) const;

  /// Absolute path of `name`, looked up in bin_dirs then PATH. Throws kSpawnError.
  std::filesystem::path resolve_executable(const std::string& name) const;

 private:
  struct Launch {
    std::string job_id;
    std::string run_id;
    std::string user;
    std::string site;
    std::string queue;
    int cores = 1;
    int attempt = 1;
    int segment = 1;
    int segments = 1;
    double walltime = 0.0;
    std::filesystem::path dir;
    std::filesystem::path exe;
    std::vector<std::string> argv;
    std::map<std::string, std::string> env;
  };
  struct Proc {
    Launch launch;
    pid_t pid = -1;
    std::chrono::steady_clock::time_point started;
    double started_min = 0.0;
  };

  void start_ready_locked();
  void spawn_locked(Launch launch);
  void reap(std::stop_token stop);
  void write_meta(const Proc& p, int exit_code, bool killed, double ended_min) const;
  long used_cores_locked(const std::string& site) const;

  std::vector<resource::Site> sites_;
  LocalConfig config_;
  std::chrono::steady_clock::time_point epoch_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Launch> waiting_;
  std::map<std::string, Proc> running_;
  std::vector<ExecEvent> events_;
  std::jthread reaper_;
};

}  // namespace gatehub::execution
