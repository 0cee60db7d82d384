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
#include <stdexcept>
#include <string>
#include <vector>

#include "gatehub/scheduler/summary.h"
#include "gatehub/workflow/model.h"

namespace gatehub::cli {

/// Bad flag values that CLI11 cannot catch; exits with status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Directory holding the bundled sites/ and templates/.
std::filesystem::path data_dir();

/// `--axis NAME=v1,v2` and `--set NAME=v` flags.
struct SweepArgs {
  std::vector<std::string> axes;
  std::vector<std::string> constants;
};

workflow::SweepSpec parse_sweep_args(const SweepArgs& args);

struct SimArgs {
  std::uint64_t seed = 42;
  double sigma = 0.1;
  double failure_rate = 0.0;
  std::optional<double> safety;
  std::vector<std::string> true_runtime;  // NODE=MINUTES
};

std::map<std::string, double> parse_true_runtime(const std::vector<std::string>& entries);

void print_summary(const scheduler::RunSummary& s);

// Offline commands.

struct OfflineOptions {
  std::filesystem::path workflow;
  SweepArgs sweep;
  std::string run_id = "offline";
  bool json = false;
};

int cmd_validate(const OfflineOptions& o);
int cmd_expand(const OfflineOptions& o);

struct SimulateOptions {
  OfflineOptions base;
  std::filesystem::path sites;
  SimArgs sim;
};

int cmd_simulate(const SimulateOptions& o);

struct LocalRunOptions {
  OfflineOptions base;
  std::filesystem::path sites;
  std::filesystem::path workdir;
  std::vector<std::filesystem::path> bin_dirs;
  std::filesystem::path data_dir = ".";
  double ms_per_minute = 1.0;
  int max_parallel = 4;
  std::optional<double> safety;
};

int cmd_run(const LocalRunOptions& o);

struct ServeOptions {
  std::string addr;
  std::filesystem::path store;
  std::string admin_password;
  bool allow_register = false;
  int sim_pace_ms = 0;
  std::vector<std::filesystem::path> bin_dirs;
  std::filesystem::path ui_dir;
  std::filesystem::path sites;
  std::filesystem::path local_sites;
  double ms_per_minute = 1.0;
  int max_parallel = 4;
};

int cmd_serve(const ServeOptions& o);

// API client commands.

struct RemoteOptions {
  std::string api;
  std::string token;
  bool json = false;
};

struct SubmitOptions {
  std::string template_name;
  std::optional<int> version;
  SweepArgs sweep;
  std::string backend = "sim";
  SimArgs sim;
  bool sim_seed_set = false;
  std::string run_id;
  std::string idempotency_key;
  bool wait = false;
  double wait_timeout_s = 600;
};

int cmd_login(const RemoteOptions& r, const std::string& user, const std::string& password);
int cmd_submit(const RemoteOptions& r, const SubmitOptions& s);
int cmd_status(const RemoteOptions& r, const std::string& run);
int cmd_summary(const RemoteOptions& r, const std::string& run);
int cmd_fetch(const RemoteOptions& r, const std::string& run, const std::filesystem::path& out);
/// Any API route: prints the JSON reply; exits 1 on an error status.
int cmd_call(const RemoteOptions& r, const std::string& method, const std::string& path, const std::string& body);

}  // namespace gatehub::cli
