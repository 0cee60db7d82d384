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
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gatehub/execution/executor.h"
#include "gatehub/scheduler/job.h"
#include "gatehub/scheduler/policy.h"
#include "gatehub/workflow/model.h"

namespace gatehub::repository {

enum class Role { kAdmin, kPowerUser, kEndUser };

inline constexpr Role kAllRoles[] = {Role::kAdmin, Role::kPowerUser, Role::kEndUser};

std::string_view to_string(Role r);
Role role_from_string(std::string_view s);

struct User {
  std::string username;
  Role role = Role::kEndUser;
  std::string salt;
  std::string password_hash;
};

bool is_valid_username(std::string_view name);

struct TemplateEntry {
  std::string name;
  int version = 1;
  workflow::Workflow workflow;
  std::string owner;
  bool published = false;
  std::string description;
  std::string created_at;
};

struct VirtualLab {
  std::string name;
  std::string method;
  std::vector<std::string> components;
  std::string template_ref;
  std::string description;

  bool operator==(const VirtualLab&) const = default;
};

enum class RunStatus { kRunning, kComplete, kCancelled, kInterrupted };

std::string_view to_string(RunStatus s);
RunStatus run_status_from_string(std::string_view s);

struct RunJob {
  std::string id;
  std::string node;
  std::size_t point = 0;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::string> depends_on;
};

struct RunRecord {
  std::string id;
  std::string template_name;
  int template_version = 1;
  workflow::SweepSpec sweep;
  std::string submitter;
  std::string backend = "sim";
  std::uint64_t seed = 42;
  scheduler::Policy policy;
  RunStatus status = RunStatus::kRunning;
  std::string created_at;
  std::string ended_at;
  std::string idempotency_key;
  /// Sweep points included; empty means all of them.
  std::vector<std::size_t> points;
  /// Simulator settings (ignored by the local backend).
  double sim_sigma = 0.1;
  double sim_failure_rate = 0.0;
  std::map<std::string, double> true_runtime;  // node id -> minutes
  std::vector<RunJob> jobs;
  std::vector<execution::ArtifactRecord> artifacts;
};

nlohmann::ordered_json to_json(const User& u);  // never includes secrets
nlohmann::ordered_json to_json(const TemplateEntry& t, bool with_workflow = true);
nlohmann::ordered_json to_json(const VirtualLab& lab);
nlohmann::ordered_json to_json(const RunRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const execution::ArtifactRecord& a);
execution::ArtifactRecord artifact_from_json(const nlohmann::json& j);

/// Current UTC time as ISO-8601.
std::string utc_now();

/// The five bundled virtual labs.
std::vector<VirtualLab> default_catalog();

struct StoreOptions {
  /// Password for the seeded admin account on first start.
  std::string admin_password = "admin";
  /// Directory holding the bundled *.workflow.json files seeded as published.
  std::filesystem::path templates_dir;
};

/// Single-directory file store:
///   users.json, tokens.json, catalog.json,
///   templates/<name>/<version>.json,
///   runs/<id>/record.json, runs/<id>/events.ndjson.
/// Documents are replaced atomically (write then rename); event logs are
/// append-only. All methods are safe to call from several threads.
class Store {
 public:
  Store(std::filesystem::path root, StoreOptions options = {});

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path run_dir(const std::string& id) const;

  // Users and bearer tokens.
  std::vector<User> users() const;
  std::optional<User> find_user(const std::string& username) const;
  /// Creates or replaces. Throws kInvalidArgument on a bad username.
  void put_user(const std::string& username, Role role, const std::string& password);
  void set_role(const std::string& username, Role role);
  bool remove_user(const std::string& username);
  /// Throws kUnauthenticated on a wrong password or unknown user.
  std::string login(const std::string& username, const std::string& password);
  std::optional<User> user_for_token(const std::string& token) const;
  void revoke(const std::string& token);

  // Templates.
  std::vector<TemplateEntry> templates() const;
  std::optional<TemplateEntry> get_template(const std::string& name, std::optional<int> version = {}) const;
  /// Stores a new version. With `version` set and already taken, throws
  /// kVersionConflict. Validation failures throw kValidationFailed.
  TemplateEntry add_template(workflow::Workflow wf, const std::string& owner, bool published,
                             std::optional<int> version = {});
  /// Freezes a draft. Throws kNotFound or kVersionConflict if already published.
  TemplateEntry publish(const std::string& name, int version);
  /// Copies a template into a new draft owned by `owner`.
  TemplateEntry clone(const std::string& name, std::optional<int> version, const std::string& new_name,
                      const std::string& owner);

  std::vector<VirtualLab> catalog() const;

  // Runs.
  void create_run(const RunRecord& record);
  void update_run(const RunRecord& record);
  /// Throws kUnknownRun.
  RunRecord get_run(const std::string& id) const;
  std::vector<RunRecord> runs() const;
  std::optional<std::string> run_for_key(const std::string& user, const std::string& key) const;

  void append_event(const std::string& run_id, const scheduler::Transition& t);
  std::vector<scheduler::Transition> events(const std::string& run_id) const;
  /// Rewrites the log with exactly `events` (drops a torn tail before resuming).
  void rewrite_events(const std::string& run_id, const std::vector<scheduler::Transition>& events);

 private:
  void seed(const StoreOptions& options);
  void save_users_locked() const;
  void save_tokens_locked() const;
  std::optional<TemplateEntry> read_template_locked(const std::string& name, int version) const;
  std::vector<int> versions_locked(const std::string& name) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
  std::map<std::string, User> users_;
  std::map<std::string, std::string> tokens_;  // sha256(token) -> username
};

/// Writes `text` to `path` via a temporary file and rename.
void write_atomically(const std::filesystem::path& path, const std::string& text);

}  // namespace gatehub::repository
