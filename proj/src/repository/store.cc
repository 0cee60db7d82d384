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

#include "gatehub/repository/store.h"

#include <algorithm>
#include <cctype>
#include <ctime>
#include <fstream>
#include <sstream>

#include "gatehub/common/crypto.h"
#include "gatehub/common/error.h"
#include "gatehub/scheduler/summary.h"
#include "gatehub/workflow/io.h"
#include "gatehub/workflow/workflow.h"

namespace gatehub::repository {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view to_string(Role r) {
  switch (r) {
    case Role::kAdmin: return "admin";
    case Role::kPowerUser: return "power_user";
    case Role::kEndUser: return "end_user";
  }
  return "end_user";
}

Role role_from_string(std::string_view s) {
  for (auto r : kAllRoles) {
    if (to_string(r) == s) return r;
  }
  fail(ErrorCode::kInvalidArgument, "unknown role '" + std::string(s) + "'");
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kRunning: return "running";
    case RunStatus::kComplete: return "complete";
    case RunStatus::kCancelled: return "cancelled";
    case RunStatus::kInterrupted: return "interrupted";
  }
  return "running";
}

RunStatus run_status_from_string(std::string_view s) {
  for (auto st : {RunStatus::kRunning, RunStatus::kComplete, RunStatus::kCancelled, RunStatus::kInterrupted}) {
    if (to_string(st) == s) return st;
  }
  fail(ErrorCode::kParseError, "unknown run status '" + std::string(s) + "'");
}

bool is_valid_username(std::string_view name) {
  if (name.empty() || name.size() > 64) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_atomically(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) fail(ErrorCode::kIo, "cannot write " + tmp);
  }
  fs::rename(tmp, path);
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fetch(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) fail(ErrorCode::kParseError, std::string("missing field ") + key);
  return j.at(key).get<std::string>();
}

}  // namespace

ojson to_json(const User& u) { return ojson{{"username", u.username}, {"role", to_string(u.role)}}; }

ojson to_json(const TemplateEntry& t, bool with_workflow) {
  ojson j{{"name", t.name},           {"version", t.version},   {"owner", t.owner},
          {"published", t.published}, {"description", t.description}, {"created_at", t.created_at}};
  if (with_workflow) j["workflow"] = workflow::to_json(t.workflow);
  return j;
}

ojson to_json(const VirtualLab& lab) {
  return ojson{{"name", lab.name},
               {"method", lab.method},
               {"components", lab.components},
               {"template", lab.template_ref},
               {"description", lab.description}};
}

ojson to_json(const execution::ArtifactRecord& a) {
  return ojson{{"job", a.job_id},
               {"port", a.port},
               {"path", a.path},
               {"bytes", a.bytes},
               {"size_class", resource::to_string(a.data_class)},
               {"within_expected", a.within_expected},
               {"synthetic", a.synthetic}};
}

execution::ArtifactRecord artifact_from_json(const nlohmann::json& j) {
  execution::ArtifactRecord a;
  a.job_id = fetch(j, "job");
  a.port = fetch(j, "port");
  a.path = fetch(j, "path");
  a.bytes = j.at("bytes").get<std::uint64_t>();
  a.data_class = resource::data_class_from_string(fetch(j, "size_class"));
  a.within_expected = j.at("within_expected").get<bool>();
  a.synthetic = j.value("synthetic", false);
  return a;
}

ojson to_json(const RunRecord& r) {
  ojson jobs = ojson::array();
  for (const auto& j : r.jobs) {
    ojson params = ojson::object();
    for (const auto& [k, v] : j.params) params[k] = v;
    jobs.push_back(ojson{{"id", j.id}, {"node", j.node}, {"point", j.point}, {"params", params}, {"depends_on", j.depends_on}});
  }
  ojson artifacts = ojson::array();
  for (const auto& a : r.artifacts) artifacts.push_back(to_json(a));
  return ojson{{"id", r.id},
               {"template", r.template_name},
               {"template_version", r.template_version},
               {"sweep", workflow::to_json(r.sweep)},
               {"submitter", r.submitter},
               {"backend", r.backend},
               {"seed", r.seed},
               {"policy", ojson::parse(scheduler::to_json(r.policy).dump())},
               {"status", to_string(r.status)},
               {"created_at", r.created_at},
               {"ended_at", r.ended_at},
               {"idempotency_key", r.idempotency_key},
               {"points", r.points},
               {"sim", ojson{{"sigma", r.sim_sigma}, {"failure_rate", r.sim_failure_rate}, {"true_runtime", r.true_runtime}}},
               {"jobs", jobs},
               {"artifacts", artifacts}};
}

RunRecord run_record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.id = fetch(j, "id");
  r.template_name = fetch(j, "template");
  r.template_version = j.at("template_version").get<int>();
  r.sweep = workflow::sweep_from_json(ojson::parse(j.at("sweep").dump()));
  r.submitter = fetch(j, "submitter");
  r.backend = fetch(j, "backend");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.policy = scheduler::policy_from_json(j.at("policy"));
  r.status = run_status_from_string(fetch(j, "status"));
  r.created_at = j.value("created_at", "");
  r.ended_at = j.value("ended_at", "");
  r.idempotency_key = j.value("idempotency_key", "");
  if (j.contains("points")) r.points = j.at("points").get<std::vector<std::size_t>>();
  if (j.contains("sim")) {
    const auto& sim = j.at("sim");
    r.sim_sigma = sim.value("sigma", 0.1);
    r.sim_failure_rate = sim.value("failure_rate", 0.0);
    if (sim.contains("true_runtime")) r.true_runtime = sim.at("true_runtime").get<std::map<std::string, double>>();
  }
  for (const auto& jj : j.at("jobs")) {
    RunJob job;
    job.id = fetch(jj, "id");
    job.node = fetch(jj, "node");
    job.point = jj.at("point").get<std::size_t>();
    for (const auto& [k, v] : jj.at("params").items()) job.params.emplace_back(k, v.get<std::string>());
    job.depends_on = jj.at("depends_on").get<std::vector<std::string>>();
    r.jobs.push_back(std::move(job));
  }
  for (const auto& a : j.at("artifacts")) r.artifacts.push_back(artifact_from_json(a));
  return r;
}

std::vector<VirtualLab> default_catalog() {
  return {
      {"TEM", "Transmission electron microscopy", {"LAMMPS", "AtomEye"}, "lab-tem",
       "Atomic configurations rendered as microscope-like images."},
      {"AFM", "Atomic force microscopy / stress-strain", {"LAMMPS", "R-package"}, "lab-afm",
       "Load curves from indentation or tension simulations."},
      {"CN-RDF", "Coordination number and radial distribution", {"LAMMPS", "R-package"}, "lab-cn-rdf",
       "Structural order parameters over a trajectory."},
      {"XRD", "X-ray diffraction", {"LAMMPS", "debyer", "R-package"}, "lab-xrd",
       "Diffraction patterns computed from atomic coordinates."},
      {"ND", "Neutron diffraction", {"LAMMPS", "debyer", "R-package"}, "lab-nd",
       "Neutron diffraction patterns computed from atomic coordinates."},
  };
}

Store::Store(fs::path root, StoreOptions options) : root_(std::move(root)) {
  fs::create_directories(root_ / "templates");
  fs::create_directories(root_ / "runs");
  if (fs::exists(root_ / "users.json")) {
    for (const auto& u : nlohmann::json::parse(read_file(root_ / "users.json"))) {
      User user;
      user.username = u.at("username").get<std::string>();
      user.role = role_from_string(u.at("role").get<std::string>());
      user.salt = u.at("salt").get<std::string>();
      user.password_hash = u.at("password_hash").get<std::string>();
      users_[user.username] = std::move(user);
    }
  }
  if (fs::exists(root_ / "tokens.json")) {
    const auto doc = nlohmann::json::parse(read_file(root_ / "tokens.json"));
    for (const auto& [digest, user] : doc.items()) {
      tokens_[digest] = user.get<std::string>();
    }
  }
  seed(options);
}

void Store::seed(const StoreOptions& options) {
  if (users_.empty()) put_user("admin", Role::kAdmin, options.admin_password);
  if (!fs::exists(root_ / "catalog.json")) {
    ojson labs = ojson::array();
    for (const auto& lab : default_catalog()) labs.push_back(to_json(lab));
    write_atomically(root_ / "catalog.json", labs.dump(2) + "\n");
  }
  if (options.templates_dir.empty() || !fs::is_directory(options.templates_dir)) return;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(options.templates_dir)) {
    if (e.path().string().ends_with(".workflow.json")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto wf = workflow::load_workflow(f);
    if (get_template(wf.name)) continue;
    add_template(std::move(wf), "admin", true, 1);
  }
}

fs::path Store::run_dir(const std::string& id) const {
  const bool safe = !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
  if (!safe) fail(ErrorCode::kUnknownRun, "unknown run " + id);
  return root_ / "runs" / id;
}

// ---------------------------------------------------------------------------
// Users

void Store::save_users_locked() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [_, u] : users_) {
    arr.push_back({{"username", u.username}, {"role", to_string(u.role)}, {"salt", u.salt}, {"password_hash", u.password_hash}});
  }
  write_atomically(root_ / "users.json", arr.dump(2) + "\n");
}

void Store::save_tokens_locked() const {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (const auto& [d, u] : tokens_) obj[d] = u;
  write_atomically(root_ / "tokens.json", obj.dump(2) + "\n");
}

std::vector<User> Store::users() const {
  std::lock_guard lock(mu_);
  std::vector<User> out;
  for (const auto& [_, u] : users_) out.push_back(u);
  return out;
}

std::optional<User> Store::find_user(const std::string& username) const {
  std::lock_guard lock(mu_);
  auto it = users_.find(username);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

void Store::put_user(const std::string& username, Role role, const std::string& password) {
  if (!is_valid_username(username)) fail(ErrorCode::kInvalidArgument, "invalid username '" + username + "'");
  if (password.empty()) fail(ErrorCode::kInvalidArgument, "empty password");
  User u{username, role, random_hex(16), ""};
  u.password_hash = pbkdf2_hex(password, u.salt);
  std::lock_guard lock(mu_);
  users_[username] = u;
  save_users_locked();
}

void Store::set_role(const std::string& username, Role role) {
  std::lock_guard lock(mu_);
  auto it = users_.find(username);
  if (it == users_.end()) fail(ErrorCode::kNotFound, "unknown user " + username);
  it->second.role = role;
  save_users_locked();
}

bool Store::remove_user(const std::string& username) {
  std::lock_guard lock(mu_);
  if (users_.erase(username) == 0) return false;
  std::erase_if(tokens_, [&](const auto& kv) { return kv.second == username; });
  save_users_locked();
  save_tokens_locked();
  return true;
}

std::string Store::login(const std::string& username, const std::string& password) {
  std::lock_guard lock(mu_);
  auto it = users_.find(username);
  // Hash even for unknown users so timing does not reveal which names exist.
  const std::string salt = it == users_.end() ? std::string(32, '0') : it->second.salt;
  const auto digest = pbkdf2_hex(password, salt);
  if (it == users_.end() || !digest_equal(digest, it->second.password_hash)) {
    fail(ErrorCode::kUnauthenticated, "invalid credentials");
  }
  const auto token = random_hex(32);
  tokens_[sha256_hex(token)] = username;
  save_tokens_locked();
  return token;
}

std::optional<User> Store::user_for_token(const std::string& token) const {
  if (token.empty()) return std::nullopt;
  std::lock_guard lock(mu_);
  auto it = tokens_.find(sha256_hex(token));
  if (it == tokens_.end()) return std::nullopt;
  auto u = users_.find(it->second);
  if (u == users_.end()) return std::nullopt;
  return u->second;
}

void Store::revoke(const std::string& token) {
  std::lock_guard lock(mu_);
  if (tokens_.erase(sha256_hex(token)) > 0) save_tokens_locked();
}

// ---------------------------------------------------------------------------
// Templates

std::vector<int> Store::versions_locked(const std::string& name) const {
  std::vector<int> out;
  const auto dir = root_ / "templates" / name;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    try {
      out.push_back(std::stoi(e.path().stem().string()));
    } catch (const std::exception&) {
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<TemplateEntry> Store::read_template_locked(const std::string& name, int version) const {
  const auto path = root_ / "templates" / name / (std::to_string(version) + ".json");
  if (!fs::exists(path)) return std::nullopt;
  const auto j = ojson::parse(read_file(path));
  TemplateEntry t;
  t.name = j.at("name").get<std::string>();
  t.version = j.at("version").get<int>();
  t.owner = j.at("owner").get<std::string>();
  t.published = j.at("published").get<bool>();
  t.description = j.value("description", "");
  t.created_at = j.value("created_at", "");
  t.workflow = workflow::workflow_from_json(j.at("workflow"));
  return t;
}

std::vector<TemplateEntry> Store::templates() const {
  std::lock_guard lock(mu_);
  std::vector<TemplateEntry> out;
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(root_ / "templates")) {
    if (e.is_directory()) names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  for (const auto& n : names) {
    for (int v : versions_locked(n)) {
      if (auto t = read_template_locked(n, v)) out.push_back(std::move(*t));
    }
  }
  return out;
}

std::optional<TemplateEntry> Store::get_template(const std::string& name, std::optional<int> version) const {
  if (!workflow::is_valid_node_id(name)) return std::nullopt;
  std::lock_guard lock(mu_);
  if (!version) {
    const auto vs = versions_locked(name);
    if (vs.empty()) return std::nullopt;
    version = vs.back();
  }
  return read_template_locked(name, *version);
}

TemplateEntry Store::add_template(workflow::Workflow wf, const std::string& owner, bool published,
                                  std::optional<int> version) {
  if (!workflow::is_valid_node_id(wf.name)) {
    fail(ErrorCode::kValidationFailed, "template name '" + wf.name + "' may use only lowercase letters, digits, '_' and '-'");
  }
  const auto report = workflow::validate_graph(wf.graph);
  if (!report.clean()) fail(ErrorCode::kValidationFailed, report.str());
  try {
    workflow::check_workflow(wf);
  } catch (const Error& e) {
    fail(ErrorCode::kValidationFailed, std::string(to_string(e.code())) + ": " + e.what());
  }
  std::lock_guard lock(mu_);
  const auto existing = versions_locked(wf.name);
  if (version) {
    if (*version < 1) fail(ErrorCode::kInvalidArgument, "version must be positive");
    if (std::find(existing.begin(), existing.end(), *version) != existing.end()) {
      fail(ErrorCode::kVersionConflict, wf.name + " version " + std::to_string(*version) + " already exists");
    }
  } else {
    version = existing.empty() ? 1 : existing.back() + 1;
  }
  TemplateEntry t;
  t.name = wf.name;
  t.version = *version;
  t.owner = owner;
  t.published = published;
  t.description = wf.description;
  t.created_at = utc_now();
  wf.owner = owner;
  wf.status = published ? workflow::WorkflowStatus::kPublished : workflow::WorkflowStatus::kDraft;
  t.workflow = std::move(wf);
  write_atomically(root_ / "templates" / t.name / (std::to_string(t.version) + ".json"), to_json(t).dump(2) + "\n");
  return t;
}

TemplateEntry Store::publish(const std::string& name, int version) {
  std::lock_guard lock(mu_);
  auto t = read_template_locked(name, version);
  if (!t) fail(ErrorCode::kNotFound, "unknown template " + name + " version " + std::to_string(version));
  if (t->published) fail(ErrorCode::kVersionConflict, name + " version " + std::to_string(version) + " is already published");
  t->published = true;
  t->workflow.status = workflow::WorkflowStatus::kPublished;
  write_atomically(root_ / "templates" / name / (std::to_string(version) + ".json"), to_json(*t).dump(2) + "\n");
  return *t;
}

TemplateEntry Store::clone(const std::string& name, std::optional<int> version, const std::string& new_name,
                           const std::string& owner) {
  auto src = get_template(name, version);
  if (!src) fail(ErrorCode::kNotFound, "unknown template " + name);
  auto wf = src->workflow;
  wf.name = new_name;
  return add_template(std::move(wf), owner, false);
}

std::vector<VirtualLab> Store::catalog() const {
  std::lock_guard lock(mu_);
  std::vector<VirtualLab> out;
  for (const auto& j : nlohmann::json::parse(read_file(root_ / "catalog.json"))) {
    out.push_back({j.at("name"), j.at("method"), j.at("components").get<std::vector<std::string>>(), j.at("template"),
                   j.value("description", "")});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runs

void Store::create_run(const RunRecord& record) {
  std::lock_guard lock(mu_);
  const auto dir = run_dir(record.id);
  if (fs::exists(dir / "record.json")) fail(ErrorCode::kVersionConflict, "run " + record.id + " exists");
  fs::create_directories(dir);
  write_atomically(dir / "record.json", to_json(record).dump(2) + "\n");
  std::ofstream(dir / "events.ndjson", std::ios::app);
}

void Store::update_run(const RunRecord& record) {
  std::lock_guard lock(mu_);
  write_atomically(run_dir(record.id) / "record.json", to_json(record).dump(2) + "\n");
}

RunRecord Store::get_run(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto path = run_dir(id) / "record.json";
  if (!fs::exists(path)) fail(ErrorCode::kUnknownRun, "unknown run " + id);
  return run_record_from_json(nlohmann::json::parse(read_file(path)));
}

std::vector<RunRecord> Store::runs() const {
  std::vector<std::string> ids;
  {
    std::lock_guard lock(mu_);
    for (const auto& e : fs::directory_iterator(root_ / "runs")) {
      if (fs::exists(e.path() / "record.json")) ids.push_back(e.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  std::vector<RunRecord> out;
  for (const auto& id : ids) out.push_back(get_run(id));
  return out;
}

std::optional<std::string> Store::run_for_key(const std::string& user, const std::string& key) const {
  if (key.empty()) return std::nullopt;
  for (const auto& r : runs()) {
    if (r.submitter == user && r.idempotency_key == key) return r.id;
  }
  return std::nullopt;
}

void Store::append_event(const std::string& run_id, const scheduler::Transition& t) {
  std::lock_guard lock(mu_);
  std::ofstream out(run_dir(run_id) / "events.ndjson", std::ios::app | std::ios::binary);
  out << scheduler::to_ndjson(t) << "\n";
  out.flush();
  if (!out) fail(ErrorCode::kIo, "cannot append to event log of " + run_id);
}

std::vector<scheduler::Transition> Store::events(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  const auto path = run_dir(run_id) / "events.ndjson";
  if (!fs::exists(path)) fail(ErrorCode::kUnknownRun, "unknown run " + run_id);
  return scheduler::read_event_log(path);
}

void Store::rewrite_events(const std::string& run_id, const std::vector<scheduler::Transition>& events) {
  std::string text;
  for (const auto& t : events) text += scheduler::to_ndjson(t) + "\n";
  std::lock_guard lock(mu_);
  write_atomically(run_dir(run_id) / "events.ndjson", text);
}

}  // namespace gatehub::repository
