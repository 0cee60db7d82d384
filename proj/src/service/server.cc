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


#include "gatehub/service/server.h"

#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "gatehub/common/error.h"
#include "gatehub/workflow/io.h"

namespace gatehub::service {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using repository::Role;
using repository::User;
using scheduler::JobState;

const std::vector<Endpoint>& endpoints() {
  static const std::vector<Endpoint> table = {
      {"POST", "/auth/login", std::nullopt},
      {"POST", "/auth/register", std::nullopt},
      {"POST", "/auth/logout", Action::kWhoAmI},
      {"GET", "/me", Action::kWhoAmI},
      {"GET", "/users", Action::kListUsers},
      {"POST", "/users", Action::kCreateUser},
      {"PATCH", "/users/{user}", Action::kUpdateUser},
      {"DELETE", "/users/{user}", Action::kDeleteUser},
      {"GET", "/templates", Action::kListTemplates},
      {"POST", "/templates", Action::kCreateTemplate},
      {"GET", "/templates/{name}", Action::kGetTemplate},
      {"POST", "/templates/{name}/versions/{version}/publish", Action::kPublishTemplate},
      {"POST", "/templates/{name}/clone", Action::kCloneTemplate},
      {"GET", "/catalog", Action::kCatalog},
      {"GET", "/sites", Action::kListSites},
      {"GET", "/sites/occupancy", Action::kOccupancy},
      {"POST", "/runs", Action::kCreateRun},
      {"GET", "/runs", Action::kListRuns},
      {"GET", "/runs/{run}", Action::kGetRun},
      {"GET", "/runs/{run}/summary", Action::kRunSummary},
      {"POST", "/runs/{run}/cancel", Action::kCancelRun},
      {"POST", "/runs/{run}/rerun-faulty", Action::kRerunFaulty},
      {"GET", "/runs/{run}/events", Action::kJobEvents},
      {"GET", "/runs/{run}/jobs", Action::kListJobs},
      {"GET", "/runs/{run}/jobs/{job}", Action::kGetJob},
      {"GET", "/runs/{run}/jobs/{job}/events", Action::kJobEvents},
      {"GET", "/runs/{run}/artifacts", Action::kListArtifacts},
      {"GET", "/runs/{run}/artifacts/{index}", Action::kDownloadArtifact},
  };
  return table;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnauthenticated: return 401;
    case ErrorCode::kPermissionDenied: return 403;
    case ErrorCode::kNotFound:
    case ErrorCode::kUnknownRun:
    case ErrorCode::kUnknownQueue:
    case ErrorCode::kMissingArtifact: return 404;
    case ErrorCode::kVersionConflict: return 409;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
    case ErrorCode::kCycle:
    case ErrorCode::kUnboundNode:
    case ErrorCode::kUnknownPlaceholder:
    case ErrorCode::kMalformedTemplate:
    case ErrorCode::kUnknownProfile:
    case ErrorCode::kEmptyAxis:
    case ErrorCode::kInvalidSweep:
    case ErrorCode::kInvalidBinding:
    case ErrorCode::kValidationFailed:
    case ErrorCode::kNonPositiveScale:
    case ErrorCode::kUnschedulable:
    case ErrorCode::kNotCheckpointable: return 422;
    default: return 500;
  }
}

namespace {

struct Call {
  const httplib::Request& req;
  httplib::Response& res;
  std::map<std::string, std::string> params;
  std::optional<User> user;

  const User& me() const { return *user; }
  bool admin() const { return user && user->role == Role::kAdmin; }
};

void send(httplib::Response& res, int status, const ojson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send(res, status, ojson{{"error", ojson{{"code", code}, {"message", message}}}});
}

ojson body_of(const Call& c) {
  if (c.req.body.empty()) return ojson::object();
  ojson j;
  try {
    j = ojson::parse(c.req.body);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kParseError, std::string("request body is not JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kParseError, "request body must be a JSON object");
  return j;
}

std::string required_string(const ojson& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string() || body[key].get<std::string>().empty()) {
    fail(ErrorCode::kValidationFailed, std::string("field '") + key + "' must be a non-empty string");
  }
  return body[key].get<std::string>();
}

std::optional<int> optional_int(const ojson& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  if (!body[key].is_number_integer()) fail(ErrorCode::kValidationFailed, std::string("field '") + key + "' must be an integer");
  return body[key].get<int>();
}

int parse_int(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kNotFound, std::string("no ") + what + " " + text);
}

ojson site_json(const resource::Site& s) {
  ojson queues = ojson::array();
  for (const auto& q : s.queues) {
    ojson walltime = std::isinf(q.walltime) ? ojson(nullptr) : ojson(q.walltime);
    queues.push_back({{"name", q.name}, {"walltime_minutes", walltime}, {"cores_per_user", q.cores_per_user}});
  }
  return {{"name", s.name}, {"kind", resource::to_string(s.kind)}, {"total_cores", s.total_cores}, {"queues", queues}};
}

ojson snapshot_json(const std::string& run, const scheduler::OccupancySnapshot& snap) {
  ojson entries = ojson::array();
  for (const auto& e : snap.entries) {
    entries.push_back({{"site", e.site},
                       {"queue", e.queue},
                       {"idle_cores", e.idle_cores},
                       {"queued_jobs", e.queued_jobs},
                       {"running_jobs", e.running_jobs},
                       {"stale", e.stale}});
  }
  return {{"run", run}, {"taken_at", snap.taken_at}, {"entries", entries}};
}

ojson transition_json(const scheduler::Transition& t) { return ojson::parse(scheduler::to_ndjson(t)); }

struct JobStatus {
  JobState state = JobState::kCreated;
  int attempt = 1;
  std::string queue;
  std::size_t transitions = 0;
};

std::map<std::string, JobStatus> job_statuses(const RunView& v) {
  std::map<std::string, JobStatus> out;
  for (const auto& j : v.record.jobs) out[j.id];
  for (const auto& t : v.log) {
    auto it = out.find(t.job);
    if (it == out.end()) continue;
    it->second.state = t.to;
    it->second.attempt = t.attempt;
    if (!t.queue.empty()) it->second.queue = t.queue;
    ++it->second.transitions;
  }
  return out;
}

ojson run_json(const RunView& v) {
  ojson j = repository::to_json(v.record);
  ojson counts = ojson::object();
  for (auto s : scheduler::kAllJobStates) counts[std::string(scheduler::to_string(s))] = 0;
  for (const auto& [_, st] : job_statuses(v)) counts[std::string(scheduler::to_string(st.state))] = counts[std::string(scheduler::to_string(st.state))].get<int>() + 1;
  j["state_counts"] = counts;
  j["event_count"] = v.log.size();
  return j;
}

ojson job_json(const repository::RunJob& job, const JobStatus& st) {
  ojson params = ojson::object();
  for (const auto& [k, val] : job.params) params[k] = val;
  return {{"id", job.id},
          {"node", job.node},
          {"point", job.point},
          {"params", params},
          {"depends_on", job.depends_on},
          {"state", scheduler::to_string(st.state)},
          {"attempt", st.attempt},
          {"queue", st.queue}};
}

std::string bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() > prefix.size() && header.compare(0, prefix.size(), prefix) == 0) return header.substr(prefix.size());
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------

struct Server::Impl {
  repository::Store& store;
  RunManager& runs;
  ServerConfig config;
  httplib::Server http;

  Impl(repository::Store& s, RunManager& r, ServerConfig c) : store(s), runs(r), config(std::move(c)) {}

  using Handler = std::function<void(Call&)>;

  void install() {
    const std::map<std::string, Handler> handlers = {
        {"POST /auth/login", [this](Call& c) { login(c); }},
        {"POST /auth/register", [this](Call& c) { register_user(c); }},
        {"POST /auth/logout", [this](Call& c) {
           store.revoke(bearer_token(c.req));
           c.res.status = 204;
         }},
        {"GET /me", [](Call& c) { send(c.res, 200, repository::to_json(c.me())); }},
        {"GET /users", [this](Call& c) {
           ojson arr = ojson::array();
           for (const auto& u : store.users()) arr.push_back(repository::to_json(u));
           send(c.res, 200, arr);
         }},
        {"POST /users", [this](Call& c) { create_user(c); }},
        {"PATCH /users/{user}", [this](Call& c) { update_user(c); }},
        {"DELETE /users/{user}", [this](Call& c) { delete_user(c); }},
        {"GET /templates", [this](Call& c) { list_templates(c); }},
        {"POST /templates", [this](Call& c) { create_template(c); }},
        {"GET /templates/{name}", [this](Call& c) { get_template(c); }},
        {"POST /templates/{name}/versions/{version}/publish", [this](Call& c) { publish_template(c); }},
        {"POST /templates/{name}/clone", [this](Call& c) { clone_template(c); }},
        {"GET /catalog", [this](Call& c) {
           ojson arr = ojson::array();
           for (const auto& lab : store.catalog()) arr.push_back(repository::to_json(lab));
           send(c.res, 200, arr);
         }},
        {"GET /sites", [this](Call& c) {
           ojson sim = ojson::array(), local = ojson::array();
           for (const auto& s : runs.config().sim_sites) sim.push_back(site_json(s));
           for (const auto& s : runs.config().local_sites) local.push_back(site_json(s));
           send(c.res, 200, ojson{{"sim", sim}, {"local", local}});
         }},
        {"GET /sites/occupancy", [this](Call& c) { occupancy(c); }},
        {"POST /runs", [this](Call& c) { create_run(c); }},
        {"GET /runs", [this](Call& c) {
           ojson arr = ojson::array();
           for (const auto& r : runs.runs()) {
             if (c.admin() || r.submitter == c.me().username) arr.push_back(run_json(RunView{r, runs.view(r.id).log, {}}));
           }
           send(c.res, 200, arr);
         }},
        {"GET /runs/{run}", [this](Call& c) { send(c.res, 200, run_json(visible_run(c))); }},
        {"GET /runs/{run}/summary", [this](Call& c) {
           visible_run(c);
           send(c.res, 200, scheduler::to_json(runs.summary(c.params.at("run"))));
         }},
        {"POST /runs/{run}/cancel", [this](Call& c) {
           visible_run(c);
           runs.cancel(c.params.at("run"), c.me().username);
           send(c.res, 200, run_json(runs.view(c.params.at("run"))));
         }},
        {"POST /runs/{run}/rerun-faulty", [this](Call& c) { rerun_faulty(c); }},
        {"GET /runs/{run}/events", [this](Call& c) { run_events(c); }},
        {"GET /runs/{run}/jobs", [this](Call& c) {
           auto v = visible_run(c);
           auto statuses = job_statuses(v);
           ojson arr = ojson::array();
           for (const auto& j : v.record.jobs) arr.push_back(job_json(j, statuses.at(j.id)));
           send(c.res, 200, arr);
         }},
        {"GET /runs/{run}/jobs/{job}", [this](Call& c) { get_job(c, false); }},
        {"GET /runs/{run}/jobs/{job}/events", [this](Call& c) { get_job(c, true); }},
        {"GET /runs/{run}/artifacts", [this](Call& c) { list_artifacts(c); }},
        {"GET /runs/{run}/artifacts/{index}", [this](Call& c) { download_artifact(c); }},
    };

    for (const auto& ep : endpoints()) {
      auto it = handlers.find(ep.method + " " + ep.path);
      if (it == handlers.end()) fail(ErrorCode::kInvariantViolation, "no handler for " + ep.method + " " + ep.path);
      add_route(ep, it->second);
    }

    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) send_error(res, res.status, res.status == 404 ? "NotFound" : "HttpError", "no such route");
    });
    if (!config.ui_dir.empty() && fs::is_directory(config.ui_dir)) http.set_mount_point("/ui", config.ui_dir.string());
  }

  void add_route(const Endpoint& ep, Handler handler) {
    std::vector<std::string> names;
    std::string pattern = kApiBase;
    static const std::regex placeholder(R"(\{([a-z]+)\})");
    std::string rest = ep.path;
    std::smatch m;
    while (std::regex_search(rest, m, placeholder)) {
      pattern += std::regex_replace(m.prefix().str(), std::regex(R"([.^$|()\[\]*+?\\])"), "\\$&");
      pattern += "([^/]+)";
      names.push_back(m[1]);
      rest = m.suffix();
    }
    pattern += rest;

    auto wrapped = [this, ep, names, handler](const httplib::Request& req, httplib::Response& res) {
      Call c{req, res, {}, std::nullopt};
      for (std::size_t i = 0; i < names.size(); ++i) c.params[names[i]] = req.matches[i + 1];
      try {
        if (ep.action) {
          c.user = store.user_for_token(bearer_token(req));
          if (!c.user) fail(ErrorCode::kUnauthenticated, "missing or invalid bearer token");
          if (!allowed(*ep.action, c.user->role)) {
            fail(ErrorCode::kPermissionDenied,
                 std::string(to_string(c.user->role)) + " may not " + std::string(to_string(*ep.action)));
          }
        }
        handler(c);
      } catch (const Error& e) {
        send_error(res, http_status(e.code()), to_string(e.code()), e.what());
      } catch (const nlohmann::json::exception& e) {
        send_error(res, 422, to_string(ErrorCode::kValidationFailed), e.what());
      } catch (const std::exception& e) {
        std::cerr << ep.method << " " << req.path << ": " << e.what() << "\n";
        send_error(res, 500, "Internal", e.what());
      }
    };
    if (ep.method == "GET") http.Get(pattern, wrapped);
    else if (ep.method == "POST") http.Post(pattern, wrapped);
    else if (ep.method == "PATCH") http.Patch(pattern, wrapped);
    else if (ep.method == "DELETE") http.Delete(pattern, wrapped);
  }

  // -- auth and users --------------------------------------------------------

  void login(Call& c) {
    const auto body = body_of(c);
    const auto username = required_string(body, "username");
    const auto token = store.login(username, required_string(body, "password"));
    send(c.res, 200, ojson{{"token", token}, {"user", repository::to_json(*store.find_user(username))}});
  }

  void register_user(Call& c) {
    if (!config.allow_register) fail(ErrorCode::kPermissionDenied, "self-registration is disabled");
    const auto body = body_of(c);
    const auto username = required_string(body, "username");
    if (store.find_user(username)) fail(ErrorCode::kVersionConflict, "user " + username + " exists");
    store.put_user(username, Role::kEndUser, required_string(body, "password"));
    send(c.res, 201, repository::to_json(*store.find_user(username)));
  }

  void create_user(Call& c) {
    const auto body = body_of(c);
    const auto username = required_string(body, "username");
    const auto role = repository::role_from_string(body.value("role", std::string("end_user")));
    if (store.find_user(username)) fail(ErrorCode::kVersionConflict, "user " + username + " exists");
    store.put_user(username, role, required_string(body, "password"));
    send(c.res, 201, repository::to_json(*store.find_user(username)));
  }

  void update_user(Call& c) {
    const auto& name = c.params.at("user");
    auto existing = store.find_user(name);
    if (!existing) fail(ErrorCode::kNotFound, "unknown user " + name);
    const auto body = body_of(c);
    if (body.contains("password")) store.put_user(name, existing->role, required_string(body, "password"));
    if (body.contains("role")) {
      if (!body["role"].is_string()) fail(ErrorCode::kValidationFailed, "field 'role' must be a string");
      store.set_role(name, repository::role_from_string(body["role"].get<std::string>()));
    }
    send(c.res, 200, repository::to_json(*store.find_user(name)));
  }

  void delete_user(Call& c) {
    const auto& name = c.params.at("user");
    if (name == c.me().username) fail(ErrorCode::kValidationFailed, "an admin cannot delete their own account");
    if (!store.remove_user(name)) fail(ErrorCode::kNotFound, "unknown user " + name);
    c.res.status = 204;
  }

  // -- templates -------------------------------------------------------------

  bool can_see(const repository::TemplateEntry& t, const Call& c) const { return template_visible(t, c.me()); }

  repository::TemplateEntry visible_template(const Call& c, const std::string& name, std::optional<int> version) const {
    auto t = resolve_template(store, name, version, c.me());
    if (!t) fail(ErrorCode::kNotFound, "no template named " + name);
    return *t;
  }

  void list_templates(Call& c) {
    ojson arr = ojson::array();
    for (const auto& t : store.templates()) {
      if (can_see(t, c)) arr.push_back(repository::to_json(t, false));
    }
    send(c.res, 200, arr);
  }

  void create_template(Call& c) {
    const auto body = body_of(c);
    if (!body.contains("workflow")) fail(ErrorCode::kValidationFailed, "field 'workflow' is required");
    auto wf = workflow::workflow_from_json(body["workflow"]);
    const bool publish = body.value("publish", false);
    auto t = store.add_template(std::move(wf), c.me().username, publish, optional_int(body, "version"));
    send(c.res, 201, repository::to_json(t));
  }

  void get_template(Call& c) {
    std::optional<int> version;
    if (c.req.has_param("version")) version = parse_int(c.req.get_param_value("version"), "template version");
    send(c.res, 200, repository::to_json(visible_template(c, c.params.at("name"), version)));
  }

  void publish_template(Call& c) {
    const int version = parse_int(c.params.at("version"), "template version");
    auto t = visible_template(c, c.params.at("name"), version);
    if (!c.admin() && t.owner != c.me().username && !t.published) {
      fail(ErrorCode::kPermissionDenied, "only the owner or an admin may publish a draft");
    }
    send(c.res, 200, repository::to_json(store.publish(t.name, t.version)));
  }

  void clone_template(Call& c) {
    const auto body = body_of(c);
    auto src = visible_template(c, c.params.at("name"), optional_int(body, "version"));
    auto copy = store.clone(src.name, src.version, required_string(body, "name"), c.me().username);
    send(c.res, 201, repository::to_json(copy));
  }

  // -- runs ------------------------------------------------------------------

  RunView visible_run(const Call& c) const {
    const auto& id = c.params.at("run");
    RunView v;
    try {
      v = runs.view(id);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kUnknownRun) fail(ErrorCode::kNotFound, "unknown run " + id);
      throw;
    }
    if (!c.admin() && v.record.submitter != c.me().username) fail(ErrorCode::kNotFound, "unknown run " + id);
    return v;
  }

  void create_run(Call& c) {
    const auto body = body_of(c);
    RunRequest r;
    r.template_name = required_string(body, "template");
    r.version = optional_int(body, "version");
    if (body.contains("sweep")) r.sweep = workflow::sweep_from_json(body["sweep"]);
    r.backend = body.value("backend", std::string("sim"));
    if (body.contains("seed")) {
      if (!body["seed"].is_number_unsigned()) fail(ErrorCode::kValidationFailed, "field 'seed' must be a non-negative integer");
      r.seed = body["seed"].get<std::uint64_t>();
    }
    if (body.contains("policy")) r.policy = scheduler::policy_from_json(nlohmann::json::parse(body["policy"].dump()));
    if (body.contains("sim")) {
      const auto& sim = body["sim"];
      if (!sim.is_object()) fail(ErrorCode::kValidationFailed, "field 'sim' must be an object");
      r.sim_sigma = sim.value("sigma", r.sim_sigma);
      r.sim_failure_rate = sim.value("failure_rate", r.sim_failure_rate);
      if (sim.contains("true_runtime")) r.true_runtime = sim["true_runtime"].get<std::map<std::string, double>>();
    }
    if (body.contains("run_id")) r.run_id = required_string(body, "run_id");
    r.idempotency_key = c.req.get_header_value("Idempotency-Key");
    if (r.idempotency_key.empty()) r.idempotency_key = body.value("idempotency_key", std::string());
    if (r.backend == "local" && runs.config().local_sites.empty()) {
      fail(ErrorCode::kValidationFailed, "this gateway has no local sites configured");
    }
    auto [record, created] = runs.submit(r, c.me());
    send(c.res, created ? 201 : 200, run_json(runs.view(record.id)));
  }

  void rerun_faulty(Call& c) {
    auto v = visible_run(c);
    if (v.record.status == repository::RunStatus::kRunning) fail(ErrorCode::kVersionConflict, "run is still active");
    std::set<std::size_t> points;
    for (const auto& job : v.record.jobs) {
      if (job_statuses(v).at(job.id).state != JobState::kFinished) points.insert(job.point);
    }
    if (points.empty()) fail(ErrorCode::kValidationFailed, "run has no faulty jobs");
    RunRequest r;
    r.template_name = v.record.template_name;
    r.version = v.record.template_version;
    r.sweep = v.record.sweep;
    r.backend = v.record.backend;
    r.seed = v.record.seed;
    r.policy = v.record.policy;
    r.sim_sigma = v.record.sim_sigma;
    r.sim_failure_rate = v.record.sim_failure_rate;
    r.true_runtime = v.record.true_runtime;
    r.points = points;
    auto [record, created] = runs.submit(r, c.me());
    ojson j = run_json(runs.view(record.id));
    j["rerun_of"] = v.record.id;
    send(c.res, 201, j);
  }

  void run_events(Call& c) {
    auto v = visible_run(c);
    std::size_t since = 0;
    if (c.req.has_param("since")) since = static_cast<std::size_t>(std::max(0, parse_int(c.req.get_param_value("since"), "offset")));
    ojson arr = ojson::array();
    for (std::size_t i = since; i < v.log.size(); ++i) arr.push_back(transition_json(v.log[i]));
    send(c.res, 200, ojson{{"events", arr}, {"next", v.log.size()}});
  }

  void get_job(Call& c, bool events_only) {
    auto v = visible_run(c);
    const auto& id = c.params.at("job");
    auto it = std::find_if(v.record.jobs.begin(), v.record.jobs.end(), [&](const auto& j) { return j.id == id; });
    if (it == v.record.jobs.end()) fail(ErrorCode::kNotFound, "unknown job " + id);
    ojson events = ojson::array();
    for (const auto& t : v.log) {
      if (t.job == id) events.push_back(transition_json(t));
    }
    if (events_only) {
      send(c.res, 200, ojson{{"events", events}, {"next", events.size()}});
      return;
    }
    ojson j = job_json(*it, job_statuses(v).at(id));
    j["events"] = events;
    send(c.res, 200, j);
  }

  void list_artifacts(Call& c) {
    auto v = visible_run(c);
    ojson arr = ojson::array();
    for (std::size_t i = 0; i < v.record.artifacts.size(); ++i) {
      ojson a = repository::to_json(v.record.artifacts[i]);
      a["index"] = i;
      arr.push_back(a);
    }
    send(c.res, 200, arr);
  }

  void download_artifact(Call& c) {
    auto v = visible_run(c);
    const int index = parse_int(c.params.at("index"), "artifact");
    if (index < 0 || static_cast<std::size_t>(index) >= v.record.artifacts.size()) {
      fail(ErrorCode::kNotFound, "no artifact " + c.params.at("index"));
    }
    const auto& a = v.record.artifacts[static_cast<std::size_t>(index)];
    if (a.synthetic) fail(ErrorCode::kNotFound, "artifact " + a.path + " is simulated and has no content");
    std::error_code ec;
    const auto path = fs::weakly_canonical(a.path, ec);
    const auto root = fs::weakly_canonical(store.root(), ec);
    const auto rel = path.lexically_relative(root);
    if (ec || rel.empty() || *rel.begin() == ".." || !fs::is_regular_file(path)) {
      fail(ErrorCode::kNotFound, "artifact file is no longer available");
    }
    std::ifstream in(path, std::ios::binary);
    std::ostringstream data;
    data << in.rdbuf();
    c.res.set_header("Content-Disposition", "attachment; filename=\"" + path.filename().string() + "\"");
    c.res.set_content(data.str(), "application/octet-stream");
    c.res.status = 200;
  }

  void occupancy(Call& c) {
    ojson arr = ojson::array();
    auto add = [&](const RunView& v) {
      if (v.snapshot) arr.push_back(snapshot_json(v.record.id, *v.snapshot));
    };
    if (c.req.has_param("run")) {
      c.params["run"] = c.req.get_param_value("run");
      add(visible_run(c));
    } else {
      for (const auto& r : runs.runs()) {
        if (r.status != repository::RunStatus::kRunning) continue;
        if (!c.admin() && r.submitter != c.me().username) continue;
        add(runs.view(r.id));
      }
    }
    send(c.res, 200, ojson{{"snapshots", arr}});
  }
};

Server::Server(repository::Store& store, RunManager& runs, ServerConfig config)
    : impl_(std::make_unique<Impl>(store, runs, std::move(config))) {
  impl_->install();
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) fail(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void Server::serve() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace gatehub::service
