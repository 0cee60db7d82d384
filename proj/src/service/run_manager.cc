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


#include "gatehub/service/run_manager.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <future>
#include <iostream>

#include "gatehub/common/crypto.h"
#include "gatehub/common/error.h"

namespace gatehub::service {

using repository::RunRecord;
using repository::RunStatus;
using scheduler::Transition;

namespace {

bool valid_run_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '-' || c == '_';
  });
}

template <typename Vec, typename Name>
auto find_named(Vec& v, const Name& name) {
  return std::find_if(v.begin(), v.end(), [&](const auto& p) { return p.first == name; });
}

}  // namespace

bool template_visible(const repository::TemplateEntry& t, const repository::User& user) {
  return t.published || t.owner == user.username || user.role == repository::Role::kAdmin;
}

std::optional<repository::TemplateEntry> resolve_template(const repository::Store& store, const std::string& name,
                                                          std::optional<int> version, const repository::User& user) {
  if (version) {
    auto t = store.get_template(name, version);
    if (t && template_visible(*t, user)) return t;
    return std::nullopt;
  }
  std::optional<repository::TemplateEntry> best;
  for (auto& t : store.templates()) {
    if (t.name == name && template_visible(t, user) && (!best || t.version > best->version)) best = std::move(t);
  }
  return best;
}

workflow::SweepSpec merge_sweep(const workflow::SweepSpec& base, const workflow::SweepSpec& overrides) {
  workflow::SweepSpec out = base;
  for (const auto& axis : overrides.axes) {
    if (auto it = find_named(out.axes, axis.first); it != out.axes.end()) {
      it->second = axis.second;
      continue;
    }
    if (auto c = find_named(out.constants, axis.first); c != out.constants.end()) out.constants.erase(c);
    out.axes.push_back(axis);
  }
  for (const auto& constant : overrides.constants) {
    if (auto it = find_named(out.constants, constant.first); it != out.constants.end()) {
      it->second = constant.second;
      continue;
    }
    if (auto a = find_named(out.axes, constant.first); a != out.axes.end()) out.axes.erase(a);
    out.constants.push_back(constant);
  }
  return out;
}

RunRecord prepare_run(const repository::TemplateEntry& entry, const RunRequest& request,
                      const std::string& submitter) {
  if (request.backend != "sim" && request.backend != "local") {
    fail(ErrorCode::kValidationFailed, "backend must be \"sim\" or \"local\", got \"" + request.backend + "\"");
  }
  if (!request.run_id.empty() && !valid_run_id(request.run_id)) {
    fail(ErrorCode::kValidationFailed, "run id may only contain letters, digits, '-' and '_'");
  }
  if (request.sim_sigma < 0 || request.sim_failure_rate < 0 || request.sim_failure_rate > 1) {
    fail(ErrorCode::kValidationFailed, "sim sigma must be >= 0 and failure_rate within [0, 1]");
  }
  for (const auto& [node, minutes] : request.true_runtime) {
    if (!entry.workflow.graph.find_node(node)) fail(ErrorCode::kValidationFailed, "true_runtime names unknown node " + node);
    if (!(minutes > 0)) fail(ErrorCode::kValidationFailed, "true_runtime for " + node + " must be positive");
  }

  RunRecord r;
  r.id = request.run_id.empty() ? "run-" + random_hex(6) : request.run_id;
  r.template_name = entry.name;
  r.template_version = entry.version;
  r.sweep = merge_sweep(entry.workflow.sweep, request.sweep);
  r.submitter = submitter;
  r.backend = request.backend;
  r.seed = request.seed;
  r.policy = request.policy.value_or(scheduler::Policy{});
  r.created_at = repository::utc_now();
  r.idempotency_key = request.idempotency_key;
  if (request.points) r.points.assign(request.points->begin(), request.points->end());
  r.sim_sigma = request.sim_sigma;
  r.sim_failure_rate = request.sim_failure_rate;
  r.true_runtime = request.true_runtime;

  workflow::JobSet jobs = expand_record(entry, r);
  if (jobs.jobs.empty()) fail(ErrorCode::kValidationFailed, "the request selects no sweep points");
  for (const auto& j : jobs.jobs) {
    r.jobs.push_back({j.id, j.node_id, j.point_index, j.params, j.depends_on});
  }
  return r;
}

workflow::JobSet expand_record(const repository::TemplateEntry& entry, const RunRecord& record) {
  workflow::Workflow wf = entry.workflow;
  wf.sweep = record.sweep;
  try {
    workflow::check_workflow(wf);
  } catch (const Error& e) {
    fail(ErrorCode::kValidationFailed, std::string(to_string(e.code())) + ": " + e.what());
  }
  workflow::JobSet jobs = workflow::expand_sweep(wf, record.id);
  if (!record.points.empty()) {
    std::erase_if(jobs.jobs, [&](const workflow::JobSpec& j) {
      return std::find(record.points.begin(), record.points.end(), j.point_index) == record.points.end();
    });
    std::erase_if(jobs.dependencies, [&](const auto& kv) {
      return std::none_of(jobs.jobs.begin(), jobs.jobs.end(), [&](const auto& j) { return j.id == kv.first; });
    });
  }
  return jobs;
}

std::unique_ptr<execution::Executor> make_executor(const RunRecord& record, const std::vector<resource::Site>& sites,
                                                   const execution::LocalConfig& local) {
  if (record.backend == "local") return std::make_unique<execution::LocalExecutor>(sites, local);
  execution::SimConfig sim;
  sim.seed = record.seed;
  sim.sigma = record.sim_sigma;
  sim.failure_rate = record.sim_failure_rate;
  return std::make_unique<execution::SimCluster>(sites, sim);
}

namespace {

void apply_true_runtimes(engine::RunEngine& engine, const RunRecord& record) {
  if (record.true_runtime.empty()) return;
  for (const auto& j : record.jobs) {
    if (auto it = record.true_runtime.find(j.node); it != record.true_runtime.end()) {
      engine.set_true_runtime(j.id, it->second);
    }
  }
}

}  // namespace

std::vector<Transition> simulate_record(const repository::TemplateEntry& entry, const RunRecord& record,
                                        const std::vector<resource::Site>& sites, const engine::TransitionSink& sink) {
  workflow::JobSet jobs = expand_record(entry, record);
  RunRecord sim_record = record;
  sim_record.backend = "sim";
  auto executor = make_executor(sim_record, sites, {});
  engine::RunEngine eng(jobs, record.submitter, sites, *executor, record.policy, sink);
  apply_true_runtimes(eng, record);
  eng.start();
  eng.run_to_completion();
  return eng.log();
}

// ---------------------------------------------------------------------------

RunManager::RunManager(repository::Store& store, ManagerConfig config) : store_(store), config_(std::move(config)) {
  if (config_.local.runs_root.empty() || config_.local.runs_root == "runs") {
    config_.local.runs_root = store_.root() / "runs";
  }
  resume();
  worker_ = std::jthread([this](std::stop_token st) { loop(st); });
}

RunManager::~RunManager() {
  worker_.request_stop();
  cmd_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void RunManager::resume() {
  for (RunRecord record : store_.runs()) {
    if (record.status != RunStatus::kRunning) continue;
    auto events = store_.events(record.id);
    store_.rewrite_events(record.id, events);
    if (record.backend != "sim") {
      // A local job's processes died with the previous service instance.
      record.status = RunStatus::kInterrupted;
      record.ended_at = repository::utc_now();
      store_.update_run(record);
      std::lock_guard lk(views_mu_);
      views_[record.id] = RunView{record, std::move(events), std::nullopt};
      continue;
    }
    {
      std::lock_guard lk(views_mu_);
      views_[record.id] = RunView{record, events, std::nullopt};
    }
    post([this, record, events = std::move(events)]() mutable { launch(std::move(record), std::move(events)); });
  }
}

void RunManager::post(std::function<void()> command) {
  {
    std::lock_guard lk(cmd_mu_);
    commands_.push_back(std::move(command));
  }
  cmd_cv_.notify_all();
}

std::pair<RunRecord, bool> RunManager::submit(const RunRequest& request, const repository::User& user) {
  std::lock_guard guard(submit_mu_);
  if (!request.idempotency_key.empty()) {
    if (auto existing = store_.run_for_key(user.username, request.idempotency_key)) {
      return {view(*existing).record, false};
    }
  }
  auto entry = resolve_template(store_, request.template_name, request.version, user);
  if (!entry) fail(ErrorCode::kNotFound, "no template named " + request.template_name);
  if (!request.run_id.empty()) {
    bool taken = false;
    try {
      store_.get_run(request.run_id);
      taken = true;
    } catch (const Error&) {
    }
    if (taken) fail(ErrorCode::kVersionConflict, "run id " + request.run_id + " already exists");
  }

  RunRecord record = prepare_run(*entry, request, user.username);
  store_.create_run(record);
  {
    std::lock_guard lk(views_mu_);
    views_[record.id] = RunView{record, {}, std::nullopt};
  }
  post([this, record] { launch(record, {}); });
  return {record, true};
}

void RunManager::launch(RunRecord record, std::vector<Transition> replay) {
  auto run = std::make_unique<Active>();
  Active* a = run.get();
  a->record = record;
  a->replay = std::move(replay);
  try {
    auto entry = store_.get_template(record.template_name, record.template_version);
    if (!entry) fail(ErrorCode::kNotFound, "template " + record.template_name + " disappeared");
    workflow::JobSet jobs = expand_record(*entry, record);
    const auto& sites = record.backend == "local" ? config_.local_sites : config_.sim_sites;
    a->executor = make_executor(record, sites, config_.local);
    a->engine = std::make_unique<engine::RunEngine>(jobs, record.submitter, sites, *a->executor, record.policy,
                                                    [this, a](const Transition& t) { on_transition(*a, t); });
    apply_true_runtimes(*a->engine, record);
    active_[record.id] = std::move(run);
    a->engine->start();
  } catch (const std::exception& e) {
    std::cerr << "run " << record.id << " could not start: " << e.what() << "\n";
    active_.erase(record.id);
    record.status = RunStatus::kInterrupted;
    record.ended_at = repository::utc_now();
    store_.update_run(record);
    std::lock_guard lk(views_mu_);
    views_[record.id].record = record;
    views_cv_.notify_all();
  }
}

void RunManager::on_transition(Active& run, const Transition& t) {
  std::size_t index = run.emitted++;
  if (!run.diverged && index < run.replay.size()) {
    if (run.replay[index] == t) return;
    // Re-execution departed from the persisted log; keep the agreed prefix.
    run.diverged = true;
    std::vector<Transition> prefix(run.replay.begin(), run.replay.begin() + static_cast<std::ptrdiff_t>(index));
    store_.rewrite_events(run.record.id, prefix);
    std::lock_guard lk(views_mu_);
    views_[run.record.id].log = std::move(prefix);
  }
  store_.append_event(run.record.id, t);
  std::lock_guard lk(views_mu_);
  views_[run.record.id].log.push_back(t);
}

void RunManager::finish(Active& run) {
  if (!run.diverged && run.emitted < run.replay.size()) {
    std::vector<Transition> prefix(run.replay.begin(), run.replay.begin() + static_cast<std::ptrdiff_t>(run.emitted));
    store_.rewrite_events(run.record.id, prefix);
    std::lock_guard lk(views_mu_);
    views_[run.record.id].log = std::move(prefix);
  }
  RunRecord& r = run.record;
  r.status = run.cancelled ? RunStatus::kCancelled : RunStatus::kComplete;
  r.ended_at = repository::utc_now();
  r.artifacts = run.engine->artifacts();
  store_.update_run(r);
  {
    std::lock_guard lk(views_mu_);
    auto& v = views_[r.id];
    v.record = r;
    v.snapshot = run.engine->snapshot();
  }
  views_cv_.notify_all();
}

void RunManager::cancel(const std::string& run_id, const std::string& by) {
  store_.get_run(run_id);  // throws kUnknownRun
  auto done = std::make_shared<std::promise<void>>();
  auto fut = done->get_future();
  post([this, run_id, by, done] {
    if (auto it = active_.find(run_id); it != active_.end()) {
      Active& a = *it->second;
      a.cancelled = true;
      a.engine->cancel("cancelled by " + by);
      finish(a);
      active_.erase(it);
    }
    done->set_value();
  });
  fut.wait();
}

void RunManager::loop(std::stop_token stop) {
  using namespace std::chrono_literals;
  while (!stop.stop_requested()) {
    std::deque<std::function<void()>> batch;
    {
      std::unique_lock lk(cmd_mu_);
      if (active_.empty()) {
        cmd_cv_.wait_for(lk, 50ms, [&] { return !commands_.empty() || stop.stop_requested(); });
      }
      batch.swap(commands_);
    }
    for (auto& command : batch) command();

    bool any_sim = false;
    for (auto it = active_.begin(); it != active_.end();) {
      Active& a = *it->second;
      bool sim = a.executor->backend() == execution::Backend::kSim;
      any_sim = any_sim || sim;
      bool done = false;
      try {
        a.engine->step(sim ? 0.0 : 0.002);
        done = a.engine->complete();
      } catch (const std::exception& e) {
        std::cerr << "run " << a.record.id << " aborted: " << e.what() << "\n";
        a.engine->cancel(std::string("engine error: ") + e.what());
        done = true;
      }
      {
        std::lock_guard lk(views_mu_);
        views_[a.record.id].snapshot = a.engine->snapshot();
      }
      if (done) {
        finish(a);
        it = active_.erase(it);
      } else {
        ++it;
      }
    }
    if (any_sim && config_.sim_pace_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(config_.sim_pace_ms));
  }
}

RunView RunManager::view(const std::string& run_id) const {
  {
    std::lock_guard lk(views_mu_);
    if (auto it = views_.find(run_id); it != views_.end()) return it->second;
  }
  RunView v{store_.get_run(run_id), store_.events(run_id), std::nullopt};
  std::lock_guard lk(views_mu_);
  return views_.emplace(run_id, std::move(v)).first->second;
}

std::vector<RunRecord> RunManager::runs() const {
  auto records = store_.runs();
  std::lock_guard lk(views_mu_);
  for (auto& r : records) {
    if (auto it = views_.find(r.id); it != views_.end()) r = it->second.record;
  }
  return records;
}

scheduler::RunSummary RunManager::summary(const std::string& run_id) const {
  RunView v = view(run_id);
  std::vector<scheduler::JobRef> refs;
  for (const auto& j : v.record.jobs) refs.push_back({j.id, j.node});
  return scheduler::summarize(run_id, refs, v.log);
}

bool RunManager::active(const std::string& run_id) const {
  return view(run_id).record.status == RunStatus::kRunning;
}

bool RunManager::wait(const std::string& run_id, double timeout_s) const {
  view(run_id);
  std::unique_lock lk(views_mu_);
  return views_cv_.wait_for(lk, std::chrono::duration<double>(timeout_s), [&] {
    return views_.at(run_id).record.status != RunStatus::kRunning;
  });
}

}  // namespace gatehub::service
