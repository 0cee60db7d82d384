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

#include "gatehub/engine/run_engine.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "gatehub/common/error.h"

namespace gatehub::engine {

using scheduler::EventKind;
using scheduler::Job;
using scheduler::JobState;

scheduler::OccupancySnapshot poll(const execution::Executor& executor, const std::vector<resource::Site>& sites,
                                  const scheduler::OccupancySnapshot& previous) {
  scheduler::OccupancySnapshot snap;
  snap.taken_at = executor.now();
  for (const auto& site : sites) {
    try {
      for (auto& e : executor.poll(site.name)) snap.entries.push_back(std::move(e));
      continue;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSiteUnreachable) throw;
    }
    for (const auto& q : site.queues) {
      scheduler::QueueOccupancy entry{site.name, q.name, 0, 0, 0, {}, true};
      if (const auto* last = previous.find(site.name, q.name)) {
        entry = *last;
        entry.stale = true;
      }
      snap.entries.push_back(std::move(entry));
    }
  }
  return snap;
}

RunEngine::RunEngine(const workflow::JobSet& jobs, std::string user, std::vector<resource::Site> sites,
                     execution::Executor& executor, scheduler::Policy policy, TransitionSink sink)
    : run_id_(jobs.run_id),
      sites_(std::move(sites)),
      executor_(executor),
      policy_(policy),
      sink_(std::move(sink)) {
  for (const auto& spec : jobs.jobs) {
    index_[spec.id] = jobs_.size();
    jobs_.push_back(scheduler::make_job(spec, user, policy_.max_attempts));
    downstream_[spec.id];
  }
  for (const auto& j : jobs_) {
    for (const auto& dep : j.spec.depends_on) downstream_[dep].push_back(j.id());
  }
}

void RunEngine::set_true_runtime(const std::string& job_id, double minutes) { mut(job_id).true_runtime = minutes; }

scheduler::Job& RunEngine::mut(const std::string& id) {
  auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::kNotFound, "unknown job " + id);
  return jobs_[it->second];
}

const scheduler::Job& RunEngine::job(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::kNotFound, "unknown job " + id);
  return jobs_[it->second];
}

const std::vector<std::string>& RunEngine::downstream(const std::string& id) const { return downstream_.at(id); }

bool RunEngine::complete() const {
  return std::all_of(jobs_.begin(), jobs_.end(), [](const Job& j) { return scheduler::is_terminal(j.state); });
}

scheduler::RunSummary RunEngine::summary() const {
  std::vector<scheduler::JobRef> refs;
  for (const auto& j : jobs_) refs.push_back({j.id(), j.spec.node_id});
  return scheduler::summarize(run_id_, refs, log_);
}

std::vector<execution::ArtifactRecord> RunEngine::artifacts() const {
  std::vector<execution::ArtifactRecord> out;
  for (const auto& j : jobs_) {
    if (auto it = artifacts_.find(j.id()); it != artifacts_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

void RunEngine::transition(Job& job, JobState to, const std::string& detail) {
  if (!scheduler::transition_allowed(job.state, to)) {
    fail(ErrorCode::kInvariantViolation, "job " + job.id() + ": " + std::string(scheduler::to_string(job.state)) +
                                             " -> " + std::string(scheduler::to_string(to)));
  }
  scheduler::Transition t{executor_.now(), job.id(), job.state, to, detail, job.attempt,
                          job.assignment ? job.assignment->queue_key() : ""};
  job.state = to;
  job.history.push_back(t);
  log_.push_back(t);
  if (sink_) sink_(t);
}

double RunEngine::queue_walltime(const Job& job) const {
  if (!job.assignment) return 0.0;
  for (const auto& s : sites_) {
    if (s.name != job.assignment->site) continue;
    if (const auto* q = s.find_queue(job.assignment->queue)) return q->walltime;
  }
  return 0.0;
}

void RunEngine::start() { tick(); }

void RunEngine::tick() {
  for (auto& j : jobs_) {
    if (j.state != JobState::kCreated) continue;
    const bool ready = std::all_of(j.spec.depends_on.begin(), j.spec.depends_on.end(),
                                   [this](const std::string& d) { return job(d).state == JobState::kFinished; });
    if (ready) transition(j, JobState::kEligible, j.spec.depends_on.empty() ? "" : "dependencies finished");
  }

  std::vector<scheduler::PlanItem> items;
  for (const auto& j : jobs_) {
    if (j.state == JobState::kEligible) items.push_back(scheduler::plan_item(j));
  }
  if (items.empty()) return;

  snapshot_ = poll(executor_, sites_, snapshot_);
  const auto result = scheduler::plan(items, snapshot_, sites_, policy_);
  for (const auto& a : result.assignments) {
    auto& j = mut(a.job_id);
    j.assignment = a;
    j.segment = 1;
    std::ostringstream detail;
    detail << "planned to " << a.queue_key();
    if (a.segments > 1) detail << " in " << a.segments << " segments";
    for (const auto& s : scheduler::on_job_event(j, {EventKind::kQueued, 0, detail.str()}, policy_).steps) {
      transition(j, s.to, s.detail);
    }
    submit(j);
  }
  for (const auto& u : result.unschedulable) {
    auto& j = mut(u.job_id);
    transition(j, JobState::kTerminallyFailed, "unschedulable: " + u.detail);
    cascade(j);
  }
}

void RunEngine::submit(Job& job) {
  execution::SubmitRequest req;
  req.job = &job;
  req.run_id = run_id_;
  req.site = job.assignment->site;
  req.queue = job.assignment->queue;
  req.segment = job.segment;
  req.segments = job.assignment->segments;
  req.runtime = job.assignment->segment_runtime;
  for (const auto& in : job.spec.inputs) {
    if (!in.from_upstream()) {
      req.inputs.push_back({in.port, in.path});
      continue;
    }
    const auto it = artifacts_.find(in.upstream_job);
    if (it == artifacts_.end()) continue;
    for (const auto& rec : it->second) {
      if (rec.port == in.upstream_port && !rec.synthetic) req.inputs.push_back({in.port, rec.path});
    }
  }
  try {
    executor_.submit(req);
  } catch (const Error& e) {
    deliver(job, {EventKind::kLost, 0, std::string(to_string(e.code())) + ": " + e.what()});
  }
}

void RunEngine::deliver(Job& job, const scheduler::JobEvent& event) {
  const auto out = scheduler::on_job_event(job, event, policy_, queue_walltime(job));
  for (const auto& s : out.steps) transition(job, s.to, s.detail);
  for (const auto& a : out.actions) {
    switch (a.kind) {
      case scheduler::ActionKind::kResubmit:
        ++job.attempt;
        job.segment = 1;
        transition(job, JobState::kQueued, "resubmit attempt " + std::to_string(job.attempt) + " to " +
                                               job.assignment->queue_key());
        submit(job);
        break;
      case scheduler::ActionKind::kReplan: {
        ++job.attempt;
        job.estimate.runtime = a.inflated_runtime;
        job.min_walltime_exclusive = a.min_walltime_exclusive;
        job.pin_active = false;
        std::ostringstream detail;
        detail << "re-plan attempt " << job.attempt << " with estimate " << a.inflated_runtime << " min";
        transition(job, JobState::kEligible, detail.str());
        job.assignment.reset();
        break;
      }
      case scheduler::ActionKind::kNextSegment:
        ++job.segment;
        submit(job);
        break;
      case scheduler::ActionKind::kCancelDownstream:
        cascade(job);
        break;
    }
  }
}

void RunEngine::cascade(const Job& failed) {
  std::deque<std::string> todo(downstream_.at(failed.id()).begin(), downstream_.at(failed.id()).end());
  std::set<std::string> seen;
  while (!todo.empty()) {
    const auto id = todo.front();
    todo.pop_front();
    if (!seen.insert(id).second) continue;
    auto& j = mut(id);
    if (!scheduler::is_terminal(j.state)) {
      if (j.state == JobState::kQueued || j.state == JobState::kRunning) executor_.cancel(j.id());
      transition(j, JobState::kCancelled, "upstream " + failed.spec.node_id + " (" + failed.id() + ") failed");
    }
    for (const auto& d : downstream_.at(id)) todo.push_back(d);
  }
}

void RunEngine::fail_stalled() {
  for (auto& j : jobs_) {
    if (j.state == JobState::kQueued || j.state == JobState::kRunning) {
      deliver(j, {EventKind::kLost, 0, "executor has no record of the job"});
    }
  }
  for (auto& j : jobs_) {
    if (j.state == JobState::kEligible) {
      transition(j, JobState::kTerminallyFailed, "stalled: no queue became available");
      cascade(j);
    }
  }
}

bool RunEngine::step(double max_wait_s) {
  if (complete()) return false;
  const auto events = executor_.wait_events(max_wait_s);
  for (const auto& e : events) {
    auto it = index_.find(e.job_id);
    if (it == index_.end()) continue;
    auto& j = jobs_[it->second];
    // Drop reports from superseded attempts or segments.
    if (scheduler::is_terminal(j.state) || e.attempt != j.attempt || e.segment != j.segment) continue;
    if (e.kind == EventKind::kQueued) continue;
    scheduler::JobEvent ev{e.kind, e.exit_code, e.detail};
    const bool last_segment = !j.assignment || j.segment >= j.assignment->segments;
    if (e.kind == EventKind::kExited && e.exit_code == 0 && last_segment) {
      auto collected = executor_.collect(j, run_id_);
      if (!collected.missing.empty()) {
        ev.exit_code = 1;
        ev.detail = "missing output: " + collected.missing.front();
      } else {
        artifacts_[j.id()] = std::move(collected.records);
      }
    }
    deliver(j, ev);
  }
  tick();
  if (events.empty() && !executor_.busy() && !complete()) {
    // Nothing in flight and nothing could be placed.
    fail_stalled();
  }
  return !complete();
}

bool RunEngine::run_to_completion(double timeout_s) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  while (step()) {
    if (std::chrono::steady_clock::now() > deadline) return false;
  }
  return true;
}

void RunEngine::cancel(const std::string& reason) {
  for (auto& j : jobs_) {
    if (scheduler::is_terminal(j.state)) continue;
    if (j.state == JobState::kQueued || j.state == JobState::kRunning) executor_.cancel(j.id());
    transition(j, JobState::kCancelled, reason);
  }
}

}  // namespace gatehub::engine
