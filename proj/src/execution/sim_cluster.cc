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

#include "gatehub/execution/sim_cluster.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gatehub/common/error.h"
#include "gatehub/resource/resource.h"

namespace gatehub::execution {

using scheduler::EventKind;

namespace {

std::int64_t to_seconds(double minutes) {
  return std::max<std::int64_t>(1, std::llround(minutes * 60.0));
}

}  // namespace

SimCluster::SimCluster(std::vector<resource::Site> sites, SimConfig config) : config_(config), rng_(config.seed) {
  sites_.reserve(sites.size());
  for (auto& s : sites) {
    resource::check_site(s);
    sites_.push_back({std::move(s), {}, 0, true});
  }
  for (auto& s : sites_) {
    for (const auto& q : s.site.queues) s.queues.push_back({&q, {}});
  }
}

std::vector<std::string> SimCluster::sites() const {
  std::vector<std::string> names;
  for (const auto& s : sites_) names.push_back(s.site.name);
  return names;
}

SimCluster::SiteState& SimCluster::site_state(const std::string& name) {
  for (auto& s : sites_) {
    if (s.site.name == name) return s;
  }
  fail(ErrorCode::kUnknownQueue, "unknown site " + name);
}

SimCluster::QueueState& SimCluster::queue_state(SiteState& s, const std::string& queue) {
  for (auto& q : s.queues) {
    if (q.queue->name == queue) return q;
  }
  fail(ErrorCode::kUnknownQueue, "unknown queue " + s.site.name + "/" + queue);
}

int SimCluster::user_running(const std::string& site, const std::string& queue, const std::string& user) const {
  int n = 0;
  for (const auto& r : running_) {
    if (r.p.sub.site == site && r.p.sub.queue == queue && r.p.sub.user == user) n += r.p.sub.cores;
  }
  return n;
}

std::vector<scheduler::QueueOccupancy> SimCluster::poll(const std::string& site) const {
  const SiteState* s = nullptr;
  for (const auto& st : sites_) {
    if (st.site.name == site) s = &st;
  }
  if (s == nullptr) fail(ErrorCode::kNotFound, "unknown site " + site);
  if (!s->reachable) fail(ErrorCode::kSiteUnreachable, site + " is unreachable");
  std::vector<scheduler::QueueOccupancy> out;
  for (const auto& q : s->queues) {
    scheduler::QueueOccupancy occ{site, q.queue->name, static_cast<int>(s->site.total_cores - s->used), 0, 0, {}, false};
    occ.queued_jobs = static_cast<int>(q.waiting.size());
    for (const auto& w : q.waiting) occ.user_cores[w.sub.user] += w.sub.cores;
    for (const auto& r : running_) {
      if (r.p.sub.site != site || r.p.sub.queue != q.queue->name) continue;
      ++occ.running_jobs;
      occ.user_cores[r.p.sub.user] += r.p.sub.cores;
    }
    out.push_back(std::move(occ));
  }
  return out;
}

ExecutorHandle SimCluster::submit(const SubmitRequest& request) {
  if (request.job == nullptr) fail(ErrorCode::kInvalidArgument, "submit without a job");
  const auto& job = *request.job;
  Submission s;
  s.job_id = job.id();
  s.user = job.user;
  s.cores = job.estimate.cores;
  s.site = request.site;
  s.queue = request.queue;
  s.runtime = request.runtime;
  if (job.true_runtime) s.true_runtime = *job.true_runtime / request.segments;
  s.attempt = job.attempt;
  s.segment = request.segment;
  s.force_fail = std::find(job.spec.args.begin(), job.spec.args.end(), "--fail") != job.spec.args.end();
  return submit_sim(s);
}

ExecutorHandle SimCluster::submit_sim(const Submission& sub) {
  auto& site = site_state(sub.site);
  auto& queue = queue_state(site, sub.queue);
  if (sub.cores > site.site.total_cores || sub.cores > queue.queue->cores_per_user) {
    fail(ErrorCode::kUnschedulable, "job " + sub.job_id + " can never start on " + sub.site + "/" + sub.queue);
  }
  Pending p{sub, 0, std::nullopt, ++seq_};
  double minutes = sub.runtime;
  if (sub.true_runtime) {
    minutes = *sub.true_runtime;
  } else if (config_.sigma > 0) {
    minutes *= std::lognormal_distribution<double>(0.0, config_.sigma)(rng_);
  }
  p.runtime_s = to_seconds(minutes);
  if (config_.failure_rate > 0 && std::bernoulli_distribution(config_.failure_rate)(rng_)) {
    p.fail_after_s = std::uniform_int_distribution<std::int64_t>(1, p.runtime_s)(rng_);
  }
  if (sub.force_fail) p.fail_after_s = p.runtime_s;
  emit({now(), sub.job_id, sub.attempt, sub.segment, EventKind::kQueued, 0, "", sub.site + "/" + sub.queue});
  queue.waiting.push_back(std::move(p));
  start_ready();
  return {sub.job_id, Backend::kSim, seq_};
}

void SimCluster::cancel(const std::string& job_id) {
  for (auto& s : sites_) {
    for (auto& q : s.queues) {
      std::erase_if(q.waiting, [&](const Pending& p) { return p.sub.job_id == job_id; });
    }
  }
  for (auto it = running_.begin(); it != running_.end();) {
    if (it->p.sub.job_id == job_id) {
      site_state(it->p.sub.site).used -= it->p.sub.cores;
      it = running_.erase(it);
    } else {
      ++it;
    }
  }
  start_ready();
}

CollectResult SimCluster::collect(const scheduler::Job& job, const std::string& run_id) {
  return synthetic_artifacts(job, run_id, config_.size_scale);
}

bool SimCluster::busy() const {
  if (!running_.empty() || !pending_events_.empty()) return true;
  for (const auto& s : sites_) {
    for (const auto& q : s.queues) {
      if (!q.waiting.empty()) return true;
    }
  }
  return false;
}

void SimCluster::emit(ExecEvent e) {
  trace_.push_back(e);
  if (e.kind != EventKind::kQueued) pending_events_.push_back(std::move(e));
}

void SimCluster::start_ready() {
  for (auto& s : sites_) {
    for (auto& q : s.queues) {
      for (auto it = q.waiting.begin(); it != q.waiting.end();) {
        const auto& sub = it->sub;
        const bool fits_site = s.used + sub.cores <= s.site.total_cores;
        const bool fits_user = user_running(s.site.name, q.queue->name, sub.user) + sub.cores <= q.queue->cores_per_user;
        if (!fits_site || !fits_user) {
          ++it;
          continue;
        }
        Running r{*it, clock_, 0, EventKind::kExited, 0};
        const std::int64_t wall = std::isinf(q.queue->walltime) ? std::numeric_limits<std::int64_t>::max() / 4
                                                                : std::llround(q.queue->walltime * 60.0);
        if (it->fail_after_s && *it->fail_after_s <= it->runtime_s && *it->fail_after_s < wall) {
          r.end = clock_ + *it->fail_after_s;
          r.exit_code = 1;
        } else if (it->runtime_s > wall) {
          r.end = clock_ + wall;
          r.kind = EventKind::kWalltimeKilled;
        } else {
          r.end = clock_ + it->runtime_s;
        }
        s.used += sub.cores;
        emit({now(), sub.job_id, sub.attempt, sub.segment, EventKind::kStarted, 0, "", s.site.name + "/" + q.queue->name});
        running_.push_back(std::move(r));
        it = q.waiting.erase(it);
      }
    }
  }
}

std::optional<double> SimCluster::next_event_time() const {
  if (running_.empty()) return std::nullopt;
  std::int64_t t = running_.front().end;
  for (const auto& r : running_) t = std::min(t, r.end);
  return static_cast<double>(t) / 60.0;
}

std::vector<ExecEvent> SimCluster::advance(double until) {
  const std::int64_t limit = std::isinf(until) ? std::numeric_limits<std::int64_t>::max() : std::llround(until * 60.0);
  if (limit < clock_) fail(ErrorCode::kInvalidArgument, "advance into the past");
  while (!running_.empty()) {
    std::int64_t t = running_.front().end;
    for (const auto& r : running_) t = std::min(t, r.end);
    if (t > limit) break;
    clock_ = t;
    // Completions at one instant are handled in submission order, then any
    // freed cores are offered to the waiting queues.
    std::vector<Running> done;
    for (auto it = running_.begin(); it != running_.end();) {
      if (it->end == t) {
        done.push_back(std::move(*it));
        it = running_.erase(it);
      } else {
        ++it;
      }
    }
    std::sort(done.begin(), done.end(), [](const Running& a, const Running& b) { return a.p.seq < b.p.seq; });
    for (const auto& r : done) {
      site_state(r.p.sub.site).used -= r.p.sub.cores;
      const std::string detail = r.kind == EventKind::kWalltimeKilled ? "" : (r.exit_code ? "simulated failure" : "");
      emit({now(), r.p.sub.job_id, r.p.sub.attempt, r.p.sub.segment, r.kind, r.exit_code, detail,
            r.p.sub.site + "/" + r.p.sub.queue});
    }
    start_ready();
  }
  if (!std::isinf(until)) clock_ = std::max(clock_, limit);
  return std::exchange(pending_events_, {});
}

std::vector<ExecEvent> SimCluster::wait_events(double /*max_wait_s*/) {
  if (!pending_events_.empty()) return std::exchange(pending_events_, {});
  const auto t = next_event_time();
  if (!t) return {};
  return advance(*t);
}

void SimCluster::set_reachable(const std::string& site, bool reachable) { site_state(site).reachable = reachable; }

std::string SimCluster::trace_ndjson() const {
  std::string out;
  for (const auto& e : trace_) out += to_ndjson(e) + "\n";
  return out;
}

}  // namespace gatehub::execution
