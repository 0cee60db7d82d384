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

#include "gatehub/scheduler/planner.h"

#include <cmath>

#include "gatehub/resource/resource.h"

namespace gatehub::scheduler {

const QueueOccupancy* OccupancySnapshot::find(std::string_view site, std::string_view queue) const {
  for (const auto& e : entries) {
    if (e.site == site && e.queue == queue) return &e;
  }
  return nullptr;
}

PlanItem plan_item(const Job& job) {
  PlanItem item;
  item.job_id = job.id();
  item.user = job.user;
  item.estimate = job.estimate;
  item.checkpointable = job.spec.checkpointable;
  if (job.pin_active) item.pin = job.spec.queue_pin;
  item.min_walltime_exclusive = job.min_walltime_exclusive;
  return item;
}

bool EmptiestBestFit::better(const Candidate& a, const Candidate& b) const {
  if (a.idle_cores != b.idle_cores) return a.idle_cores > b.idle_cores;
  if (a.queue->walltime != b.queue->walltime) return a.queue->walltime < b.queue->walltime;
  if (a.queue->name != b.queue->name) return a.queue->name < b.queue->name;
  return a.site->name < b.site->name;
}

const RankingPolicy& default_ranking() {
  static const EmptiestBestFit kDefault;
  return kDefault;
}

Assignment segment_job(const PlanItem& item, const resource::Site& site, const resource::Queue& queue,
                       const Policy& policy) {
  if (!item.checkpointable) {
    fail(ErrorCode::kNotCheckpointable, "job " + item.job_id + " is not checkpointable");
  }
  if (item.estimate.cores > queue.cores_per_user) {
    fail(ErrorCode::kUnschedulable, "job " + item.job_id + " needs more cores than " + queue.name + " allows");
  }
  Assignment a{item.job_id, site.name, queue.name, 1, item.estimate.runtime};
  if (std::isinf(queue.walltime)) return a;
  a.segments = std::max(1, static_cast<int>(std::ceil(item.estimate.runtime * policy.safety / queue.walltime)));
  a.segment_runtime = item.estimate.runtime / a.segments;
  while (a.segment_runtime * policy.safety > queue.walltime) {
    ++a.segments;
    a.segment_runtime = item.estimate.runtime / a.segments;
  }
  return a;
}

namespace {

// Mutable bookkeeping for one planning round.
class Ledger {
 public:
  Ledger(const OccupancySnapshot& snapshot) : snapshot_(snapshot) {}

  const QueueOccupancy* live(const resource::Site& site, const resource::Queue& q) const {
    const auto* e = snapshot_.find(site.name, q.name);
    return (e == nullptr || e->stale) ? nullptr : e;
  }

  long idle(const resource::Site& site, const resource::Queue& q) const {
    const auto* e = live(site, q);
    auto it = site_used_.find(site.name);
    return static_cast<long>(e->idle_cores) - (it == site_used_.end() ? 0 : it->second);
  }

  int cap_left(const resource::Site& site, const resource::Queue& q, const std::string& user) const {
    const auto* e = live(site, q);
    int held = 0;
    if (auto it = e->user_cores.find(user); it != e->user_cores.end()) held = it->second;
    auto it = planned_.find({site.name + "/" + q.name, user});
    if (it != planned_.end()) held += it->second;
    return q.cores_per_user - held;
  }

  void commit(const resource::Site& site, const resource::Queue& q, const std::string& user, int cores) {
    site_used_[site.name] += cores;
    planned_[{site.name + "/" + q.name, user}] += cores;
  }

 private:
  const OccupancySnapshot& snapshot_;
  std::map<std::string, long> site_used_;
  std::map<std::pair<std::string, std::string>, int> planned_;
};

const resource::Site* find_site(const std::vector<resource::Site>& sites, std::string_view name) {
  for (const auto& s : sites) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

}  // namespace

PlanResult plan(std::span<const PlanItem> items, const OccupancySnapshot& snapshot,
                const std::vector<resource::Site>& sites, const Policy& policy, const RankingPolicy& ranking) {
  PlanResult result;
  Ledger ledger(snapshot);

  for (const auto& item : items) {
    const int cores = item.estimate.cores;

    if (item.pin) {
      const auto slash = item.pin->find('/');
      const auto* site = slash == std::string::npos ? nullptr : find_site(sites, item.pin->substr(0, slash));
      const auto* queue = site ? site->find_queue(item.pin->substr(slash + 1)) : nullptr;
      if (queue == nullptr) {
        result.unschedulable.push_back({item.job_id, ErrorCode::kUnknownQueue, "unknown pinned queue " + *item.pin});
      } else if (cores > queue->cores_per_user) {
        result.unschedulable.push_back({item.job_id, ErrorCode::kUnschedulable, "pinned queue cap too small"});
      } else if (ledger.live(*site, *queue) == nullptr || ledger.cap_left(*site, *queue, item.user) < cores) {
        result.deferred.push_back(item.job_id);
      } else {
        ledger.commit(*site, *queue, item.user, cores);
        result.assignments.push_back({item.job_id, site->name, queue->name, 1, item.estimate.runtime});
      }
      continue;
    }

    std::vector<resource::QueueRef> feasible;
    for (const auto& ref : resource::feasible_queues(item.estimate, sites, policy.safety)) {
      if (ref.queue->walltime > item.min_walltime_exclusive) feasible.push_back(ref);
    }

    if (!feasible.empty()) {
      std::optional<Candidate> best;
      for (const auto& ref : feasible) {
        if (ledger.live(*ref.site, *ref.queue) == nullptr) continue;
        if (ledger.cap_left(*ref.site, *ref.queue, item.user) < cores) continue;
        Candidate c{ref.site, ref.queue, ledger.idle(*ref.site, *ref.queue)};
        if (!best || ranking.better(c, *best)) best = c;
      }
      if (!best) {
        result.deferred.push_back(item.job_id);
        continue;
      }
      ledger.commit(*best->site, *best->queue, item.user, cores);
      result.assignments.push_back({item.job_id, best->site->name, best->queue->name, 1, item.estimate.runtime});
      continue;
    }

    // Nothing fits in one piece: split across checkpoints.
    if (!item.checkpointable) {
      result.unschedulable.push_back({item.job_id, ErrorCode::kNotCheckpointable,
                                      "no queue walltime fits and the job is not checkpointable"});
      continue;
    }
    bool any_static = false;
    std::optional<Candidate> best;
    std::optional<Assignment> best_assignment;
    for (const auto& site : sites) {
      for (const auto& q : site.queues) {
        if (std::isinf(q.walltime) || cores > q.cores_per_user) continue;
        any_static = true;
        if (ledger.live(site, q) == nullptr || ledger.cap_left(site, q, item.user) < cores) continue;
        auto a = segment_job(item, site, q, policy);
        Candidate c{&site, &q, ledger.idle(site, q)};
        const bool take = !best || a.segments < best_assignment->segments ||
                          (a.segments == best_assignment->segments && ranking.better(c, *best));
        if (take) {
          best = c;
          best_assignment = a;
        }
      }
    }
    if (!any_static) {
      result.unschedulable.push_back({item.job_id, ErrorCode::kUnschedulable, "no queue admits the requested cores"});
    } else if (!best) {
      result.deferred.push_back(item.job_id);
    } else {
      ledger.commit(*best->site, *best->queue, item.user, cores);
      result.assignments.push_back(*best_assignment);
    }
  }
  return result;
}

}  // namespace gatehub::scheduler
