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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gatehub/common/error.h"
#include "gatehub/resource/model.h"
#include "gatehub/scheduler/job.h"
#include "gatehub/scheduler/policy.h"

namespace gatehub::scheduler {

struct QueueOccupancy {
  std::string site;
  std::string queue;
  int idle_cores = 0;
  int queued_jobs = 0;
  int running_jobs = 0;
  /// Cores held (queued or running) per user in this queue.
  std::map<std::string, int> user_cores;
  bool stale = false;

  std::string key() const { return site + "/" + queue; }
  bool operator==(const QueueOccupancy&) const = default;
};

struct OccupancySnapshot {
  double taken_at = 0.0;
  std::vector<QueueOccupancy> entries;

  const QueueOccupancy* find(std::string_view site, std::string_view queue) const;
  bool operator==(const OccupancySnapshot&) const = default;
};

/// What the planner needs to know about one eligible job.
struct PlanItem {
  std::string job_id;
  std::string user;
  resource::Estimate estimate;
  bool checkpointable = false;
  std::optional<std::string> pin;  // "site/queue"
  double min_walltime_exclusive = 0.0;
};

PlanItem plan_item(const Job& job);

struct Candidate {
  const resource::Site* site = nullptr;
  const resource::Queue* queue = nullptr;
  long idle_cores = 0;
};

/// Orders candidate queues; `better(a, b)` means a should be chosen over b.
class RankingPolicy {
 public:
  virtual ~RankingPolicy() = default;
  virtual std::string_view name() const = 0;
  virtual bool better(const Candidate& a, const Candidate& b) const = 0;
};

/// Most idle cores first, then the shortest walltime, then queue and site
/// name.
class EmptiestBestFit final : public RankingPolicy {
 public:
  std::string_view name() const override { return "emptiest-best-fit"; }
  bool better(const Candidate& a, const Candidate& b) const override;
};

const RankingPolicy& default_ranking();

struct UnschedulableJob {
  std::string job_id;
  ErrorCode reason = ErrorCode::kUnschedulable;
  std::string detail;
};

struct PlanResult {
  std::vector<Assignment> assignments;
  /// Feasible somewhere but blocked by per-user caps or stale sites in
  /// this round; they stay eligible.
  std::vector<std::string> deferred;
  std::vector<UnschedulableJob> unschedulable;
};

/// Splits the job into checkpoint-chained segments that each fit the
/// queue: segments = ceil(runtime * safety / walltime). Throws
/// kNotCheckpointable, or kUnschedulable when the cores exceed the cap.
Assignment segment_job(const PlanItem& item, const resource::Site& site, const resource::Queue& queue,
                       const Policy& policy);

/// Pure function of its inputs. Jobs are placed in input order; per-user
/// core caps and idle cores are consumed cumulatively within the plan.
PlanResult plan(std::span<const PlanItem> items, const OccupancySnapshot& snapshot,
                const std::vector<resource::Site>& sites, const Policy& policy,
                const RankingPolicy& ranking = default_ranking());

}  // namespace gatehub::scheduler
