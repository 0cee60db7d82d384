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

// Independent replay of a simulator trace: recomputes occupancy from the
// queued/started/ended events alone and reports the first violation of
// capacity, per-user caps, walltime exactness, FIFO order or clock order.

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gatehub/execution/sim_cluster.h"

namespace gatehub::testing {

struct TraceJob {
  std::string user;
  int cores = 1;
};

inline std::int64_t secs(double minutes) { return std::llround(minutes * 60.0); }

/// Empty string when the trace is consistent.
inline std::string validate_trace(const std::vector<execution::ExecEvent>& trace,
                                  const std::vector<resource::Site>& sites,
                                  const std::map<std::string, TraceJob>& jobs) {
  using scheduler::EventKind;
  std::ostringstream err;
  std::map<std::string, long> site_used;
  std::map<std::string, int> user_used;  // "site/queue/user"
  std::map<std::string, std::int64_t> started_at;
  std::map<std::string, std::deque<std::string>> fifo;  // queue key -> waiting job ids in order
  std::int64_t last = 0;
  auto queue_of = [&](const std::string& key) -> const resource::Queue* {
    const auto slash = key.find('/');
    for (const auto& s : sites) {
      if (s.name == key.substr(0, slash)) return s.find_queue(key.substr(slash + 1));
    }
    return nullptr;
  };
  auto site_of = [&](const std::string& key) -> const resource::Site* {
    for (const auto& s : sites) {
      if (s.name == key.substr(0, key.find('/'))) return &s;
    }
    return nullptr;
  };
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& e = trace[i];
    const auto t = secs(e.at);
    if (t < last) err << "event " << i << ": clock went backwards\n";
    last = t;
    const auto& j = jobs.at(e.job_id);
    const auto* q = queue_of(e.queue);
    const auto* s = site_of(e.queue);
    if (q == nullptr || s == nullptr) {
      err << "event " << i << ": unknown queue " << e.queue << "\n";
      continue;
    }
    const std::string ukey = e.queue + "/" + j.user;
    switch (e.kind) {
      case EventKind::kQueued:
        fifo[e.queue].push_back(e.job_id);
        break;
      case EventKind::kStarted: {
        auto& waiting = fifo[e.queue];
        for (const auto& earlier : waiting) {
          if (earlier == e.job_id) break;
          const auto& o = jobs.at(earlier);
          if (o.user == j.user && o.cores == j.cores) err << "event " << i << ": " << e.job_id << " overtook " << earlier << "\n";
        }
        std::erase(waiting, e.job_id);
        site_used[s->name] += j.cores;
        user_used[ukey] += j.cores;
        started_at[e.job_id] = t;
        if (site_used[s->name] > s->total_cores) err << "event " << i << ": site " << s->name << " over capacity\n";
        if (user_used[ukey] > q->cores_per_user) err << "event " << i << ": user cap exceeded on " << e.queue << "\n";
        break;
      }
      case EventKind::kExited:
      case EventKind::kWalltimeKilled:
      case EventKind::kLost: {
        const auto elapsed = t - started_at.at(e.job_id);
        if (e.kind == EventKind::kWalltimeKilled && elapsed != secs(q->walltime)) {
          err << "event " << i << ": killed after " << elapsed << "s, walltime " << secs(q->walltime) << "s\n";
        }
        if (!std::isinf(q->walltime) && elapsed > secs(q->walltime)) err << "event " << i << ": ran past walltime\n";
        site_used[s->name] -= j.cores;
        user_used[ukey] -= j.cores;
        break;
      }
    }
  }
  return err.str();
}

struct RandomTrace {
  std::vector<resource::Site> sites;
  std::map<std::string, TraceJob> jobs;
  std::vector<execution::ExecEvent> trace;
  std::string ndjson;
};

/// Drives a fresh simulator with random submissions until at least
/// `min_events` events were traced and the cluster drained.
inline RandomTrace random_trace(std::uint64_t seed, std::size_t min_events) {
  std::mt19937_64 rng(seed);
  auto uni = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  RandomTrace out;
  const std::vector<double> walltimes{30, 60, 90, 120, 180, 11520};
  const int n_sites = uni(1, 3);
  for (int s = 0; s < n_sites; ++s) {
    resource::Site site{"s" + std::to_string(s), resource::SiteKind::kSimulatedCluster, {}, uni(8, 64)};
    const int nq = uni(1, 3);
    for (int q = 0; q < nq; ++q) {
      site.queues.push_back({"q" + std::to_string(q), walltimes[uni(0, 5)], uni(1, 8) * 4, site.name});
    }
    out.sites.push_back(site);
  }
  execution::SimConfig cfg;
  cfg.seed = seed;
  cfg.sigma = 0.3;
  cfg.failure_rate = 0.1;
  execution::SimCluster sim(out.sites, cfg);
  int n = 0;
  while (sim.trace().size() < min_events) {
    const auto& site = out.sites[uni(0, n_sites - 1)];
    const auto& q = site.queues[uni(0, static_cast<int>(site.queues.size()) - 1)];
    execution::SimCluster::Submission sub;
    sub.job_id = "job" + std::to_string(n++);
    sub.user = "u" + std::to_string(uni(0, 2));
    sub.cores = std::min({1 << uni(0, 3), q.cores_per_user, site.total_cores});
    sub.site = site.name;
    sub.queue = q.name;
    sub.runtime = uni(1, 200);
    out.jobs[sub.job_id] = {sub.user, sub.cores};
    sim.submit_sim(sub);
    sim.advance(sim.now() + uni(0, 30));
  }
  sim.advance(std::numeric_limits<double>::infinity());
  out.trace = sim.trace();
  out.ndjson = sim.trace_ndjson();
  return out;
}

}  // namespace gatehub::testing
