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

#include <algorithm>
#include <fstream>
#include <random>

#include "doctest.h"

#include "gatehub/resource/resource.h"
#include "gatehub/scheduler/planner.h"
#include "gatehub/scheduler/state_machine.h"
#include "gatehub/scheduler/summary.h"
#include "plan_oracle.h"
#include "test_support.h"

using namespace gatehub;
using namespace gatehub::scheduler;

namespace {

std::vector<resource::Site> ntu_cluster() {
  return resource::load_site_config(testing::source_dir() / "sites" / "ntu-hpcc.json");
}

OccupancySnapshot all_idle(const std::vector<resource::Site>& sites) {
  OccupancySnapshot snap;
  for (const auto& s : sites) {
    for (const auto& q : s.queues) snap.entries.push_back({s.name, q.name, s.total_cores, 0, 0, {}, false});
  }
  return snap;
}

PlanItem item(std::string id, double runtime, int cores, bool checkpointable = false) {
  PlanItem i;
  i.job_id = std::move(id);
  i.user = "alice";
  i.estimate = {runtime, 0.0, cores};
  i.checkpointable = checkpointable;
  return i;
}

Policy exact() {
  Policy p;
  p.safety = 1.0;
  return p;
}

Job running_job(double estimate, int attempt = 1) {
  workflow::JobSpec spec;
  spec.id = "j1";
  spec.node_id = "lammps";
  Job job = make_job(spec, "alice", 3);
  job.estimate = {estimate, 0.0, 4};
  job.state = JobState::kRunning;
  job.attempt = attempt;
  job.assignment = Assignment{"j1", "ntu-hpcc", "kh-large", 1, estimate};
  return job;
}

}  // namespace

TEST_CASE("plan: 150-minute job on idle queues goes to ku-normal") {
  const auto sites = ntu_cluster();
  const std::vector<PlanItem> items{item("a", 150, 4)};
  const auto r = plan(items, all_idle(sites), sites, exact());
  REQUIRE(r.assignments.size() == 1);
  CHECK(r.assignments[0].queue == "ku-normal");
  CHECK(r.assignments[0].segments == 1);
}

TEST_CASE("plan: per-user cap pushes the second 32-core job off ku-small") {
  // With one shared idle pool, ku-normal and kh-large tie on idle cores and
  // the shorter walltime (kh-large, 120 min) wins the tie.
  const auto sites = ntu_cluster();
  const std::vector<PlanItem> items{item("a", 60, 32), item("b", 60, 32)};
  const auto r = plan(items, all_idle(sites), sites, exact());
  REQUIRE(r.assignments.size() == 2);
  CHECK(r.assignments[0].queue == "ku-small");
  CHECK(r.assignments[1].queue == "kh-large");
  CHECK(r.deferred.empty());
}

TEST_CASE("plan: no eligible jobs gives an empty plan") {
  const auto sites = ntu_cluster();
  const auto r = plan({}, all_idle(sites), sites, Policy{});
  CHECK(r.assignments.empty());
  CHECK(r.deferred.empty());
  CHECK(r.unschedulable.empty());
}

TEST_CASE("plan: idle cores outrank walltime") {
  auto sites = ntu_cluster();
  auto snap = all_idle(sites);
  // Nothing idle on ku-normal's site means nothing idle anywhere on it, so
  // add a second site with spare cores and a long queue.
  resource::Site other{"other", resource::SiteKind::kSimulatedCluster, {{"long", 11520, 32, "other"}}, 512};
  sites.push_back(other);
  snap.entries.push_back({"other", "long", 512, 0, 0, {}, false});
  const std::vector<PlanItem> items{item("a", 60, 8)};
  const auto r = plan(items, snap, sites, exact());
  REQUIRE(r.assignments.size() == 1);
  CHECK(r.assignments[0].site == "other");
}

TEST_CASE("plan: stale sites are skipped") {
  const auto sites = ntu_cluster();
  auto snap = all_idle(sites);
  for (auto& e : snap.entries) e.stale = true;
  const std::vector<PlanItem> items{item("a", 60, 4)};
  const auto r = plan(items, snap, sites, exact());
  CHECK(r.assignments.empty());
  CHECK(r.deferred == std::vector<std::string>{"a"});
}

TEST_CASE("plan: pinned jobs bypass ranking") {
  const auto sites = ntu_cluster();
  auto i = item("a", 10, 4);
  i.pin = "ntu-hpcc/ku-single";
  auto bad = item("b", 10, 4);
  bad.pin = "ntu-hpcc/nope";
  const std::vector<PlanItem> items{i, bad};
  const auto r = plan(items, all_idle(sites), sites, exact());
  REQUIRE(r.assignments.size() == 1);
  CHECK(r.assignments[0].queue == "ku-single");
  REQUIRE(r.unschedulable.size() == 1);
  CHECK(r.unschedulable[0].reason == ErrorCode::kUnknownQueue);
}

TEST_CASE("plan: too many cores everywhere is unschedulable") {
  const auto sites = ntu_cluster();
  const std::vector<PlanItem> items{item("a", 60, 512, true)};
  const auto r = plan(items, all_idle(sites), sites, exact());
  REQUIRE(r.unschedulable.size() == 1);
  CHECK(r.unschedulable[0].reason == ErrorCode::kUnschedulable);
}

TEST_CASE("plan: over-long jobs are segmented or rejected") {
  resource::Site site{"c", resource::SiteKind::kSimulatedCluster, {{"ku-normal", 180, 32, "c"}}, 64};
  const std::vector<resource::Site> sites{site};
  const std::vector<PlanItem> items{item("ok", 300, 4, true), item("no", 300, 4, false)};
  const auto r = plan(items, all_idle(sites), sites, exact());
  REQUIRE(r.assignments.size() == 1);
  CHECK(r.assignments[0].segments == 2);
  CHECK(r.assignments[0].segment_runtime == doctest::Approx(150));
  REQUIRE(r.unschedulable.size() == 1);
  CHECK(r.unschedulable[0].reason == ErrorCode::kNotCheckpointable);
}

TEST_CASE("segment_job examples") {
  const resource::Site site{"c", resource::SiteKind::kSimulatedCluster,
                            {{"ku-normal", 180, 32, "c"}, {"kh-large", 120, 128, "c"}}, 256};
  // ceil(300 / 180) = 2 segments of 150; 150 <= 180.
  auto a = segment_job(item("x", 300, 4, true), site, site.queues[0], exact());
  CHECK(a.segments == 2);
  CHECK(a.segment_runtime == 150.0);
  CHECK(a.segments * a.segment_runtime >= 300.0);
  // Exact fit needs no split.
  a = segment_job(item("y", 120, 4, true), site, site.queues[1], exact());
  CHECK(a.segments == 1);
  CHECK(a.segment_runtime == 120.0);
  CHECK_THROWS_WITH_AS(segment_job(item("z", 300, 4, false), site, site.queues[0], exact()),
                       doctest::Contains("not checkpointable"), Error);
  // Safety applies per segment: 300 * 1.15 / 180 = 1.92 -> 2 segments, 172.5 <= 180.
  Policy p;
  a = segment_job(item("w", 300, 4, true), site, site.queues[0], p);
  CHECK(a.segments == 2);
  CHECK(a.segment_runtime * p.safety <= 180.0);
}

TEST_CASE("segment_job: segments always fit and cover the runtime") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double wt = std::uniform_int_distribution<int>(1, 2000)(rng);
    const double rt = std::uniform_real_distribution<double>(0.1, 50000)(rng);
    const double safety = std::uniform_real_distribution<double>(1.0, 2.0)(rng);
    const resource::Site site{"c", resource::SiteKind::kSimulatedCluster, {{"q", wt, 8, "c"}}, 8};
    Policy p;
    p.safety = safety;
    const auto a = segment_job(item("x", rt, 1, true), site, site.queues[0], p);
    CHECK(a.segments >= 1);
    CHECK(a.segment_runtime * safety <= wt);
    CHECK(a.segment_runtime * a.segments == doctest::Approx(rt));
    if (a.segments > 1) CHECK(rt / (a.segments - 1) * safety > wt);  // minimal
  }
}

TEST_CASE("plan matches the brute-force oracle on random instances") {
  std::mt19937_64 rng(20260101);
  int segmented = 0, deferred = 0, unschedulable = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto in = testing::random_plan_instance(rng);
    Policy p;
    p.safety = in.safety;
    const auto r = plan(in.items, in.snapshot, in.sites, p);
    const auto diff = testing::compare_with_oracle(in, r);
    INFO("instance " << i);
    CHECK_MESSAGE(diff.empty(), diff);
    // Pure function: identical inputs, identical output.
    const auto again = plan(in.items, in.snapshot, in.sites, p);
    CHECK(again.assignments == r.assignments);
    for (const auto& a : r.assignments) segmented += a.segments > 1;
    deferred += static_cast<int>(r.deferred.size());
    unschedulable += static_cast<int>(r.unschedulable.size());
  }
  // The generator must reach every branch of the planner.
  CHECK(segmented > 0);
  CHECK(deferred > 0);
  CHECK(unschedulable > 0);
}

TEST_CASE("state machine: documented examples") {
  const Policy policy;
  Job job = running_job(60);
  auto out = on_job_event(job, {EventKind::kExited, 0, ""}, policy);
  CHECK(out.final_state(job.state) == JobState::kFinished);
  CHECK(out.actions.empty());

  out = on_job_event(job, {EventKind::kExited, 1, ""}, policy);
  CHECK(out.final_state(job.state) == JobState::kFailed);
  REQUIRE(out.actions.size() == 1);
  CHECK(out.actions[0].kind == ActionKind::kResubmit);

  // 110 * 1.5 = 165 <= 180 and the next queue must be longer than 120.
  job = running_job(110);
  out = on_job_event(job, {EventKind::kWalltimeKilled, 0, ""}, policy, 120);
  CHECK(out.final_state(job.state) == JobState::kKilledWalltime);
  REQUIRE(out.actions.size() == 1);
  CHECK(out.actions[0].kind == ActionKind::kReplan);
  CHECK(out.actions[0].inflated_runtime == doctest::Approx(165));
  CHECK(out.actions[0].min_walltime_exclusive == 120);

  const auto sites = ntu_cluster();
  auto replanned = item("j1", out.actions[0].inflated_runtime, 4);
  replanned.min_walltime_exclusive = out.actions[0].min_walltime_exclusive;
  const std::vector<PlanItem> items{replanned};
  const auto r = plan(items, all_idle(sites), sites, exact());
  REQUIRE(r.assignments.size() == 1);
  CHECK(r.assignments[0].queue == "ku-normal");
}

TEST_CASE("state machine: last attempt is terminal and cascades") {
  const Policy policy;
  const Job job = running_job(60, 3);
  auto out = on_job_event(job, {EventKind::kExited, 2, ""}, policy);
  REQUIRE(out.steps.size() == 2);
  CHECK(out.steps[0].to == JobState::kFailed);
  CHECK(out.steps[1].to == JobState::kTerminallyFailed);
  REQUIRE(out.actions.size() == 1);
  CHECK(out.actions[0].kind == ActionKind::kCancelDownstream);

  out = on_job_event(job, {EventKind::kWalltimeKilled, 0, ""}, policy, 120);
  CHECK(out.final_state(job.state) == JobState::kTerminallyFailed);
}

TEST_CASE("state machine: illegal events and absorbing states") {
  const Policy policy;
  Job job = running_job(60);
  job.state = JobState::kCreated;
  CHECK_THROWS_AS(on_job_event(job, {EventKind::kStarted, 0, ""}, policy), Error);
  for (auto terminal : {JobState::kFinished, JobState::kCancelled, JobState::kTerminallyFailed}) {
    job.state = terminal;
    for (auto kind : {EventKind::kQueued, EventKind::kStarted, EventKind::kExited, EventKind::kWalltimeKilled,
                      EventKind::kLost}) {
      CHECK_THROWS_AS(on_job_event(job, {kind, 0, ""}, policy, 120), Error);
    }
    for (auto to : kAllJobStates) CHECK_FALSE(transition_allowed(terminal, to));
  }
}

TEST_CASE("state machine: random event sequences stay on the machine") {
  std::mt19937_64 rng(99);
  const Policy policy;
  const EventKind kinds[] = {EventKind::kQueued, EventKind::kStarted, EventKind::kExited, EventKind::kWalltimeKilled,
                             EventKind::kLost};
  for (int trial = 0; trial < 500; ++trial) {
    Job job = running_job(100);
    job.state = JobState::kEligible;
    job.assignment = Assignment{"j1", "c", "q", std::uniform_int_distribution<int>(1, 3)(rng), 50};
    for (int step = 0; step < 60 && !is_terminal(job.state); ++step) {
      const JobEvent ev{kinds[std::uniform_int_distribution<int>(0, 4)(rng)],
                        std::uniform_int_distribution<int>(0, 2)(rng), ""};
      Outcome out;
      try {
        out = on_job_event(job, ev, policy, 120);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kIllegalTransition);
        continue;
      }
      for (const auto& s : out.steps) {
        CHECK(transition_allowed(job.state, s.to));
        job.state = s.to;
      }
      for (const auto& a : out.actions) {
        if (a.kind == ActionKind::kResubmit) ++job.attempt;
        if (a.kind == ActionKind::kReplan) {
          ++job.attempt;
          CHECK(transition_allowed(job.state, JobState::kEligible));
          job.state = JobState::kEligible;
        }
        if (a.kind == ActionKind::kNextSegment) ++job.segment;
        if (a.kind == ActionKind::kCancelDownstream) CHECK(job.state == JobState::kTerminallyFailed);
      }
      CHECK(job.attempt <= job.max_attempts);
    }
  }
}

TEST_CASE("run summary: counts and faulty filter") {
  std::vector<JobRef> refs;
  for (int i = 0; i < 6; ++i) refs.push_back({"j" + std::to_string(i), "n" + std::to_string(i)});

  auto fresh = summarize("r1", refs, {});
  CHECK(fresh.total == 6);
  CHECK(fresh.counts == std::map<JobState, int>{{JobState::kCreated, 6}});
  CHECK(fresh.faulty.empty());
  CHECK_FALSE(fresh.complete);

  // j0 fails three times; j1 and j2 sit downstream of it.
  std::vector<Transition> ev;
  double t = 0;
  auto go = [&](const std::string& job, JobState from, JobState to, int attempt = 1) {
    ev.push_back({t += 1, job, from, to, "", attempt, "c/q"});
  };
  for (int i = 0; i < 6; ++i) go(refs[i].id, JobState::kCreated, JobState::kEligible);
  for (int a = 1; a <= 3; ++a) {
    go("j0", a == 1 ? JobState::kEligible : JobState::kFailed, JobState::kQueued, a);
    go("j0", JobState::kQueued, JobState::kRunning, a);
    go("j0", JobState::kRunning, JobState::kFailed, a);
  }
  go("j0", JobState::kFailed, JobState::kTerminallyFailed, 3);
  go("j1", JobState::kEligible, JobState::kCancelled);
  go("j2", JobState::kEligible, JobState::kCancelled);
  for (int i = 3; i < 6; ++i) {
    go(refs[i].id, JobState::kEligible, JobState::kQueued);
    go(refs[i].id, JobState::kQueued, JobState::kRunning);
    go(refs[i].id, JobState::kRunning, JobState::kFinished);
  }
  const auto s = summarize("r1", refs, ev);
  CHECK(s.counts == std::map<JobState, int>{
                        {JobState::kFinished, 3}, {JobState::kTerminallyFailed, 1}, {JobState::kCancelled, 2}});
  CHECK(s.complete);
  // Three failed attempts; the terminal step follows a failure and is not repeated.
  REQUIRE(s.faulty.size() == 3);
  CHECK(s.faulty[2].attempt == 3);

  int sum = 0;
  for (const auto& [_, n] : s.counts) sum += n;
  CHECK(sum == s.total);

  const auto back = summary_from_json(nlohmann::json::parse(to_json(s).dump()));
  CHECK(back == s);
}

TEST_CASE("event log: ndjson round trip and torn tail") {
  const auto dir = testing::scratch_dir("evlog");
  std::vector<Transition> ev{{0.5, "j1", JobState::kCreated, JobState::kEligible, "", 1, ""},
                             {1.25, "j1", JobState::kEligible, JobState::kQueued, "queued \"x\"", 1, "c/q"}};
  const auto path = dir / "events.ndjson";
  {
    std::ofstream out(path);
    for (const auto& t : ev) out << to_ndjson(t) << "\n";
    out << R"({"ts":2,"job":"j1","fr)";
  }
  CHECK(read_event_log(path) == ev);
  CHECK(to_ndjson(ev[0]).find(R"({"ts":0.5,"job":"j1","from":"created","to":"eligible")") == 0);

  {
    std::ofstream out(path);
    out << "garbage\n" << to_ndjson(ev[0]) << "\n";
  }
  CHECK_THROWS_AS(read_event_log(path), Error);
  std::filesystem::remove_all(dir);
}
