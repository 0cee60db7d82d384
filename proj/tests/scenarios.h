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

// End-to-end scenarios shared by the engine tests and the acceptance runner.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "gatehub/engine/run_engine.h"
#include "gatehub/execution/local_executor.h"
#include "gatehub/execution/sim_cluster.h"
#include "gatehub/resource/resource.h"
#include "test_support.h"

namespace gatehub::testing {

inline std::vector<resource::Site> ntu_sites() {
  return resource::load_site_config(source_dir() / "sites" / "ntu-hpcc.json");
}

inline std::vector<resource::Site> local_sites() {
  return resource::load_site_config(source_dir() / "sites" / "local.json");
}

/// One LAMMPS job estimated at 110 minutes whose true runtime is 130.
inline workflow::JobSet underestimated_job() {
  workflow::JobSet set;
  set.run_id = "walltime";
  workflow::JobSpec spec;
  spec.id = "j-lammps";
  spec.run_id = set.run_id;
  spec.node_id = "lammps";
  spec.profile = "lammps";
  spec.executable = "mock-lammps";
  spec.outputs.push_back({"dump", "dump.txt", resource::DataClass::kTextHuge});
  spec.estimate = {110.0, 2048.0, 4};
  spec.checkpointable = false;
  set.jobs.push_back(spec);
  return set;
}

struct WalltimeScenario {
  std::vector<scheduler::Transition> log;
  scheduler::RunSummary summary;
  scheduler::JobState final_state = scheduler::JobState::kCreated;
};

/// Exact-estimate policy on the ntu-hpcc cluster: the job first lands on
/// kh-large (120 min), is killed, and is re-planned at 110 x 1.5 = 165 min.
inline WalltimeScenario run_walltime_scenario() {
  execution::SimConfig cfg;
  cfg.sigma = 0.0;
  execution::SimCluster sim(ntu_sites(), cfg);
  scheduler::Policy policy;
  policy.safety = 1.0;
  engine::RunEngine eng(underestimated_job(), "alice", ntu_sites(), sim, policy);
  eng.set_true_runtime("j-lammps", 130.0);
  eng.start();
  eng.run_to_completion(30.0);
  return {eng.log(), eng.summary(), eng.job("j-lammps").state};
}

/// Downstream closure of the terminally failed jobs of a finished run.
inline std::set<std::string> downstream_closure(const engine::RunEngine& eng) {
  std::set<std::string> out;
  std::vector<std::string> todo;
  for (const auto& j : eng.jobs()) {
    if (j.state == scheduler::JobState::kTerminallyFailed) todo.push_back(j.id());
  }
  while (!todo.empty()) {
    const auto id = todo.back();
    todo.pop_back();
    for (const auto& d : eng.downstream(id)) {
      if (out.insert(d).second) todo.push_back(d);
    }
  }
  for (const auto& j : eng.jobs()) {
    if (j.state == scheduler::JobState::kTerminallyFailed) out.erase(j.id());
  }
  return out;
}

}  // namespace gatehub::testing
