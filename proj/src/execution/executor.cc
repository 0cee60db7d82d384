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

#include "gatehub/execution/executor.h"

#include <fnmatch.h>

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "gatehub/common/error.h"
#include "gatehub/workflow/workflow.h"

namespace gatehub::execution {

std::string_view to_string(Backend b) { return b == Backend::kLocal ? "local" : "sim"; }

std::string to_ndjson(const ExecEvent& e) {
  using scheduler::EventKind;
  using scheduler::JobState;
  JobState from = JobState::kRunning;
  JobState to = JobState::kFinished;
  switch (e.kind) {
    case EventKind::kQueued: from = JobState::kEligible; to = JobState::kQueued; break;
    case EventKind::kStarted: from = JobState::kQueued; to = JobState::kRunning; break;
    case EventKind::kExited: to = e.exit_code == 0 ? JobState::kFinished : JobState::kFailed; break;
    case EventKind::kWalltimeKilled: to = JobState::kKilledWalltime; break;
    case EventKind::kLost: to = JobState::kFailed; break;
  }
  nlohmann::ordered_json j{{"ts", e.at},
                           {"job", e.job_id},
                           {"from", scheduler::to_string(from)},
                           {"to", scheduler::to_string(to)},
                           {"detail", e.detail},
                           {"attempt", e.attempt},
                           {"queue", e.queue}};
  return j.dump();
}

std::map<std::string, std::string> checkpoint_contract(int k, int n, const std::filesystem::path& checkpoint_dir) {
  std::map<std::string, std::string> env;
  if (n <= 1) return env;
  if (k < 1 || k > n) fail(ErrorCode::kInvalidArgument, "segment index out of range");
  auto file = [&checkpoint_dir](int i) { return (checkpoint_dir / ("segment-" + std::to_string(i) + ".ckpt")).string(); };
  if (k == 1) {
    env["CKPT_IN"] = "";
  } else {
    const auto in = file(k - 1);
    if (!std::filesystem::exists(in)) fail(ErrorCode::kMissingCheckpoint, in);
    env["CKPT_IN"] = in;
  }
  env["CKPT_OUT"] = file(k);
  return env;
}

CollectResult synthetic_artifacts(const scheduler::Job& job, const std::string& run_id, double size_scale) {
  CollectResult out;
  for (const auto& o : job.spec.outputs) {
    const auto bytes = static_cast<std::uint64_t>(std::llround(workflow::midpoint_bytes(o.data_class, size_scale)));
    const auto report = workflow::classify_size(bytes, o.data_class, size_scale);
    out.records.push_back({job.id(), o.port, "sim://" + run_id + "/" + job.id() + "/" + o.pattern, bytes,
                           o.data_class, report.within_expected, true});
  }
  return out;
}

CollectResult collect_outputs(const scheduler::Job& job, const std::filesystem::path& outputs_dir,
                              double size_scale) {
  CollectResult out;
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (auto it = std::filesystem::recursive_directory_iterator(outputs_dir, ec);
       !ec && it != std::filesystem::recursive_directory_iterator(); it.increment(ec)) {
    if (it->is_regular_file()) files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& o : job.spec.outputs) {
    const std::filesystem::path* match = nullptr;
    for (const auto& f : files) {
      const auto rel = f.lexically_relative(outputs_dir).string();
      if (fnmatch(o.pattern.c_str(), rel.c_str(), 0) == 0) {
        match = &f;
        break;
      }
    }
    if (match == nullptr) {
      out.missing.push_back(o.pattern);
      continue;
    }
    const auto report = workflow::classify_output(*match, o.data_class, size_scale);
    out.records.push_back({job.id(), o.port, match->string(), report.bytes, o.data_class,
                           report.within_expected, false});
  }
  return out;
}

}  // namespace gatehub::execution
