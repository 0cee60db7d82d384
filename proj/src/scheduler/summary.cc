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

#include "gatehub/scheduler/summary.h"

#include <algorithm>
#include <fstream>

#include "gatehub/common/error.h"

namespace gatehub::scheduler {

using nlohmann::json;
using nlohmann::ordered_json;

std::map<std::string, JobState> replay_states(const std::vector<JobRef>& jobs,
                                              const std::vector<Transition>& events) {
  std::map<std::string, JobState> states;
  for (const auto& j : jobs) states[j.id] = JobState::kCreated;
  for (const auto& e : events) {
    if (auto it = states.find(e.job); it != states.end()) it->second = e.to;
  }
  return states;
}

RunSummary summarize(const std::string& run_id, const std::vector<JobRef>& jobs,
                     const std::vector<Transition>& events) {
  RunSummary s;
  s.run_id = run_id;
  s.total = static_cast<int>(jobs.size());
  std::map<std::string, std::string> node_of;
  for (const auto& j : jobs) node_of[j.id] = j.node;

  for (const auto& e : events) {
    if (!is_faulty(e.to)) continue;
    if (e.to == JobState::kTerminallyFailed && is_faulty(e.from)) continue;
    s.faulty.push_back({e.job, node_of[e.job], e.attempt, e.to, e.detail, e.queue, e.ts});
  }
  const auto states = replay_states(jobs, events);
  s.complete = true;
  for (const auto& [id, state] : states) {
    ++s.counts[state];
    if (!is_terminal(state)) s.complete = false;
  }
  return s;
}

RunSummary summarize(const std::string& run_id, const std::vector<Job>& jobs) {
  std::vector<JobRef> refs;
  std::vector<Transition> events;
  for (const auto& j : jobs) {
    refs.push_back({j.id(), j.spec.node_id});
    events.insert(events.end(), j.history.begin(), j.history.end());
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Transition& a, const Transition& b) { return a.ts < b.ts; });
  return summarize(run_id, refs, events);
}

ordered_json to_json(const RunSummary& s) {
  ordered_json counts = ordered_json::object();
  for (auto state : kAllJobStates) {
    if (auto it = s.counts.find(state); it != s.counts.end() && it->second > 0) {
      counts[std::string(to_string(state))] = it->second;
    }
  }
  ordered_json faulty = ordered_json::array();
  for (const auto& f : s.faulty) {
    faulty.push_back({{"job", f.job},
                      {"node", f.node},
                      {"attempt", f.attempt},
                      {"state", to_string(f.state)},
                      {"detail", f.detail},
                      {"queue", f.queue},
                      {"ts", f.ts}});
  }
  return {{"run", s.run_id}, {"total", s.total}, {"complete", s.complete},
          {"counts", std::move(counts)}, {"faulty", std::move(faulty)}};
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  s.run_id = j.at("run").get<std::string>();
  s.total = j.at("total").get<int>();
  s.complete = j.at("complete").get<bool>();
  for (const auto& [k, v] : j.at("counts").items()) s.counts[job_state_from_string(k)] = v.get<int>();
  for (const auto& f : j.at("faulty")) {
    s.faulty.push_back({f.at("job").get<std::string>(), f.at("node").get<std::string>(), f.at("attempt").get<int>(),
                        job_state_from_string(f.at("state").get<std::string>()), f.at("detail").get<std::string>(),
                        f.at("queue").get<std::string>(), f.at("ts").get<double>()});
  }
  return s;
}

std::string to_ndjson(const Transition& t) {
  ordered_json j{{"ts", t.ts},
                 {"job", t.job},
                 {"from", to_string(t.from)},
                 {"to", to_string(t.to)},
                 {"detail", t.detail},
                 {"attempt", t.attempt},
                 {"queue", t.queue}};
  return j.dump();
}

Transition transition_from_json(const json& j) {
  Transition t;
  t.ts = j.at("ts").get<double>();
  t.job = j.at("job").get<std::string>();
  t.from = job_state_from_string(j.at("from").get<std::string>());
  t.to = job_state_from_string(j.at("to").get<std::string>());
  t.detail = j.value("detail", "");
  t.attempt = j.value("attempt", 1);
  t.queue = j.value("queue", "");
  return t;
}

std::vector<Transition> read_event_log(const std::filesystem::path& path) {
  std::vector<Transition> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const bool last = in.peek() == std::char_traits<char>::eof();
    try {
      out.push_back(transition_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      if (last) break;
      fail(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace gatehub::scheduler
