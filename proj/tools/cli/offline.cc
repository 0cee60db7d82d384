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


#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cli.h"
#include "gatehub/common/error.h"
#include "gatehub/engine/run_engine.h"
#include "gatehub/execution/local_executor.h"
#include "gatehub/resource/resource.h"
#include "gatehub/service/run_manager.h"
#include "gatehub/workflow/io.h"

namespace gatehub::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

fs::path data_dir() {
  if (const char* env = std::getenv("GATEHUB_DATA")) return env;
  return GATEHUB_DATA_DIR;
}

namespace {

std::pair<std::string, std::string> split_assignment(const std::string& text, const char* flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError(std::string(flag) + " expects NAME=VALUE, got '" + text + "'");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

workflow::SweepValue sweep_value(const std::string& text) {
  char* end = nullptr;
  std::strtod(text.c_str(), &end);
  const bool numeric = !text.empty() && end == text.c_str() + text.size();
  return {text, numeric};
}

}  // namespace

workflow::SweepSpec parse_sweep_args(const SweepArgs& args) {
  workflow::SweepSpec spec;
  for (const auto& a : args.axes) {
    auto [name, list] = split_assignment(a, "--axis");
    std::vector<workflow::SweepValue> values;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) values.push_back(sweep_value(item));
    spec.axes.emplace_back(name, std::move(values));
  }
  for (const auto& c : args.constants) {
    auto [name, value] = split_assignment(c, "--set");
    spec.constants.emplace_back(name, sweep_value(value));
  }
  return spec;
}

std::map<std::string, double> parse_true_runtime(const std::vector<std::string>& entries) {
  std::map<std::string, double> out;
  for (const auto& e : entries) {
    auto [node, minutes] = split_assignment(e, "--true-runtime");
    try {
      out[node] = std::stod(minutes);
    } catch (const std::exception&) {
      throw UsageError("--true-runtime expects NODE=MINUTES, got '" + e + "'");
    }
  }
  return out;
}

void print_summary(const scheduler::RunSummary& s) {
  std::cout << "run " << s.run_id << ": " << s.total << " jobs, " << (s.complete ? "complete" : "in progress") << "\n";
  for (const auto& [state, n] : s.counts) std::cout << "  " << std::left << std::setw(18) << scheduler::to_string(state) << n << "\n";
  if (s.faulty.empty()) return;
  std::cout << "faulty attempts:\n";
  for (const auto& f : s.faulty) {
    std::cout << "  " << f.job << " (" << f.node << ") attempt " << f.attempt << " " << scheduler::to_string(f.state)
              << (f.queue.empty() ? "" : " on " + f.queue) << ": " << f.detail << "\n";
  }
}

namespace {

repository::TemplateEntry entry_from_file(const fs::path& path) {
  repository::TemplateEntry e;
  e.workflow = workflow::load_workflow(path);
  e.name = e.workflow.name;
  e.version = 1;
  e.published = true;
  return e;
}

service::RunRequest request_for(const OfflineOptions& o, const SimArgs* sim) {
  service::RunRequest r;
  r.sweep = parse_sweep_args(o.sweep);
  r.run_id = o.run_id;
  if (sim) {
    r.seed = sim->seed;
    r.sim_sigma = sim->sigma;
    r.sim_failure_rate = sim->failure_rate;
    r.true_runtime = parse_true_runtime(sim->true_runtime);
    if (sim->safety) {
      scheduler::Policy p;
      p.safety = *sim->safety;
      r.policy = p;
    }
  }
  return r;
}

bool all_finished(const scheduler::RunSummary& s) {
  auto it = s.counts.find(scheduler::JobState::kFinished);
  return it != s.counts.end() && it->second == s.total;
}

scheduler::RunSummary summary_for(const repository::RunRecord& record, const std::vector<scheduler::Transition>& log) {
  std::vector<scheduler::JobRef> refs;
  for (const auto& j : record.jobs) refs.push_back({j.id, j.node});
  return scheduler::summarize(record.id, refs, log);
}

int report_run(const repository::RunRecord& record, const std::vector<scheduler::Transition>& log, bool json,
               const std::vector<execution::ArtifactRecord>& artifacts = {}) {
  const auto summary = summary_for(record, log);
  if (json) {
    ojson events = ojson::array();
    for (const auto& t : log) events.push_back(ojson::parse(scheduler::to_ndjson(t)));
    ojson doc{{"run", record.id}, {"events", events}, {"summary", scheduler::to_json(summary)}};
    if (record.backend == "local") {
      ojson arts = ojson::array();
      for (const auto& a : artifacts) arts.push_back(repository::to_json(a));
      doc["artifacts"] = arts;
    }
    std::cout << doc.dump(2) << "\n";
  } else {
    for (const auto& t : log) std::cout << scheduler::to_ndjson(t) << "\n";
    std::cout << "\n";
    print_summary(summary);
    for (const auto& a : artifacts) {
      std::cout << "artifact " << a.path << " " << a.bytes << " bytes " << resource::to_string(a.data_class)
                << (a.within_expected ? "" : " (outside expected range)") << "\n";
    }
  }
  return all_finished(summary) ? 0 : 1;
}

}  // namespace

int cmd_validate(const OfflineOptions& o) {
  workflow::Workflow wf;
  try {
    wf = workflow::load_workflow(o.workflow);
  } catch (const Error& e) {
    if (!o.json) throw;
    ojson doc = ojson::object();
    doc["valid"] = false;
    doc["violations"] = ojson::array();
    doc["error"] = std::string(to_string(e.code())) + ": " + e.what();
    std::cout << doc.dump(2) << "\n";
    return 1;
  }
  wf.sweep = service::merge_sweep(wf.sweep, parse_sweep_args(o.sweep));
  auto report = workflow::validate_graph(wf.graph);
  std::string binding_error;
  if (report.clean()) {
    try {
      workflow::check_workflow(wf);
    } catch (const Error& e) {
      binding_error = std::string(to_string(e.code())) + ": " + e.what();
    }
  }
  const bool ok = report.clean() && binding_error.empty();
  if (o.json) {
    ojson doc = workflow::to_json(report);
    doc["valid"] = ok;
    if (!binding_error.empty()) doc["error"] = binding_error;
    std::cout << doc.dump(2) << "\n";
  } else if (ok) {
    std::cout << wf.name << ": valid (" << wf.graph.nodes.size() << " nodes, " << wf.graph.edges.size() << " edges, "
              << wf.sweep.point_count() << " sweep points)\n";
  } else {
    if (!report.clean()) std::cout << report.str() << "\n";
    if (!binding_error.empty()) std::cout << binding_error << "\n";
  }
  return ok ? 0 : 1;
}

int cmd_expand(const OfflineOptions& o) {
  auto entry = entry_from_file(o.workflow);
  auto record = service::prepare_run(entry, request_for(o, nullptr), "offline");
  auto jobs = service::expand_record(entry, record);
  if (o.json) {
    ojson arr = ojson::array();
    for (const auto& j : jobs.jobs) arr.push_back(workflow::to_json(j));
    std::cout << ojson{{"run", record.id}, {"jobs", arr}}.dump(2) << "\n";
    return 0;
  }
  std::cout << std::left << std::setw(22) << "JOB" << std::setw(10) << "NODE" << std::setw(7) << "POINT" << std::setw(12)
            << "EST_MIN" << std::setw(7) << "CORES" << "PARAMS\n";
  for (const auto& j : jobs.jobs) {
    std::string params;
    for (const auto& [k, v] : j.params) params += (params.empty() ? "" : " ") + k + "=" + v;
    std::ostringstream est;
    est << std::fixed << std::setprecision(1) << j.estimate.runtime;
    std::cout << std::setw(22) << j.id << std::setw(10) << j.node_id << std::setw(7) << j.point_index << std::setw(12)
              << est.str() << std::setw(7) << j.estimate.cores << params << "\n";
  }
  return 0;
}

int cmd_simulate(const SimulateOptions& o) {
  auto entry = entry_from_file(o.base.workflow);
  auto sites = resource::load_site_config(o.sites);
  auto record = service::prepare_run(entry, request_for(o.base, &o.sim), "offline");
  auto log = service::simulate_record(entry, record, sites);
  return report_run(record, log, o.base.json);
}

int cmd_run(const LocalRunOptions& o) {
  auto entry = entry_from_file(o.base.workflow);
  auto sites = resource::load_site_config(o.sites);
  auto request = request_for(o.base, nullptr);
  request.backend = "local";
  if (o.safety) {
    scheduler::Policy p;
    p.safety = *o.safety;
    request.policy = p;
  }
  auto record = service::prepare_run(entry, request, "offline");
  execution::LocalConfig cfg;
  cfg.runs_root = o.workdir;
  cfg.bin_dirs = o.bin_dirs;
  cfg.data_dir = o.data_dir;
  cfg.ms_per_minute = o.ms_per_minute;
  cfg.max_parallel = o.max_parallel;
  execution::LocalExecutor executor(sites, cfg);
  engine::RunEngine eng(service::expand_record(entry, record), "offline", sites, executor, record.policy);
  eng.start();
  eng.run_to_completion();
  return report_run(record, eng.log(), o.base.json, eng.artifacts());
}

}  // namespace gatehub::cli
