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
#include <charconv>
#include <cmath>
#include <set>

#include "gatehub/common/crypto.h"
#include "gatehub/common/error.h"
#include "gatehub/resource/resource.h"
#include "gatehub/workflow/workflow.h"

namespace gatehub::workflow {
namespace {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(s.front())) return false;
  for (char c : s) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

std::set<std::string> declared_params(const SweepSpec& sweep) {
  std::set<std::string> names;
  for (const auto& [name, values] : sweep.axes) names.insert(name);
  for (const auto& [name, value] : sweep.constants) names.insert(name);
  return names;
}

void check_template(const std::string& tmpl, const std::set<std::string>& declared) {
  for (const auto& name : placeholders(tmpl)) {
    if (!declared.count(name)) fail(ErrorCode::kUnknownPlaceholder, name);
  }
}

void check_binding(const ComponentGraph& graph, const ComponentNode& node, const NodeBinding& b,
                   const std::set<std::string>& declared) {
  if (b.executable.empty()) {
    fail(ErrorCode::kInvalidBinding, "node " + node.id + ": executable must be non-empty");
  }
  std::set<std::string> fed;
  for (const auto& e : graph.edges) {
    if (e.to.node == node.id) fed.insert(e.to.port);
  }
  for (const auto& [port, path] : b.input_files) {
    const Port* p = node.find_port(port);
    if (p == nullptr || p->direction != PortDirection::kInput) {
      fail(ErrorCode::kInvalidBinding, "node " + node.id + ": no input port " + port);
    }
    if (fed.count(port)) {
      fail(ErrorCode::kInvalidBinding, "node " + node.id + ": port " + port + " is already fed by an edge");
    }
    check_template(path, declared);
  }
  for (const auto& [port, pattern] : b.output_files) {
    const Port* p = node.find_port(port);
    if (p == nullptr || p->direction != PortDirection::kOutput) {
      fail(ErrorCode::kInvalidBinding, "node " + node.id + ": no output port " + port);
    }
    if (pattern.empty()) fail(ErrorCode::kInvalidBinding, "node " + node.id + ": empty output pattern");
    check_template(pattern, declared);
  }
  if (b.cores && *b.cores < 1) fail(ErrorCode::kInvalidBinding, "node " + node.id + ": cores must be >= 1");
  for (const auto& a : b.fixed_args) check_template(a, declared);
  for (const auto& a : b.variable_args) check_template(a, declared);
  for (const auto& [k, v] : b.env) check_template(v, declared);
  check_template(b.scale, declared);
}

double parse_scale(const std::string& text, const std::string& node) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    fail(ErrorCode::kInvalidBinding, "node " + node + ": scale '" + text + "' is not a number");
  }
  return value;
}

}  // namespace

const resource::ResourceProfile* find_profile(
    const std::map<std::string, resource::ResourceProfile>& overrides, const std::string& name) {
  if (auto it = overrides.find(name); it != overrides.end()) return &it->second;
  const auto& defaults = resource::default_profiles();
  if (auto it = defaults.find(name); it != defaults.end()) return &it->second;
  return nullptr;
}

void check_sweep(const SweepSpec& sweep) {
  std::set<std::string> names;
  for (const auto& [name, values] : sweep.axes) {
    if (!is_identifier(name)) fail(ErrorCode::kInvalidSweep, "bad parameter name '" + name + "'");
    if (values.empty()) fail(ErrorCode::kEmptyAxis, name);
    if (!names.insert(name).second) fail(ErrorCode::kInvalidSweep, "axis " + name + " declared twice");
  }
  for (const auto& [name, value] : sweep.constants) {
    if (!is_identifier(name)) fail(ErrorCode::kInvalidSweep, "bad parameter name '" + name + "'");
    if (!names.insert(name).second) {
      fail(ErrorCode::kInvalidSweep, "parameter " + name + " is both an axis and a constant");
    }
  }
}

void check_workflow(const Workflow& wf) {
  const auto report = validate_graph(wf.graph);
  if (!report.clean()) fail(ErrorCode::kValidationFailed, report.str());
  check_sweep(wf.sweep);
  const auto declared = declared_params(wf.sweep);
  for (const auto& node : wf.graph.nodes) {
    auto it = wf.bindings.find(node.id);
    if (it == wf.bindings.end()) fail(ErrorCode::kUnboundNode, node.id);
    if (find_profile(wf.profiles, node.profile_ref) == nullptr) {
      fail(ErrorCode::kUnknownProfile, "node " + node.id + ": profile " + node.profile_ref);
    }
    check_binding(wf.graph, node, it->second, declared);
  }
  for (const auto& [id, b] : wf.bindings) {
    if (wf.graph.find_node(id) == nullptr) fail(ErrorCode::kUnboundNode, "binding for unknown node " + id);
  }
}

Workflow bind_workflow(ComponentGraph graph, std::map<std::string, NodeBinding> bindings,
                       SweepSpec sweep, std::map<std::string, resource::ResourceProfile> profiles) {
  Workflow wf;
  wf.graph = std::move(graph);
  wf.bindings = std::move(bindings);
  for (auto& [id, b] : wf.bindings) b.node_id = id;
  wf.sweep = std::move(sweep);
  wf.profiles = std::move(profiles);
  wf.status = WorkflowStatus::kDraft;
  check_workflow(wf);
  return wf;
}

std::string job_id(std::string_view run_id, std::string_view node_id,
                   const std::vector<std::pair<std::string, std::string>>& params) {
  std::string key;
  key.append(run_id).push_back('\x1f');
  key.append(node_id).push_back('\x1f');
  for (const auto& [k, v] : params) {
    key.append(k).push_back('=');
    key.append(v).push_back('\x1e');
  }
  return "j" + sha256_hex(key).substr(0, 19);
}

JobSet expand_sweep(const Workflow& wf, const std::string& run_id) {
  check_workflow(wf);
  const auto order = topological_order(wf.graph);

  std::map<std::string, std::string> constants;
  for (const auto& [name, value] : wf.sweep.constants) constants[name] = value.text;

  JobSet set;
  set.run_id = run_id;
  const std::size_t points = wf.sweep.point_count();
  set.jobs.reserve(points * order.size());

  std::vector<std::size_t> digits(wf.sweep.axes.size(), 0);
  for (std::size_t point = 0; point < points; ++point) {
    std::vector<std::pair<std::string, std::string>> params;
    auto values = constants;
    for (std::size_t a = 0; a < wf.sweep.axes.size(); ++a) {
      const auto& [name, axis] = wf.sweep.axes[a];
      params.emplace_back(name, axis[digits[a]].text);
      values[name] = axis[digits[a]].text;
    }

    std::map<std::string, std::string> ids;
    for (const auto& node_id : order) ids[node_id] = job_id(run_id, node_id, params);

    for (const auto& node_id : order) {
      const ComponentNode& node = *wf.graph.find_node(node_id);
      const NodeBinding& b = wf.bindings.at(node_id);
      const auto& profile = *find_profile(wf.profiles, node.profile_ref);

      JobSpec job;
      job.id = ids[node_id];
      job.run_id = run_id;
      job.node_id = node_id;
      job.profile = node.profile_ref;
      job.point_index = point;
      job.params = params;
      job.executable = b.executable;
      for (const auto& a : b.fixed_args) job.args.push_back(substitute(a, values));
      for (const auto& a : b.variable_args) job.args.push_back(substitute(a, values));
      for (const auto& [k, v] : b.env) job.env[k] = substitute(v, values);
      for (const auto& e : wf.graph.edges) {
        if (e.to.node != node_id) continue;
        job.inputs.push_back({e.to.port, ids[e.from.node], e.from.port, ""});
        const auto& dep = ids[e.from.node];
        if (std::find(job.depends_on.begin(), job.depends_on.end(), dep) == job.depends_on.end()) {
          job.depends_on.push_back(dep);
        }
      }
      for (const auto& [port, path] : b.input_files) {
        job.inputs.push_back({port, "", "", substitute(path, values)});
      }
      for (const auto& port : node.ports) {
        if (port.direction != PortDirection::kOutput) continue;
        auto it = b.output_files.find(port.name);
        job.outputs.push_back({port.name, it == b.output_files.end() ? port.name : substitute(it->second, values),
                               port.data_class});
      }
      job.scale = b.scale.empty() ? profile.reference_scale
                                  : parse_scale(substitute(b.scale, values), node_id);
      job.estimate = resource::estimate_requirements(profile, job.scale);
      if (b.cores) job.estimate.cores = *b.cores;
      job.checkpointable = b.checkpointable;
      job.queue_pin = b.queue_pin;
      set.dependencies[job.id] = job.depends_on;
      set.jobs.push_back(std::move(job));
    }

    for (std::size_t a = digits.size(); a-- > 0;) {
      if (++digits[a] < wf.sweep.axes[a].second.size()) break;
      digits[a] = 0;
    }
  }
  return set;
}

}  // namespace gatehub::workflow
