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

#include "gatehub/workflow/io.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gatehub/common/error.h"

namespace gatehub::workflow {
namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  fail(ErrorCode::kParseError, "field " + field + ": " + what);
}

const ojson* opt(const ojson& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const ojson& req(const ojson& obj, const char* key, const std::string& path) {
  const ojson* v = opt(obj, key);
  if (v == nullptr) bad(path + "." + key, "missing");
  return *v;
}

std::string str(const ojson& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected string");
  return v.get<std::string>();
}

std::string str_or(const ojson& obj, const char* key, const std::string& path, std::string def) {
  const ojson* v = opt(obj, key);
  return v ? str(*v, path + "." + key) : def;
}

std::vector<std::string> str_list(const ojson& obj, const char* key, const std::string& path) {
  std::vector<std::string> out;
  const ojson* v = opt(obj, key);
  if (v == nullptr) return out;
  if (!v->is_array()) bad(path + "." + key, "expected array");
  for (std::size_t i = 0; i < v->size(); ++i) {
    out.push_back(str((*v)[i], path + "." + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::map<std::string, std::string> str_map(const ojson& obj, const char* key, const std::string& path) {
  std::map<std::string, std::string> out;
  const ojson* v = opt(obj, key);
  if (v == nullptr) return out;
  if (!v->is_object()) bad(path + "." + key, "expected object");
  for (const auto& [k, val] : v->items()) out[k] = str(val, path + "." + key + "." + k);
  return out;
}

double number(const ojson& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected number");
  return v.get<double>();
}

PortRef port_ref(const std::string& text, const std::string& path) {
  const auto dot = text.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == text.size()) {
    bad(path, "expected \"node.port\", got \"" + text + "\"");
  }
  return {text.substr(0, dot), text.substr(dot + 1)};
}

SweepValue sweep_value(const ojson& v, const std::string& path) {
  if (v.is_string()) return {v.get<std::string>(), false};
  if (v.is_number()) return {v.dump(), true};
  bad(path, "sweep values are numbers or strings");
}

ojson sweep_value_json(const SweepValue& v) {
  if (v.numeric) return ojson::parse(v.text);
  return v.text;
}

}  // namespace

ojson to_json(const resource::ResourceProfile& p) {
  ojson j;
  j["location_class"] = resource::to_string(p.location_class);
  j["runtime_class"] = resource::to_string(p.runtime_class);
  j["base_runtime"] = p.base_runtime;
  j["base_memory"] = p.base_memory;
  j["reference_scale"] = p.reference_scale;
  j["output_class"] = resource::to_string(p.output_class);
  j["cores"] = p.cores;
  return j;
}

resource::ResourceProfile profile_from_json(const std::string& name, const ojson& j) {
  const auto path = "$.profiles." + name;
  resource::ResourceProfile p;
  p.name = name;
  p.location_class = resource::location_class_from_string(str(req(j, "location_class", path), path));
  p.runtime_class = resource::runtime_class_from_string(str(req(j, "runtime_class", path), path));
  p.base_runtime = number(req(j, "base_runtime", path), path + ".base_runtime");
  p.base_memory = opt(j, "base_memory") ? number(j["base_memory"], path + ".base_memory") : 0.0;
  p.reference_scale = number(req(j, "reference_scale", path), path + ".reference_scale");
  p.output_class = resource::data_class_from_string(str(req(j, "output_class", path), path));
  if (const ojson* c = opt(j, "cores")) {
    if (!c->is_number_integer()) bad(path + ".cores", "expected integer");
    p.cores = c->get<int>();
  }
  if (!(p.base_runtime > 0) || !(p.reference_scale > 0) || p.cores < 1) {
    fail(ErrorCode::kInvariantViolation,
         "profile " + name + ": base_runtime, reference_scale and cores must be positive");
  }
  return p;
}

ojson to_json(const SweepSpec& sweep) {
  ojson axes = ojson::object();
  for (const auto& [name, values] : sweep.axes) {
    ojson arr = ojson::array();
    for (const auto& v : values) arr.push_back(sweep_value_json(v));
    axes[name] = std::move(arr);
  }
  ojson constants = ojson::object();
  for (const auto& [name, value] : sweep.constants) constants[name] = sweep_value_json(value);
  return ojson{{"axes", std::move(axes)}, {"constants", std::move(constants)}};
}

SweepSpec sweep_from_json(const ojson& j) {
  SweepSpec sweep;
  if (j.is_null()) return sweep;
  if (!j.is_object()) bad("$.sweep", "expected object");
  if (const ojson* axes = opt(j, "axes")) {
    if (!axes->is_object()) bad("$.sweep.axes", "expected object");
    for (const auto& [name, values] : axes->items()) {
      const auto path = "$.sweep.axes." + name;
      if (!values.is_array()) bad(path, "expected array");
      std::vector<SweepValue> vs;
      for (std::size_t i = 0; i < values.size(); ++i) {
        vs.push_back(sweep_value(values[i], path + "[" + std::to_string(i) + "]"));
      }
      sweep.axes.emplace_back(name, std::move(vs));
    }
  }
  if (const ojson* constants = opt(j, "constants")) {
    if (!constants->is_object()) bad("$.sweep.constants", "expected object");
    for (const auto& [name, value] : constants->items()) {
      sweep.constants.emplace_back(name, sweep_value(value, "$.sweep.constants." + name));
    }
  }
  return sweep;
}

Workflow workflow_from_json(const ojson& doc) {
  if (!doc.is_object()) bad("$", "expected object");
  Workflow wf;
  wf.name = str_or(doc, "name", "$", "");
  wf.description = str_or(doc, "description", "$", "");
  wf.owner = str_or(doc, "owner", "$", "");
  const auto status = str_or(doc, "status", "$", "draft");
  if (status == "draft") {
    wf.status = WorkflowStatus::kDraft;
  } else if (status == "published") {
    wf.status = WorkflowStatus::kPublished;
  } else {
    bad("$.status", "expected draft or published");
  }

  const ojson& graph = req(doc, "graph", "$");
  const ojson& nodes = req(graph, "nodes", "$.graph");
  if (!nodes.is_array()) bad("$.graph.nodes", "expected array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto path = "$.graph.nodes[" + std::to_string(i) + "]";
    const ojson& nj = nodes[i];
    ComponentNode node;
    node.id = str(req(nj, "id", path), path + ".id");
    node.name = str_or(nj, "name", path, node.id);
    node.profile_ref = str_or(nj, "profile", path, node.id);
    if (const ojson* ports = opt(nj, "ports")) {
      if (!ports->is_array()) bad(path + ".ports", "expected array");
      for (std::size_t k = 0; k < ports->size(); ++k) {
        const auto ppath = path + ".ports[" + std::to_string(k) + "]";
        const ojson& pj = (*ports)[k];
        Port port;
        port.name = str(req(pj, "name", ppath), ppath + ".name");
        port.direction = port_direction_from_string(str(req(pj, "direction", ppath), ppath + ".direction"));
        port.data_class = resource::data_class_from_string(str_or(pj, "data_class", ppath, "scalar"));
        node.ports.push_back(std::move(port));
      }
    }
    wf.graph.nodes.push_back(std::move(node));
  }
  if (const ojson* edges = opt(graph, "edges")) {
    if (!edges->is_array()) bad("$.graph.edges", "expected array");
    for (std::size_t i = 0; i < edges->size(); ++i) {
      const auto path = "$.graph.edges[" + std::to_string(i) + "]";
      const ojson& ej = (*edges)[i];
      wf.graph.edges.push_back({port_ref(str(req(ej, "from", path), path + ".from"), path + ".from"),
                                port_ref(str(req(ej, "to", path), path + ".to"), path + ".to")});
    }
  }

  if (const ojson* bindings = opt(doc, "bindings")) {
    if (!bindings->is_object()) bad("$.bindings", "expected object");
    for (const auto& [id, bj] : bindings->items()) {
      const auto path = "$.bindings." + id;
      NodeBinding b;
      b.node_id = id;
      b.executable = str_or(bj, "executable", path, "");
      b.fixed_args = str_list(bj, "fixed_args", path);
      b.variable_args = str_list(bj, "variable_args", path);
      b.input_files = str_map(bj, "input_files", path);
      b.output_files = str_map(bj, "output_files", path);
      b.env = str_map(bj, "env", path);
      b.scale = str_or(bj, "scale", path, "");
      if (const ojson* c = opt(bj, "cores")) {
        if (!c->is_number_integer()) bad(path + ".cores", "expected integer");
        b.cores = c->get<int>();
      }
      if (const ojson* c = opt(bj, "checkpointable")) {
        if (!c->is_boolean()) bad(path + ".checkpointable", "expected boolean");
        b.checkpointable = c->get<bool>();
      }
      if (const ojson* q = opt(bj, "queue")) b.queue_pin = str(*q, path + ".queue");
      wf.bindings.emplace(id, std::move(b));
    }
  }

  if (const ojson* sweep = opt(doc, "sweep")) wf.sweep = sweep_from_json(*sweep);

  if (const ojson* profiles = opt(doc, "profiles")) {
    if (!profiles->is_object()) bad("$.profiles", "expected object");
    for (const auto& [name, pj] : profiles->items()) wf.profiles.emplace(name, profile_from_json(name, pj));
  }
  return wf;
}

ojson to_json(const Workflow& wf) {
  ojson doc;
  doc["name"] = wf.name;
  doc["description"] = wf.description;
  doc["owner"] = wf.owner;
  doc["status"] = to_string(wf.status);

  ojson nodes = ojson::array();
  for (const auto& n : wf.graph.nodes) {
    ojson ports = ojson::array();
    for (const auto& p : n.ports) {
      ports.push_back({{"name", p.name},
                       {"direction", to_string(p.direction)},
                       {"data_class", resource::to_string(p.data_class)}});
    }
    nodes.push_back({{"id", n.id}, {"name", n.name}, {"profile", n.profile_ref}, {"ports", std::move(ports)}});
  }
  ojson edges = ojson::array();
  for (const auto& e : wf.graph.edges) edges.push_back({{"from", e.from.str()}, {"to", e.to.str()}});
  doc["graph"] = {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};

  ojson bindings = ojson::object();
  for (const auto& [id, b] : wf.bindings) {
    ojson bj;
    bj["executable"] = b.executable;
    bj["fixed_args"] = b.fixed_args;
    bj["variable_args"] = b.variable_args;
    bj["input_files"] = ojson(b.input_files);
    bj["output_files"] = ojson(b.output_files);
    bj["env"] = ojson(b.env);
    if (!b.scale.empty()) bj["scale"] = b.scale;
    if (b.cores) bj["cores"] = *b.cores;
    bj["checkpointable"] = b.checkpointable;
    if (b.queue_pin) bj["queue"] = *b.queue_pin;
    bindings[id] = std::move(bj);
  }
  doc["bindings"] = std::move(bindings);
  doc["sweep"] = to_json(wf.sweep);
  if (!wf.profiles.empty()) {
    ojson profiles = ojson::object();
    for (const auto& [name, p] : wf.profiles) profiles[name] = to_json(p);
    doc["profiles"] = std::move(profiles);
  }
  return doc;
}

Workflow parse_workflow(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    fail(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + e.what());
  }
  return workflow_from_json(doc);
}

Workflow load_workflow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open workflow " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_workflow(ss.str());
}

ojson to_json(const ValidationReport& report) {
  ojson violations = ojson::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"kind", to_string(v.kind)}, {"node", v.node}, {"detail", v.detail}});
  }
  ojson doc = ojson::object();
  doc["valid"] = report.clean();
  doc["violations"] = std::move(violations);
  return doc;
}

ojson to_json(const JobSpec& job) {
  ojson params = ojson::object();
  for (const auto& [k, v] : job.params) params[k] = v;
  ojson inputs = ojson::array();
  for (const auto& in : job.inputs) {
    ojson ij{{"port", in.port}};
    if (in.from_upstream()) {
      ij["upstream_job"] = in.upstream_job;
      ij["upstream_port"] = in.upstream_port;
    } else {
      ij["path"] = in.path;
    }
    inputs.push_back(std::move(ij));
  }
  ojson outputs = ojson::array();
  for (const auto& o : job.outputs) {
    outputs.push_back({{"port", o.port}, {"pattern", o.pattern}, {"data_class", resource::to_string(o.data_class)}});
  }
  return ojson{{"id", job.id},
               {"run", job.run_id},
               {"node", job.node_id},
               {"point", job.point_index},
               {"params", std::move(params)},
               {"executable", job.executable},
               {"args", job.args},
               {"env", ojson(job.env)},
               {"inputs", std::move(inputs)},
               {"outputs", std::move(outputs)},
               {"scale", job.scale},
               {"estimate",
                {{"runtime", job.estimate.runtime}, {"memory", job.estimate.memory}, {"cores", job.estimate.cores}}},
               {"checkpointable", job.checkpointable},
               {"depends_on", job.depends_on}};
}

}  // namespace gatehub::workflow
