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
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "gatehub/common/error.h"
#include "gatehub/workflow/workflow.h"

namespace gatehub::workflow {

std::string_view to_string(PortDirection d) {
  return d == PortDirection::kInput ? "input" : "output";
}

PortDirection port_direction_from_string(std::string_view s) {
  if (s == "input") return PortDirection::kInput;
  if (s == "output") return PortDirection::kOutput;
  fail(ErrorCode::kParseError, "unknown port direction '" + std::string(s) + "'");
}

std::string_view to_string(WorkflowStatus s) {
  return s == WorkflowStatus::kDraft ? "draft" : "published";
}

const Port* ComponentNode::find_port(std::string_view port_name) const {
  for (const auto& p : ports) {
    if (p.name == port_name) return &p;
  }
  return nullptr;
}

const ComponentNode* ComponentGraph::find_node(std::string_view id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::size_t SweepSpec::point_count() const {
  std::size_t n = 1;
  for (const auto& [name, values] : axes) n *= values.size();
  return n;
}

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::kInvalidNodeId: return "invalid_node_id";
    case ViolationKind::kDuplicateNode: return "duplicate_node";
    case ViolationKind::kDuplicatePort: return "duplicate_port";
    case ViolationKind::kDanglingEdge: return "dangling_edge";
    case ViolationKind::kPortDirectionMismatch: return "port_direction_mismatch";
    case ViolationKind::kSelfLoop: return "self_loop";
    case ViolationKind::kFanIn: return "fan_in";
    case ViolationKind::kCycle: return "cycle";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::str() const {
  std::ostringstream out;
  for (const auto& v : violations) {
    out << to_string(v.kind) << " at " << v.node << ": " << v.detail << "\n";
  }
  return out.str();
}

bool is_valid_node_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

ValidationReport validate_graph(const ComponentGraph& graph) {
  ValidationReport report;
  auto add = [&report](ViolationKind kind, std::string node, std::string detail) {
    report.violations.push_back({kind, std::move(node), std::move(detail)});
  };

  std::map<std::string, const ComponentNode*> by_id;
  for (const auto& node : graph.nodes) {
    if (!is_valid_node_id(node.id)) add(ViolationKind::kInvalidNodeId, node.id, "id must match [a-z0-9_-]{1,64}");
    if (!by_id.emplace(node.id, &node).second) {
      add(ViolationKind::kDuplicateNode, node.id, "node id used twice");
    }
    std::set<std::string> port_names;
    for (const auto& port : node.ports) {
      if (!port_names.insert(port.name).second) {
        add(ViolationKind::kDuplicatePort, node.id, "port " + port.name + " declared twice");
      }
    }
  }

  std::map<PortRef, int> fan_in;
  std::map<std::string, std::set<std::string>> adjacency;
  for (const auto& edge : graph.edges) {
    const auto label = edge.from.str() + " -> " + edge.to.str();
    auto from_node = by_id.find(edge.from.node);
    auto to_node = by_id.find(edge.to.node);
    if (from_node == by_id.end() || to_node == by_id.end()) {
      add(ViolationKind::kDanglingEdge, edge.from.node, label + ": unknown node");
      continue;
    }
    const Port* from_port = from_node->second->find_port(edge.from.port);
    const Port* to_port = to_node->second->find_port(edge.to.port);
    if (from_port == nullptr || to_port == nullptr) {
      add(ViolationKind::kDanglingEdge, edge.from.node, label + ": unknown port");
      continue;
    }
    if (from_port->direction != PortDirection::kOutput ||
        to_port->direction != PortDirection::kInput) {
      add(ViolationKind::kPortDirectionMismatch, edge.from.node, label + ": edges run output -> input");
    }
    if (edge.from.node == edge.to.node) {
      add(ViolationKind::kSelfLoop, edge.from.node, label);
      continue;
    }
    if (++fan_in[edge.to] == 2) {
      add(ViolationKind::kFanIn, edge.to.node, "input port " + edge.to.port + " has more than one incoming edge");
    }
    adjacency[edge.from.node].insert(edge.to.node);
  }

  std::map<std::string, int> indegree;
  for (const auto& [id, node] : by_id) indegree[id] = 0;
  for (const auto& [from, targets] : adjacency) {
    for (const auto& to : targets) ++indegree[to];
  }
  std::vector<std::string> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) ready.push_back(id);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto id = ready.back();
    ready.pop_back();
    ++visited;
    for (const auto& to : adjacency[id]) {
      if (--indegree[to] == 0) ready.push_back(to);
    }
  }
  if (visited < indegree.size()) {
    std::string members;
    for (const auto& [id, d] : indegree) {
      if (d > 0) members += (members.empty() ? "" : ",") + id;
    }
    add(ViolationKind::kCycle, members.substr(0, members.find(',')), "cycle through {" + members + "}");
  }
  return report;
}

std::vector<std::string> topological_order(const ComponentGraph& graph) {
  std::map<std::string, int> indegree;
  for (const auto& n : graph.nodes) indegree.emplace(n.id, 0);
  std::map<std::string, std::set<std::string>> adjacency;
  for (const auto& e : graph.edges) {
    if (!indegree.count(e.from.node) || !indegree.count(e.to.node)) continue;
    if (adjacency[e.from.node].insert(e.to.node).second) ++indegree[e.to.node];
  }

  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) ready.push(id);
  }
  std::vector<std::string> order;
  order.reserve(indegree.size());
  while (!ready.empty()) {
    auto id = ready.top();
    ready.pop();
    for (const auto& to : adjacency[id]) {
      if (--indegree[to] == 0) ready.push(to);
    }
    order.push_back(std::move(id));
  }
  if (order.size() != indegree.size()) fail(ErrorCode::kCycle, "graph contains a cycle");
  return order;
}

}  // namespace gatehub::workflow
