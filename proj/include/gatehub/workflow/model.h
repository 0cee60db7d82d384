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

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gatehub/resource/model.h"

namespace gatehub::workflow {

using resource::DataClass;

enum class PortDirection { kInput, kOutput };

std::string_view to_string(PortDirection d);
PortDirection port_direction_from_string(std::string_view s);

struct Port {
  std::string name;
  PortDirection direction = PortDirection::kInput;
  DataClass data_class = DataClass::kScalar;

  bool operator==(const Port&) const = default;
};

struct ComponentNode {
  std::string id;
  std::string name;
  std::vector<Port> ports;
  std::string profile_ref;

  const Port* find_port(std::string_view port_name) const;
  bool operator==(const ComponentNode&) const = default;
};

struct PortRef {
  std::string node;
  std::string port;

  std::string str() const { return node + "." + port; }
  auto operator<=>(const PortRef&) const = default;
};

struct Edge {
  PortRef from;
  PortRef to;

  bool operator==(const Edge&) const = default;
};

struct ComponentGraph {
  std::vector<ComponentNode> nodes;
  std::vector<Edge> edges;

  const ComponentNode* find_node(std::string_view id) const;
  bool operator==(const ComponentGraph&) const = default;
};

/// Invariant part (executable, fixed args, env) and variable part (templated
/// args, input files) of one node.
struct NodeBinding {
  std::string node_id;
  std::string executable;
  std::vector<std::string> fixed_args;
  std::vector<std::string> variable_args;
  /// Input port -> external file path (templated). Ports fed by an edge
  /// are staged from the upstream job instead.
  std::map<std::string, std::string> input_files;
  /// Output port -> file name pattern (fnmatch) under the job's outputs/.
  std::map<std::string, std::string> output_files;
  std::map<std::string, std::string> env;
  /// Template that resolves to the job's scale (e.g. atom count). Empty
  /// means the profile's reference scale.
  std::string scale;
  std::optional<int> cores;
  bool checkpointable = false;
  /// Manual queue selection as "site/queue". Dropped after a walltime kill.
  std::optional<std::string> queue_pin;

  bool operator==(const NodeBinding&) const = default;
};

/// Axis or constant value. Numbers keep their textual form so that
/// substitution is exact and serialization round-trips.
struct SweepValue {
  std::string text;
  bool numeric = false;

  bool operator==(const SweepValue&) const = default;
};

struct SweepSpec {
  std::vector<std::pair<std::string, std::vector<SweepValue>>> axes;
  std::vector<std::pair<std::string, SweepValue>> constants;

  std::size_t point_count() const;
  bool operator==(const SweepSpec&) const = default;
};

enum class WorkflowStatus { kDraft, kPublished };

std::string_view to_string(WorkflowStatus s);

struct Workflow {
  std::string name;
  std::string description;
  ComponentGraph graph;
  std::map<std::string, NodeBinding> bindings;
  SweepSpec sweep;
  std::map<std::string, resource::ResourceProfile> profiles;
  std::string owner;
  WorkflowStatus status = WorkflowStatus::kDraft;

  bool operator==(const Workflow&) const = default;
};

}  // namespace gatehub::workflow
