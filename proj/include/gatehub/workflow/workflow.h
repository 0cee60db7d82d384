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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatehub/resource/model.h"
#include "gatehub/workflow/model.h"

namespace gatehub::workflow {

// ---------------------------------------------------------------------------
// Graph validation and ordering

enum class ViolationKind {
  kInvalidNodeId,
  kDuplicateNode,
  kDuplicatePort,
  kDanglingEdge,
  kPortDirectionMismatch,
  kSelfLoop,
  kFanIn,
  kCycle,
};

std::string_view to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string node;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool clean() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string str() const;
};

bool is_valid_node_id(std::string_view id);

/// Never throws; every broken invariant becomes a report entry.
ValidationReport validate_graph(const ComponentGraph& graph);

/// Kahn's algorithm with ties broken by node id. Throws kCycle.
std::vector<std::string> topological_order(const ComponentGraph& graph);

// ---------------------------------------------------------------------------
// Templates: `${name}` placeholders, `$${` is a literal `${`.

std::vector<std::string> placeholders(std::string_view tmpl);
std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values);

// ---------------------------------------------------------------------------
// Binding and sweep expansion

/// Profile lookup: workflow-local overrides first, then the defaults.
const resource::ResourceProfile* find_profile(
    const std::map<std::string, resource::ResourceProfile>& overrides, const std::string& name);

void check_sweep(const SweepSpec& sweep);

/// Produces a draft workflow. Throws kValidationFailed, kUnboundNode,
/// kUnknownPlaceholder, kUnknownProfile, kInvalidBinding, kEmptyAxis or
/// kInvalidSweep.
Workflow bind_workflow(ComponentGraph graph, std::map<std::string, NodeBinding> bindings,
                       SweepSpec sweep,
                       std::map<std::string, resource::ResourceProfile> profiles = {});

/// Re-runs every bind-time check on an already assembled workflow.
void check_workflow(const Workflow& wf);

struct InputSource {
  std::string port;
  /// Empty for external files.
  std::string upstream_job;
  std::string upstream_port;
  std::string path;

  bool from_upstream() const { return !upstream_job.empty(); }
  bool operator==(const InputSource&) const = default;
};

struct OutputSpec {
  std::string port;
  std::string pattern;
  DataClass data_class = DataClass::kScalar;

  bool operator==(const OutputSpec&) const = default;
};

/// What one sweep point of one node runs. Immutable once expanded.
struct JobSpec {
  std::string id;
  std::string run_id;
  std::string node_id;
  std::string profile;
  std::size_t point_index = 0;
  std::vector<std::pair<std::string, std::string>> params;
  std::string executable;
  std::vector<std::string> args;
  std::map<std::string, std::string> env;
  std::vector<InputSource> inputs;
  std::vector<OutputSpec> outputs;
  double scale = 0.0;
  resource::Estimate estimate;
  bool checkpointable = false;
  std::optional<std::string> queue_pin;
  std::vector<std::string> depends_on;

  bool operator==(const JobSpec&) const = default;
};

struct JobSet {
  std::string run_id;
  std::vector<JobSpec> jobs;
  /// job id -> ids it depends on
  std::map<std::string, std::vector<std::string>> dependencies;
};

/// Deterministic id from run id, node and parameter vector.
std::string job_id(std::string_view run_id, std::string_view node_id,
                   const std::vector<std::pair<std::string, std::string>>& params);

/// Cartesian product over the axes (last axis varies fastest); nodes of a
/// sweep point appear in topological order.
JobSet expand_sweep(const Workflow& wf, const std::string& run_id);

// ---------------------------------------------------------------------------
// Output classification

struct SizeRange {
  double lower_exclusive;  // bytes; < 0 means zero is included
  double upper_inclusive;  // bytes
};

/// Expected size range of a class, multiplied by `scale_factor` (1e-3 for
/// desk-scale runs).
SizeRange expected_range(DataClass c, double scale_factor = 1.0);
double midpoint_bytes(DataClass c, double scale_factor = 1.0);

struct SizeClassReport {
  DataClass data_class;
  std::uint64_t bytes;
  bool within_expected;
};

SizeClassReport classify_size(std::uint64_t bytes, DataClass declared, double scale_factor = 1.0);

/// Throws kMissingArtifact when the file does not exist.
SizeClassReport classify_output(const std::filesystem::path& artifact, DataClass declared,
                                double scale_factor = 1.0);

}  // namespace gatehub::workflow
