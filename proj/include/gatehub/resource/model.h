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

#include <string>
#include <string_view>
#include <vector>

namespace gatehub::resource {

/// Output data classes of the general workflow.
enum class DataClass { kTextHuge, kTextMedium, kImageSmall, kVideoSmall, kScalar };

std::string_view to_string(DataClass c);
DataClass data_class_from_string(std::string_view s);

enum class LocationClass { kServer, kCluster, kDci };
enum class RuntimeClass { kShort, kMedium, kLong };

std::string_view to_string(LocationClass c);
std::string_view to_string(RuntimeClass c);
LocationClass location_class_from_string(std::string_view s);
RuntimeClass runtime_class_from_string(std::string_view s);

struct ResourceProfile {
  std::string name;
  LocationClass location_class = LocationClass::kCluster;
  RuntimeClass runtime_class = RuntimeClass::kShort;
  double base_runtime = 1.0;   // minutes at reference_scale
  double base_memory = 1.0;    // MB at reference_scale
  double reference_scale = 1.0;
  DataClass output_class = DataClass::kScalar;
  int cores = 1;

  bool operator==(const ResourceProfile&) const = default;
};

struct Queue {
  std::string name;
  double walltime = 0.0;  // minutes; +inf for unbounded
  int cores_per_user = 1;
  std::string site_ref;

  bool operator==(const Queue&) const = default;
};

enum class SiteKind { kLocalServer, kPbsCluster, kSimulatedCluster };

std::string_view to_string(SiteKind k);
SiteKind site_kind_from_string(std::string_view s);

struct Site {
  std::string name;
  SiteKind kind = SiteKind::kSimulatedCluster;
  std::vector<Queue> queues;
  int total_cores = 1;

  const Queue* find_queue(std::string_view queue_name) const;
  bool operator==(const Site&) const = default;
};

struct Estimate {
  double runtime = 0.0;  // minutes
  double memory = 0.0;   // MB
  int cores = 1;

  bool operator==(const Estimate&) const = default;
};

/// Through-origin linear scaling: runtime = minutes_per_unit * scale.
struct ScalingModel {
  double minutes_per_unit = 0.0;
  double mb_per_unit = 0.0;
};

/// A queue together with the site that owns it.
struct QueueRef {
  const Site* site = nullptr;
  const Queue* queue = nullptr;

  std::string key() const { return site->name + "/" + queue->name; }
};

}  // namespace gatehub::resource
