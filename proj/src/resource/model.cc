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

#include "gatehub/resource/model.h"

#include <string>

#include "gatehub/common/error.h"

namespace gatehub::resource {

std::string_view to_string(DataClass c) {
  switch (c) {
    case DataClass::kTextHuge: return "text_huge";
    case DataClass::kTextMedium: return "text_medium";
    case DataClass::kImageSmall: return "image_small";
    case DataClass::kVideoSmall: return "video_small";
    case DataClass::kScalar: return "scalar";
  }
  return "scalar";
}

DataClass data_class_from_string(std::string_view s) {
  if (s == "text_huge") return DataClass::kTextHuge;
  if (s == "text_medium") return DataClass::kTextMedium;
  if (s == "image_small") return DataClass::kImageSmall;
  if (s == "video_small") return DataClass::kVideoSmall;
  if (s == "scalar") return DataClass::kScalar;
  fail(ErrorCode::kParseError, "unknown data class '" + std::string(s) + "'");
}

std::string_view to_string(LocationClass c) {
  switch (c) {
    case LocationClass::kServer: return "server";
    case LocationClass::kCluster: return "cluster";
    case LocationClass::kDci: return "dci";
  }
  return "cluster";
}

std::string_view to_string(RuntimeClass c) {
  switch (c) {
    case RuntimeClass::kShort: return "short";
    case RuntimeClass::kMedium: return "medium";
    case RuntimeClass::kLong: return "long";
  }
  return "short";
}

LocationClass location_class_from_string(std::string_view s) {
  if (s == "server") return LocationClass::kServer;
  if (s == "cluster") return LocationClass::kCluster;
  if (s == "dci") return LocationClass::kDci;
  fail(ErrorCode::kParseError, "unknown location class '" + std::string(s) + "'");
}

RuntimeClass runtime_class_from_string(std::string_view s) {
  if (s == "short") return RuntimeClass::kShort;
  if (s == "medium") return RuntimeClass::kMedium;
  if (s == "long") return RuntimeClass::kLong;
  fail(ErrorCode::kParseError, "unknown runtime class '" + std::string(s) + "'");
}

std::string_view to_string(SiteKind k) {
  switch (k) {
    case SiteKind::kLocalServer: return "local_server";
    case SiteKind::kPbsCluster: return "pbs_cluster";
    case SiteKind::kSimulatedCluster: return "simulated_cluster";
  }
  return "simulated_cluster";
}

SiteKind site_kind_from_string(std::string_view s) {
  if (s == "local_server") return SiteKind::kLocalServer;
  if (s == "pbs_cluster") return SiteKind::kPbsCluster;
  if (s == "simulated_cluster") return SiteKind::kSimulatedCluster;
  fail(ErrorCode::kParseError, "unknown site kind '" + std::string(s) + "'");
}

const Queue* Site::find_queue(std::string_view queue_name) const {
  for (const auto& q : queues) {
    if (q.name == queue_name) return &q;
  }
  return nullptr;
}

}  // namespace gatehub::resource
