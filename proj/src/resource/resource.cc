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

#include "gatehub/resource/resource.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gatehub/common/duration.h"
#include "gatehub/common/error.h"

namespace gatehub::resource {

using nlohmann::json;

Estimate estimate_requirements(const ResourceProfile& profile, double scale) {
  if (!(scale > 0.0)) {
    fail(ErrorCode::kNonPositiveScale, "scale must be positive, got " + std::to_string(scale));
  }
  const double ratio = scale / profile.reference_scale;
  return Estimate{profile.base_runtime * ratio, profile.base_memory * ratio, profile.cores};
}

ScalingModel calibrate(std::span<const Observation> observations) {
  if (observations.empty()) fail(ErrorCode::kNoObservations, "calibrate needs at least one observation");
  double st = 0.0;
  double ss = 0.0;
  for (const auto& o : observations) {
    if (!(o.scale > 0.0)) fail(ErrorCode::kNonPositiveScale, "observation scale must be positive");
    st += o.scale * o.runtime;
    ss += o.scale * o.scale;
  }
  const double coefficient = st / ss;
  if (!(coefficient > 0.0)) {
    fail(ErrorCode::kInvariantViolation, "calibrated coefficient must be positive");
  }
  return ScalingModel{coefficient, 0.0};
}

std::vector<QueueRef> feasible_queues(const Estimate& est, const std::vector<Site>& sites,
                                      double safety) {
  if (safety < 1.0) fail(ErrorCode::kInvalidArgument, "safety factor must be >= 1");
  std::vector<QueueRef> out;
  for (const auto& site : sites) {
    for (const auto& q : site.queues) {
      if (est.runtime * safety <= q.walltime && est.cores <= q.cores_per_user) {
        out.push_back(QueueRef{&site, &q});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const QueueRef& a, const QueueRef& b) {
    if (a.queue->walltime != b.queue->walltime) return a.queue->walltime < b.queue->walltime;
    if (a.queue->name != b.queue->name) return a.queue->name < b.queue->name;
    return a.site->name < b.site->name;
  });
  return out;
}

void check_site(const Site& site) {
  if (site.name.empty()) fail(ErrorCode::kInvariantViolation, "site name must be non-empty");
  if (site.total_cores < 1) {
    fail(ErrorCode::kInvariantViolation, "site " + site.name + ": total_cores must be >= 1");
  }
  std::set<std::string> names;
  for (const auto& q : site.queues) {
    if (q.name.empty()) fail(ErrorCode::kInvariantViolation, "site " + site.name + ": empty queue name");
    if (!names.insert(q.name).second) {
      fail(ErrorCode::kInvariantViolation, "site " + site.name + ": duplicate queue " + q.name);
    }
    if (!(q.walltime > 0.0)) {
      fail(ErrorCode::kInvariantViolation, "queue " + q.name + ": walltime must be > 0");
    }
    if (q.cores_per_user < 1) {
      fail(ErrorCode::kInvariantViolation, "queue " + q.name + ": cores_per_user must be >= 1");
    }
  }
}

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  fail(ErrorCode::kParseError, "field " + field + ": " + what);
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) field_error(path + "." + key, "missing");
  return obj.at(key);
}

std::string string_field(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = member(obj, key, path);
  if (!v.is_string()) field_error(path + "." + key, "expected string");
  return v.get<std::string>();
}

int int_field(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = member(obj, key, path);
  if (!v.is_number_integer()) field_error(path + "." + key, "expected integer");
  return v.get<int>();
}

}  // namespace

std::vector<Site> parse_site_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    fail(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + e.what());
  }
  const auto& sites_json = member(doc, "sites", "$");
  if (!sites_json.is_array()) field_error("$.sites", "expected array");

  std::vector<Site> sites;
  std::set<std::string> site_names;
  for (std::size_t i = 0; i < sites_json.size(); ++i) {
    const auto path = "$.sites[" + std::to_string(i) + "]";
    const auto& sj = sites_json[i];
    Site site;
    site.name = string_field(sj, "name", path);
    site.kind = sj.contains("kind") ? site_kind_from_string(string_field(sj, "kind", path))
                                    : SiteKind::kSimulatedCluster;
    site.total_cores = int_field(sj, "total_cores", path);
    const auto& qs = member(sj, "queues", path);
    if (!qs.is_array()) field_error(path + ".queues", "expected array");
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const auto qpath = path + ".queues[" + std::to_string(k) + "]";
      Queue q;
      q.name = string_field(qs[k], "name", qpath);
      try {
        q.walltime = parse_duration_minutes(string_field(qs[k], "walltime", qpath));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kParseError) throw;
        field_error(qpath + ".walltime", e.what());
      }
      q.cores_per_user = int_field(qs[k], "cores_per_user", qpath);
      q.site_ref = site.name;
      site.queues.push_back(std::move(q));
    }
    check_site(site);
    if (!site_names.insert(site.name).second) {
      fail(ErrorCode::kInvariantViolation, "duplicate site " + site.name);
    }
    sites.push_back(std::move(site));
  }
  return sites;
}

std::vector<Site> load_site_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open site config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_site_config(ss.str());
}

const std::map<std::string, ResourceProfile>& default_profiles() {
  // Runtime classes, locations and output classes follow the component
  // table of the general workflow. LAMMPS is anchored at 180 min for 2520
  // atoms, i.e. 1/14 min per atom.
  static const std::map<std::string, ResourceProfile> kProfiles = [] {
    std::map<std::string, ResourceProfile> m;
    auto add = [&m](ResourceProfile p) { m.emplace(p.name, std::move(p)); };
    add({"lammps", LocationClass::kCluster, RuntimeClass::kLong, 180.0, 2048.0, 2520.0,
         DataClass::kTextHuge, 4});
    add({"r", LocationClass::kServer, RuntimeClass::kShort, 5.0, 256.0, 1.0,
         DataClass::kImageSmall, 1});
    add({"pizza", LocationClass::kServer, RuntimeClass::kShort, 5.0, 512.0, 1.0,
         DataClass::kTextHuge, 1});
    add({"atomeye", LocationClass::kDci, RuntimeClass::kMedium, 30.0, 512.0, 1.0,
         DataClass::kImageSmall, 1});
    add({"ffmpeg", LocationClass::kDci, RuntimeClass::kShort, 5.0, 256.0, 1.0,
         DataClass::kVideoSmall, 1});
    add({"debyer", LocationClass::kCluster, RuntimeClass::kLong, 1440.0, 1024.0, 1.0,
         DataClass::kTextMedium, 1});
    return m;
  }();
  return kProfiles;
}

}  // namespace gatehub::resource
