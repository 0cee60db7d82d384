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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gatehub/resource/model.h"

namespace gatehub::resource {

/// Linear, through-origin estimate: runtime and memory scale by
/// scale / reference_scale. Throws kNonPositiveScale when scale <= 0.
Estimate estimate_requirements(const ResourceProfile& profile, double scale);

struct Observation {
  double scale = 0.0;
  double runtime = 0.0;
};

/// Least squares through the origin, coefficient = sum(s*t) / sum(s*s).
ScalingModel calibrate(std::span<const Observation> observations);

/// Queues where runtime * safety <= walltime and cores <= cores_per_user,
/// ordered by (walltime, queue name, site name).
std::vector<QueueRef> feasible_queues(const Estimate& est, const std::vector<Site>& sites,
                                      double safety);

/// Checks Site/Queue invariants, throwing kInvariantViolation.
void check_site(const Site& site);

std::vector<Site> parse_site_config(const std::string& text);
std::vector<Site> load_site_config(const std::filesystem::path& path);

/// Profiles for the six components of the general workflow.
const std::map<std::string, ResourceProfile>& default_profiles();

}  // namespace gatehub::resource
