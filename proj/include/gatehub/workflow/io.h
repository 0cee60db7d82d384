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
#include <string>

#include "json.hpp"

#include "gatehub/resource/model.h"
#include "gatehub/workflow/model.h"
#include "gatehub/workflow/workflow.h"

namespace gatehub::workflow {

using ojson = nlohmann::ordered_json;

/// Structural parse only (types, required keys). Graph and binding checks
/// are left to validate_graph / check_workflow so that `validate` can
/// report every violation of a well-formed document.
Workflow workflow_from_json(const ojson& doc);
ojson to_json(const Workflow& wf);

Workflow parse_workflow(const std::string& text);
Workflow load_workflow(const std::filesystem::path& path);

ojson to_json(const resource::ResourceProfile& p);
resource::ResourceProfile profile_from_json(const std::string& name, const ojson& j);

ojson to_json(const SweepSpec& sweep);
SweepSpec sweep_from_json(const ojson& j);

ojson to_json(const ValidationReport& report);
ojson to_json(const JobSpec& job);

}  // namespace gatehub::workflow
