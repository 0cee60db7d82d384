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

#include "json.hpp"

namespace gatehub::scheduler {

struct Policy {
  double safety = 1.15;
  int max_attempts = 3;
  double inflation = 1.5;
  /// Real-time poll period for the local backend, in seconds.
  double poll_period_s = 10.0;
  /// Poll period on the simulated clock, in minutes.
  double poll_period_sim = 1.0;
};

/// Reads `{safety, max_attempts, inflation, poll_period}`; missing keys keep
/// their defaults. Throws kParseError / kInvariantViolation.
Policy policy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Policy& p);

}  // namespace gatehub::scheduler
