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

namespace gatehub {

/// Parses `<int><s|m|h|d>` into minutes. "unlimited" maps to +infinity.
/// Throws Error(kParseError) on anything else.
double parse_duration_minutes(std::string_view text);

/// Inverse of parse_duration_minutes for whole units; falls back to
/// seconds when the value is not a whole number of minutes.
std::string format_duration_minutes(double minutes);

}  // namespace gatehub
