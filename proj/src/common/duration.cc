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

#include "gatehub/common/duration.h"

#include <charconv>
#include <cmath>
#include <limits>

#include "gatehub/common/error.h"

namespace gatehub {

double parse_duration_minutes(std::string_view text) {
  if (text == "unlimited") return std::numeric_limits<double>::infinity();
  if (text.size() < 2) {
    fail(ErrorCode::kParseError, "bad duration '" + std::string(text) + "'");
  }
  const char unit = text.back();
  const std::string_view digits = text.substr(0, text.size() - 1);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value < 0) {
    fail(ErrorCode::kParseError, "bad duration '" + std::string(text) + "'");
  }
  const auto v = static_cast<double>(value);
  switch (unit) {
    case 's': return v / 60.0;
    case 'm': return v;
    case 'h': return v * 60.0;
    case 'd': return v * 1440.0;
    default:
      fail(ErrorCode::kParseError, "bad duration unit in '" + std::string(text) + "'");
  }
}

std::string format_duration_minutes(double minutes) {
  if (std::isinf(minutes)) return "unlimited";
  if (minutes == std::floor(minutes)) {
    const auto m = static_cast<long long>(minutes);
    if (m != 0 && m % 1440 == 0) return std::to_string(m / 1440) + "d";
    if (m != 0 && m % 60 == 0) return std::to_string(m / 60) + "h";
    return std::to_string(m) + "m";
  }
  return std::to_string(static_cast<long long>(std::llround(minutes * 60.0))) + "s";
}

}  // namespace gatehub
