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

#include <system_error>

#include "gatehub/common/error.h"
#include "gatehub/workflow/workflow.h"

namespace gatehub::workflow {
namespace {

constexpr double kMB = 1e6;
constexpr double kGB = 1e9;

}  // namespace

SizeRange expected_range(DataClass c, double scale_factor) {
  SizeRange r{};
  switch (c) {
    case DataClass::kTextHuge: r = {1 * kGB, 10 * kGB}; break;
    case DataClass::kTextMedium: r = {10 * kMB, 1 * kGB}; break;
    case DataClass::kImageSmall: r = {-1.0, 1 * kMB}; break;
    case DataClass::kVideoSmall: r = {-1.0, 10 * kMB}; break;
    case DataClass::kScalar: r = {-1.0, 4096.0}; break;
  }
  if (r.lower_exclusive > 0) r.lower_exclusive *= scale_factor;
  r.upper_inclusive *= scale_factor;
  return r;
}

double midpoint_bytes(DataClass c, double scale_factor) {
  const auto r = expected_range(c, scale_factor);
  const double lo = r.lower_exclusive < 0 ? 0.0 : r.lower_exclusive;
  return (lo + r.upper_inclusive) / 2.0;
}

SizeClassReport classify_size(std::uint64_t bytes, DataClass declared, double scale_factor) {
  const auto r = expected_range(declared, scale_factor);
  const auto b = static_cast<double>(bytes);
  return {declared, bytes, b > r.lower_exclusive && b <= r.upper_inclusive};
}

SizeClassReport classify_output(const std::filesystem::path& artifact, DataClass declared,
                                double scale_factor) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(artifact, ec);
  if (ec) fail(ErrorCode::kMissingArtifact, artifact.string());
  return classify_size(size, declared, scale_factor);
}

}  // namespace gatehub::workflow
