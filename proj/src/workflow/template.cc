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

#include "gatehub/common/error.h"
#include "gatehub/workflow/workflow.h"

namespace gatehub::workflow {
namespace {

// Walks the template once, calling on_text for literal runs and
// on_name for each placeholder.
template <typename OnText, typename OnName>
void scan(std::string_view tmpl, OnText on_text, OnName on_name) {
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.compare(i, 3, "$${") == 0) {
      on_text(std::string_view("${"));
      i += 3;
      continue;
    }
    if (tmpl.compare(i, 2, "${") == 0) {
      const auto close = tmpl.find('}', i + 2);
      if (close == std::string_view::npos) {
        fail(ErrorCode::kMalformedTemplate, "unterminated placeholder in '" + std::string(tmpl) + "'");
      }
      const auto name = tmpl.substr(i + 2, close - i - 2);
      if (name.empty()) {
        fail(ErrorCode::kMalformedTemplate, "empty placeholder in '" + std::string(tmpl) + "'");
      }
      on_name(name);
      i = close + 1;
      continue;
    }
    const auto next = tmpl.find('$', i + 1);
    const auto end = next == std::string_view::npos ? tmpl.size() : next;
    on_text(tmpl.substr(i, end - i));
    i = end;
  }
}

}  // namespace

std::vector<std::string> placeholders(std::string_view tmpl) {
  std::vector<std::string> names;
  scan(tmpl, [](std::string_view) {}, [&names](std::string_view n) { names.emplace_back(n); });
  return names;
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  scan(
      tmpl, [&out](std::string_view text) { out.append(text); },
      [&](std::string_view name) {
        auto it = values.find(std::string(name));
        if (it == values.end()) fail(ErrorCode::kUnknownPlaceholder, std::string(name));
        out.append(it->second);
      });
  return out;
}

}  // namespace gatehub::workflow
