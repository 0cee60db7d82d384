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


#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include "cli.h"
#include "gatehub/common/error.h"
#include "gatehub/service/server.h"
#include "gatehub/workflow/io.h"
#include "httplib.h"

namespace gatehub::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Reply {
  int status = 0;
  std::string body;
  std::string content_type;

  ojson json() const { return body.empty() ? ojson() : ojson::parse(body); }
  bool ok() const { return status >= 200 && status < 300; }
};

class Api {
 public:
  explicit Api(const RemoteOptions& r) : client_(r.api), token_(r.token) {
    if (!client_.is_valid()) throw UsageError("invalid --api URL '" + r.api + "'");
    client_.set_read_timeout(60, 0);
  }

  Reply call(const std::string& method, const std::string& path, const std::string& body = {},
             httplib::Headers headers = {}) {
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    const auto full = std::string(service::kApiBase) + path;
    httplib::Result res;
    if (method == "GET") res = client_.Get(full, headers);
    else if (method == "POST") res = client_.Post(full, headers, body, "application/json");
    else if (method == "PATCH") res = client_.Patch(full, headers, body, "application/json");
    else if (method == "DELETE") res = client_.Delete(full, headers, body, "application/json");
    else throw UsageError("unsupported method " + method);
    if (!res) fail(ErrorCode::kIo, "cannot reach the gateway: " + httplib::to_string(res.error()));
    return {res->status, res->body, res->get_header_value("Content-Type")};
  }

 private:
  httplib::Client client_;
  std::string token_;
};

/// Prints an API error to stderr and returns exit code 1.
int report_error(const Reply& r) {
  std::string message = r.body;
  try {
    auto j = r.json();
    message = j.at("error").at("code").get<std::string>() + ": " + j.at("error").at("message").get<std::string>();
  } catch (const std::exception&) {
  }
  std::cerr << "error: HTTP " << r.status << " " << message << "\n";
  return 1;
}

std::string run_path(const std::string& run) { return "/runs/" + run; }

}  // namespace

int cmd_call(const RemoteOptions& r, const std::string& method, const std::string& path, const std::string& body) {
  Api api(r);
  auto reply = api.call(method, path, body);
  if (!reply.ok()) return report_error(reply);
  if (!reply.body.empty()) std::cout << (reply.content_type.starts_with("application/json") ? reply.json().dump(2) : reply.body) << "\n";
  return 0;
}

int cmd_login(const RemoteOptions& r, const std::string& user, const std::string& password) {
  RemoteOptions anonymous = r;
  anonymous.token.clear();
  Api api(anonymous);
  auto reply = api.call("POST", "/auth/login", ojson{{"username", user}, {"password", password}}.dump());
  if (!reply.ok()) return report_error(reply);
  auto j = reply.json();
  if (r.json) std::cout << j.dump(2) << "\n";
  else std::cout << j["token"].get<std::string>() << "\n";
  return 0;
}

int cmd_submit(const RemoteOptions& r, const SubmitOptions& s) {
  ojson body{{"template", s.template_name}, {"backend", s.backend}};
  if (s.version) body["version"] = *s.version;
  body["sweep"] = workflow::to_json(parse_sweep_args(s.sweep));
  body["seed"] = s.sim.seed;
  ojson sim{{"sigma", s.sim.sigma}, {"failure_rate", s.sim.failure_rate}};
  auto truth = parse_true_runtime(s.sim.true_runtime);
  if (!truth.empty()) sim["true_runtime"] = truth;
  body["sim"] = sim;
  if (s.sim.safety) body["policy"] = {{"safety", *s.sim.safety}};
  if (!s.run_id.empty()) body["run_id"] = s.run_id;

  Api api(r);
  httplib::Headers headers;
  if (!s.idempotency_key.empty()) headers.emplace("Idempotency-Key", s.idempotency_key);
  auto reply = api.call("POST", "/runs", body.dump(), headers);
  if (!reply.ok()) return report_error(reply);
  auto run = reply.json();
  const auto id = run["id"].get<std::string>();

  if (s.wait) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(s.wait_timeout_s);
    while (run["status"] == "running") {
      if (std::chrono::steady_clock::now() > deadline) {
        std::cerr << "error: run " << id << " still running after " << s.wait_timeout_s << " s\n";
        return 1;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      auto poll = api.call("GET", run_path(id));
      if (!poll.ok()) return report_error(poll);
      run = poll.json();
    }
  }
  if (r.json) {
    std::cout << run.dump(2) << "\n";
  } else {
    std::cout << id << " " << run["status"].get<std::string>() << (reply.status == 200 ? " (existing)" : "") << "\n";
  }
  if (!s.wait) return 0;
  return run["state_counts"]["finished"] == run["jobs"].size() ? 0 : 1;
}

int cmd_status(const RemoteOptions& r, const std::string& run) {
  Api api(r);
  auto reply = api.call("GET", run_path(run));
  if (!reply.ok()) return report_error(reply);
  auto j = reply.json();
  if (r.json) {
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  std::cout << j["id"].get<std::string>() << " " << j["status"].get<std::string>() << "  template "
            << j["template"].get<std::string>() << " v" << j["template_version"] << "  backend "
            << j["backend"].get<std::string>() << "\n";
  for (const auto& [state, n] : j["state_counts"].items()) {
    if (n.get<int>() > 0) std::cout << "  " << state << " " << n << "\n";
  }
  return 0;
}

int cmd_summary(const RemoteOptions& r, const std::string& run) {
  Api api(r);
  auto reply = api.call("GET", run_path(run) + "/summary");
  if (!reply.ok()) return report_error(reply);
  auto j = reply.json();
  if (r.json) std::cout << j.dump(2) << "\n";
  else print_summary(scheduler::summary_from_json(nlohmann::json::parse(reply.body)));
  return 0;
}

int cmd_fetch(const RemoteOptions& r, const std::string& run, const fs::path& out) {
  Api api(r);
  auto list = api.call("GET", run_path(run) + "/artifacts");
  if (!list.ok()) return report_error(list);
  const fs::path dir = out.empty() ? fs::path(run) : out;
  ojson fetched = ojson::array();
  int skipped = 0;
  for (const auto& a : list.json()) {
    if (a["synthetic"].get<bool>()) {
      ++skipped;
      continue;
    }
    const auto index = a["index"].get<std::size_t>();
    auto file = api.call("GET", run_path(run) + "/artifacts/" + std::to_string(index));
    if (!file.ok()) return report_error(file);
    const auto name = a["job"].get<std::string>() + "-" + a["port"].get<std::string>() + "-" +
                      fs::path(a["path"].get<std::string>()).filename().string();
    fs::create_directories(dir);
    std::ofstream(dir / name, std::ios::binary) << file.body;
    fetched.push_back({{"index", index}, {"file", (dir / name).string()}, {"bytes", file.body.size()}});
    if (!r.json) std::cout << (dir / name).string() << " " << file.body.size() << " bytes\n";
  }
  if (r.json) std::cout << ojson{{"run", run}, {"fetched", fetched}, {"synthetic_skipped", skipped}}.dump(2) << "\n";
  else if (skipped > 0) std::cout << skipped << " simulated artifacts have no content\n";
  return 0;
}

}  // namespace gatehub::cli
