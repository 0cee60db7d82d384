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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gatehub/repository/store.h"
#include "gatehub/service/permissions.h"
#include "gatehub/service/run_manager.h"

namespace gatehub::service {

inline constexpr const char* kApiBase = "/api/v1";

/// One route of the REST API. Paths use `{name}` placeholders and are
/// relative to kApiBase. `action` is empty for the unauthenticated routes.
struct Endpoint {
  std::string method;
  std::string path;
  std::optional<Action> action;
};

/// Every route the server answers, in registration order.
const std::vector<Endpoint>& endpoints();

/// HTTP status for an error code (401, 403, 404, 409, 422 or 500).
int http_status(ErrorCode code);

struct ServerConfig {
  /// Static files served under /ui when the directory exists.
  std::filesystem::path ui_dir;
  /// Lets anyone create an end_user account through /auth/register.
  bool allow_register = false;
};

class Server {
 public:
  Server(repository::Store& store, RunManager& runs, ServerConfig config = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds to host:port (port 0 picks a free one) and returns the port.
  /// Throws kIo when the address is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void serve();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gatehub::service
