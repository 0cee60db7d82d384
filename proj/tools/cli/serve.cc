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


#include <csignal>
#include <iostream>
#include <thread>

#include <pthread.h>

#include "cli.h"
#include "gatehub/common/error.h"
#include "gatehub/resource/resource.h"
#include "gatehub/service/server.h"

namespace gatehub::cli {

int cmd_serve(const ServeOptions& o) {
  const auto colon = o.addr.rfind(':');
  if (colon == std::string::npos) throw UsageError("--addr expects HOST:PORT, got '" + o.addr + "'");
  const std::string host = o.addr.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(o.addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--addr expects HOST:PORT, got '" + o.addr + "'");
  }

  // Block the stop signals before any thread starts; a dedicated thread
  // waits for them and shuts the listener down.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  repository::StoreOptions so;
  so.admin_password = o.admin_password;
  so.templates_dir = data_dir() / "templates";
  repository::Store store(o.store, so);

  service::ManagerConfig mc;
  mc.sim_sites = resource::load_site_config(o.sites);
  mc.local_sites = resource::load_site_config(o.local_sites);
  mc.local.bin_dirs = o.bin_dirs;
  mc.local.ms_per_minute = o.ms_per_minute;
  mc.local.max_parallel = o.max_parallel;
  mc.sim_pace_ms = o.sim_pace_ms;
  service::RunManager manager(store, mc);

  service::ServerConfig sc;
  sc.ui_dir = o.ui_dir;
  sc.allow_register = o.allow_register;
  service::Server server(store, manager, sc);
  const int bound = server.bind(host, port);
  std::cout << "listening on http://" << host << ":" << bound << service::kApiBase << std::endl;

  std::jthread waiter([&server, stop_signals] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    server.stop();
  });
  server.serve();
  // serve() also returns on its own failure; wake the waiter in that case.
  pthread_kill(waiter.native_handle(), SIGTERM);
  return 0;
}

}  // namespace gatehub::cli
