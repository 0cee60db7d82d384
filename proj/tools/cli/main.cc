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


// gatehub: offline workflow tools, the gateway server and an API client.
//
// Exit status: 0 on success, 1 when validation or a run fails (or the API
// reports an error), 2 on a usage error.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "cli.h"
#include "gatehub/common/error.h"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

void add_sweep_flags(CLI::App* cmd, gatehub::cli::SweepArgs& sweep) {
  cmd->add_option("--axis", sweep.axes, "Sweep axis NAME=V1,V2,... (replaces a same-named axis or constant)");
  cmd->add_option("--set", sweep.constants, "Sweep constant NAME=VALUE");
}

void add_sim_flags(CLI::App* cmd, gatehub::cli::SimArgs& sim) {
  cmd->add_option("--seed", sim.seed, "Simulator seed")->capture_default_str();
  cmd->add_option("--sigma", sim.sigma, "Lognormal runtime noise")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--failure-rate", sim.failure_rate, "Injected failure probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--safety", sim.safety, "Walltime safety factor applied to estimates")->check(CLI::PositiveNumber);
  cmd->add_option("--true-runtime", sim.true_runtime, "Simulated true runtime NODE=MINUTES");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = gatehub::cli;
  CLI::App app{"GateHub science gateway"};
  app.require_subcommand(1);
  int code = 0;

  cli::OfflineOptions offline;
  auto add_offline = [&](CLI::App* cmd) {
    cmd->add_option("workflow", offline.workflow, "Workflow JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_flag("--json", offline.json, "Machine-readable output");
    add_sweep_flags(cmd, offline.sweep);
  };

  auto* validate = app.add_subcommand("validate", "Check a workflow document");
  add_offline(validate);
  validate->callback([&] { code = cli::cmd_validate(offline); });

  auto* expand = app.add_subcommand("expand", "Print the job table of a workflow's sweep");
  add_offline(expand);
  expand->add_option("--run-id", offline.run_id, "Run id used for job ids")->capture_default_str();
  expand->callback([&] { code = cli::cmd_expand(offline); });

  cli::SimulateOptions sim;
  sim.sites = cli::data_dir() / "sites" / "ntu-hpcc.json";
  auto* simulate = app.add_subcommand("simulate", "Run a workflow on the simulated clusters and print the trace");
  add_offline(simulate);
  simulate->add_option("--run-id", offline.run_id, "Run id used for job ids")->capture_default_str();
  simulate->add_option("--sites", sim.sites, "Site configuration")->capture_default_str()->check(CLI::ExistingFile);
  add_sim_flags(simulate, sim.sim);
  simulate->callback([&] {
    sim.base = offline;
    code = cli::cmd_simulate(sim);
  });

  cli::LocalRunOptions local;
  local.sites = cli::data_dir() / "sites" / "local.json";
  local.workdir = "gatehub-runs";
  auto* run = app.add_subcommand("run", "Run a workflow as local processes");
  add_offline(run);
  run->add_option("--run-id", offline.run_id, "Run id used for job ids")->capture_default_str();
  run->add_option("--sites", local.sites, "Site configuration")->capture_default_str()->check(CLI::ExistingFile);
  run->add_option("--workdir", local.workdir, "Directory for job sandboxes")->capture_default_str();
  run->add_option("--bin-dir", local.bin_dirs, "Directory searched for component executables before PATH");
  run->add_option("--data-dir", local.data_dir, "Base for relative input files")->capture_default_str();
  run->add_option("--ms-per-minute", local.ms_per_minute, "Real milliseconds per estimated minute")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--max-parallel", local.max_parallel, "Concurrent processes")->capture_default_str()->check(CLI::PositiveNumber);
  run->add_option("--safety", local.safety, "Walltime safety factor")->check(CLI::PositiveNumber);
  run->callback([&] {
    local.base = offline;
    code = cli::cmd_run(local);
  });

  cli::ServeOptions serve_opts;
  serve_opts.addr = env_or("GATEHUB_ADDR", "127.0.0.1:8080");
  serve_opts.store = env_or("GATEHUB_STORE", "gatehub-store");
  serve_opts.admin_password = env_or("GATEHUB_ADMIN_PASSWORD", "admin");
  serve_opts.sites = cli::data_dir() / "sites" / "ntu-hpcc.json";
  serve_opts.local_sites = cli::data_dir() / "sites" / "local.json";
  auto* serve = app.add_subcommand("serve", "Start the REST service");
  serve->add_option("--addr", serve_opts.addr, "Listen address HOST:PORT (env GATEHUB_ADDR; port 0 picks one)")->capture_default_str();
  serve->add_option("--store", serve_opts.store, "Store directory (env GATEHUB_STORE)")->capture_default_str();
  serve->add_option("--admin-password", serve_opts.admin_password, "Password of the admin account created on first start");
  serve->add_flag("--allow-register", serve_opts.allow_register, "Allow self-service end_user registration");
  serve->add_option("--sim-pace-ms", serve_opts.sim_pace_ms, "Real milliseconds between simulator batches")->capture_default_str();
  serve->add_option("--bin-dir", serve_opts.bin_dirs, "Directory searched for component executables");
  serve->add_option("--ui-dir", serve_opts.ui_dir, "Static files served under /ui");
  serve->add_option("--sites", serve_opts.sites, "Simulated site configuration")->capture_default_str()->check(CLI::ExistingFile);
  serve->add_option("--local-sites", serve_opts.local_sites, "Local site configuration")->capture_default_str()->check(CLI::ExistingFile);
  serve->add_option("--ms-per-minute", serve_opts.ms_per_minute, "Local backend pacing")->capture_default_str()->check(CLI::PositiveNumber);
  serve->add_option("--max-parallel", serve_opts.max_parallel, "Local backend concurrency")->capture_default_str()->check(CLI::PositiveNumber);
  serve->callback([&] { code = cli::cmd_serve(serve_opts); });

  // API client commands share --api/--token/--json.
  cli::RemoteOptions remote;
  remote.api = env_or("GATEHUB_API", "http://127.0.0.1:8080");
  remote.token = env_or("GATEHUB_TOKEN", "");
  auto add_remote = [&](CLI::App* cmd) {
    cmd->add_option("--api", remote.api, "Gateway URL (env GATEHUB_API)")->capture_default_str();
    cmd->add_option("--token", remote.token, "Bearer token (env GATEHUB_TOKEN)");
    cmd->add_flag("--json", remote.json, "Machine-readable output");
  };

  std::string user, password;
  auto* login = app.add_subcommand("login", "Sign in and print a bearer token");
  add_remote(login);
  login->add_option("--user", user, "Username")->required();
  login->add_option("--password", password, "Password")->required();
  login->callback([&] { code = cli::cmd_login(remote, user, password); });

  cli::SubmitOptions submit_opts;
  auto* submit = app.add_subcommand("submit", "Create a run from a template");
  add_remote(submit);
  submit->add_option("template", submit_opts.template_name, "Template name")->required();
  submit->add_option("--version", submit_opts.version, "Template version (default: newest visible)");
  add_sweep_flags(submit, submit_opts.sweep);
  submit->add_option("--backend", submit_opts.backend, "sim or local")->capture_default_str()->check(CLI::IsMember({"sim", "local"}));
  add_sim_flags(submit, submit_opts.sim);
  submit->add_option("--run-id", submit_opts.run_id, "Explicit run id");
  submit->add_option("--idempotency-key", submit_opts.idempotency_key, "Makes retries of this submission safe");
  submit->add_flag("--wait", submit_opts.wait, "Wait until the run finishes; exit 1 unless every job finished");
  submit->add_option("--timeout", submit_opts.wait_timeout_s, "Seconds to wait with --wait")->capture_default_str();
  submit->callback([&] { code = cli::cmd_submit(remote, submit_opts); });

  std::string run_id;
  auto* status = app.add_subcommand("status", "Show a run's state counts");
  add_remote(status);
  status->add_option("run", run_id, "Run id")->required();
  status->callback([&] { code = cli::cmd_status(remote, run_id); });

  auto* summary = app.add_subcommand("summary", "Show a run's summary and faulty attempts");
  add_remote(summary);
  summary->add_option("run", run_id, "Run id")->required();
  summary->callback([&] { code = cli::cmd_summary(remote, run_id); });

  std::filesystem::path out_dir;
  auto* fetch = app.add_subcommand("fetch", "Download a run's artifacts");
  add_remote(fetch);
  fetch->add_option("run", run_id, "Run id")->required();
  fetch->add_option("--out", out_dir, "Target directory (default: ./<run>)");
  fetch->callback([&] { code = cli::cmd_fetch(remote, run_id, out_dir); });

  std::string method, path, body;
  auto* call = app.add_subcommand("api", "Call any API route, e.g. `api GET /catalog`");
  add_remote(call);
  call->add_option("method", method, "GET, POST, PATCH or DELETE")->required()->check(CLI::IsMember({"GET", "POST", "PATCH", "DELETE"}));
  call->add_option("path", path, "Path below /api/v1")->required();
  call->add_option("--data", body, "JSON request body");
  call->callback([&] { code = cli::cmd_call(remote, method, path, body); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gatehub::Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}
