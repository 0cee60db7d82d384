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

#include "gatehub/execution/local_executor.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gatehub/common/error.h"

extern char** environ;

namespace gatehub::execution {

using scheduler::EventKind;

namespace {

std::string env_name(std::string port) {
  for (auto& c : port) c = std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c)) : '_';
  return port;
}

std::string format_minutes(double m) {
  std::ostringstream os;
  os << m;
  return os.str();
}

}  // namespace

LocalExecutor::LocalExecutor(std::vector<resource::Site> sites, LocalConfig config)
    : sites_(std::move(sites)), config_(std::move(config)), epoch_(std::chrono::steady_clock::now()) {
  if (config_.max_parallel < 1) fail(ErrorCode::kInvalidArgument, "max_parallel must be at least 1");
  if (config_.ms_per_minute <= 0) fail(ErrorCode::kInvalidArgument, "ms_per_minute must be positive");
  reaper_ = std::jthread([this](std::stop_token st) { reap(st); });
}

LocalExecutor::~LocalExecutor() {
  reaper_.request_stop();
  if (reaper_.joinable()) reaper_.join();
  std::lock_guard lock(mu_);
  for (auto& [_, p] : running_) {
    ::kill(-p.pid, SIGKILL);
    ::waitpid(p.pid, nullptr, 0);
  }
}

std::vector<std::string> LocalExecutor::sites() const {
  std::vector<std::string> out;
  for (const auto& s : sites_) out.push_back(s.name);
  return out;
}

double LocalExecutor::now() const {
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - epoch_).count();
  return ms / config_.ms_per_minute;
}

std::filesystem::path LocalExecutor::job_dir(const std::string& run_id, const std::string& job_id) const {
  return config_.runs_root / run_id / job_id;
}

std::filesystem::path LocalExecutor::resolve_executable(const std::string& name) const {
  auto runnable = [](const std::filesystem::path& p) {
    std::error_code ec;
    return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
  };
  if (name.empty()) fail(ErrorCode::kSpawnError, "empty executable");
  if (name.find('/') != std::string::npos) {
    const auto p = std::filesystem::absolute(name);
    if (runnable(p)) return p;
    fail(ErrorCode::kSpawnError, "executable not found: " + name);
  }
  std::vector<std::filesystem::path> dirs = config_.bin_dirs;
  if (const char* path = std::getenv("PATH")) {
    std::stringstream ss(path);
    std::string d;
    while (std::getline(ss, d, ':')) {
      if (!d.empty()) dirs.emplace_back(d);
    }
  }
  for (const auto& d : dirs) {
    const auto p = std::filesystem::absolute(d / name);
    if (runnable(p)) return p;
  }
  fail(ErrorCode::kSpawnError, "executable not found: " + name);
}

long LocalExecutor::used_cores_locked(const std::string& site) const {
  long used = 0;
  for (const auto& [_, p] : running_) {
    if (p.launch.site == site) used += p.launch.cores;
  }
  return used;
}

std::vector<scheduler::QueueOccupancy> LocalExecutor::poll(const std::string& site) const {
  const resource::Site* s = nullptr;
  for (const auto& st : sites_) {
    if (st.name == site) s = &st;
  }
  if (s == nullptr) fail(ErrorCode::kNotFound, "unknown site " + site);
  std::lock_guard lock(mu_);
  const long idle = s->total_cores - used_cores_locked(site);
  std::vector<scheduler::QueueOccupancy> out;
  for (const auto& q : s->queues) {
    scheduler::QueueOccupancy occ{site, q.name, static_cast<int>(idle), 0, 0, {}, false};
    for (const auto& w : waiting_) {
      if (w.site != site || w.queue != q.name) continue;
      ++occ.queued_jobs;
      occ.user_cores[w.user] += w.cores;
    }
    for (const auto& [_, p] : running_) {
      if (p.launch.site != site || p.launch.queue != q.name) continue;
      ++occ.running_jobs;
      occ.user_cores[p.launch.user] += p.launch.cores;
    }
    out.push_back(std::move(occ));
  }
  return out;
}

ExecutorHandle LocalExecutor::submit(const SubmitRequest& request) {
  if (request.job == nullptr) fail(ErrorCode::kInvalidArgument, "submit without a job");
  const auto& job = *request.job;
  const resource::Queue* queue = nullptr;
  for (const auto& s : sites_) {
    if (s.name == request.site) queue = s.find_queue(request.queue);
  }
  if (queue == nullptr) fail(ErrorCode::kUnknownQueue, "unknown queue " + request.site + "/" + request.queue);

  Launch l;
  l.job_id = job.id();
  l.run_id = request.run_id;
  l.user = job.user;
  l.site = request.site;
  l.queue = request.queue;
  l.cores = job.estimate.cores;
  l.attempt = job.attempt;
  l.segment = request.segment;
  l.segments = request.segments;
  l.walltime = queue->walltime;
  l.dir = std::filesystem::absolute(job_dir(request.run_id, job.id()));
  l.exe = resolve_executable(job.spec.executable);

  namespace fs = std::filesystem;
  if (request.segment == 1) {
    // A fresh attempt starts from clean outputs and no checkpoints.
    fs::remove_all(l.dir / "outputs");
    fs::remove_all(l.dir / "inputs");
    fs::remove_all(l.dir / "checkpoint");
  }
  fs::create_directories(l.dir / "outputs");
  fs::create_directories(l.dir / "inputs");
  fs::create_directories(l.dir / "checkpoint");

  for (const auto& in : request.inputs) {
    auto src = in.path;
    if (src.is_relative()) src = config_.data_dir / src;
    std::error_code ec;
    if (!fs::is_regular_file(src, ec)) fail(ErrorCode::kStagingError, "input " + in.port + " missing: " + src.string());
    const auto dst_dir = l.dir / "inputs" / in.port;
    fs::create_directories(dst_dir);
    const auto dst = dst_dir / src.filename();
    fs::copy_file(src, dst, fs::copy_options::overwrite_existing, ec);
    if (ec) fail(ErrorCode::kStagingError, "cannot stage " + src.string() + ": " + ec.message());
    l.env["GATEHUB_INPUT_" + env_name(in.port)] = dst.string();
  }
  for (const auto& [k, v] : checkpoint_contract(request.segment, request.segments, l.dir / "checkpoint")) l.env[k] = v;
  for (const auto& [k, v] : job.spec.env) l.env[k] = v;
  l.env["GATEHUB_JOB"] = job.id();
  l.env["GATEHUB_RUN"] = request.run_id;
  l.env["GATEHUB_ATTEMPT"] = std::to_string(job.attempt);
  l.env["GATEHUB_SEGMENT"] = std::to_string(request.segment) + "/" + std::to_string(request.segments);
  l.env["GATEHUB_ESTIMATE_MINUTES"] = format_minutes(request.runtime);
  l.env["GATEHUB_MS_PER_MINUTE"] = format_minutes(config_.ms_per_minute);
  l.env["GATEHUB_OUTPUTS"] = (l.dir / "outputs").string();

  l.argv.push_back(l.exe.string());
  for (const auto& a : job.spec.args) l.argv.push_back(a);

  {
    nlohmann::ordered_json meta{{"job", l.job_id},     {"run", l.run_id},         {"node", job.spec.node_id},
                                {"attempt", l.attempt}, {"segment", l.segment},    {"segments", l.segments},
                                {"queue", l.site + "/" + l.queue}, {"executable", l.exe.string()},
                                {"args", job.spec.args}, {"env", l.env},          {"state", "queued"}};
    std::ofstream(l.dir / "meta.json") << meta.dump(2) << "\n";
  }

  std::lock_guard lock(mu_);
  waiting_.push_back(std::move(l));
  start_ready_locked();
  return {job.id(), Backend::kLocal, running_.count(job.id()) ? running_.at(job.id()).pid : 0};
}

void LocalExecutor::start_ready_locked() {
  for (auto it = waiting_.begin(); it != waiting_.end();) {
    if (static_cast<int>(running_.size()) >= config_.max_parallel) return;
    const resource::Site* site = nullptr;
    for (const auto& s : sites_) {
      if (s.name == it->site) site = &s;
    }
    const auto* queue = site->find_queue(it->queue);
    long user = 0;
    for (const auto& [_, p] : running_) {
      if (p.launch.site == it->site && p.launch.queue == it->queue && p.launch.user == it->user) user += p.launch.cores;
    }
    if (used_cores_locked(it->site) + it->cores > site->total_cores || user + it->cores > queue->cores_per_user) {
      ++it;
      continue;
    }
    Launch l = std::move(*it);
    it = waiting_.erase(it);
    spawn_locked(std::move(l));
  }
}

void LocalExecutor::spawn_locked(Launch l) {
  // Everything the child needs is built before fork; the child only calls
  // async-signal-safe functions.
  std::vector<std::string> env_strings;
  std::map<std::string, std::string> merged;
  for (char** e = environ; *e != nullptr; ++e) {
    std::string kv(*e);
    const auto eq = kv.find('=');
    if (eq != std::string::npos) merged[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  for (const auto& [k, v] : l.env) merged[k] = v;
  for (const auto& [k, v] : merged) env_strings.push_back(k + "=" + v);
  std::vector<char*> envp;
  for (auto& s : env_strings) envp.push_back(s.data());
  envp.push_back(nullptr);
  std::vector<char*> argv;
  for (auto& a : l.argv) argv.push_back(a.data());
  argv.push_back(nullptr);
  const std::string out_path = (l.dir / "stdout.txt").string();
  const std::string err_path = (l.dir / "stderr.txt").string();
  const std::string cwd = l.dir.string();
  const std::string exe = l.exe.string();

  const pid_t pid = ::fork();
  if (pid == 0) {
    ::setpgid(0, 0);
    const int out = ::open(out_path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    const int err = ::open(err_path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    const int nul = ::open("/dev/null", O_RDONLY);
    if (out < 0 || err < 0 || nul < 0 || ::chdir(cwd.c_str()) != 0) ::_exit(126);
    ::dup2(nul, 0);
    ::dup2(out, 1);
    ::dup2(err, 2);
    ::execve(exe.c_str(), argv.data(), envp.data());
    ::_exit(127);
  }
  const std::string queue_key = l.site + "/" + l.queue;
  if (pid < 0) {
    events_.push_back({now(), l.job_id, l.attempt, l.segment, EventKind::kLost, 0, "fork failed", queue_key});
    cv_.notify_all();
    return;
  }
  ::setpgid(pid, pid);
  Proc p{std::move(l), pid, std::chrono::steady_clock::now(), now()};
  events_.push_back({p.started_min, p.launch.job_id, p.launch.attempt, p.launch.segment, EventKind::kStarted, 0, "",
                     queue_key});
  running_.emplace(p.launch.job_id, std::move(p));
  cv_.notify_all();
}

void LocalExecutor::write_meta(const Proc& p, int exit_code, bool killed, double ended_min) const {
  const auto path = p.launch.dir / "meta.json";
  nlohmann::ordered_json meta;
  {
    std::ifstream in(path);
    meta = nlohmann::ordered_json::parse(in, nullptr, false);
    if (meta.is_discarded()) meta = nlohmann::ordered_json::object();
  }
  meta["state"] = killed ? "killed_walltime" : (exit_code == 0 ? "exited" : "failed");
  meta["pid"] = p.pid;
  meta["exit_code"] = exit_code;
  meta["walltime_killed"] = killed;
  meta["started_min"] = p.started_min;
  meta["ended_min"] = ended_min;
  std::ofstream(path) << meta.dump(2) << "\n";
}

void LocalExecutor::reap(std::stop_token stop) {
  while (!stop.stop_requested()) {
    {
      std::lock_guard lock(mu_);
      bool changed = false;
      for (auto it = running_.begin(); it != running_.end();) {
        auto& p = it->second;
        int status = 0;
        const pid_t r = ::waitpid(p.pid, &status, WNOHANG);
        bool killed = false;
        if (r == 0) {
          const double elapsed_min =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - p.started).count() /
              config_.ms_per_minute;
          if (std::isinf(p.launch.walltime) || elapsed_min < p.launch.walltime) {
            ++it;
            continue;
          }
          ::kill(-p.pid, SIGKILL);
          ::waitpid(p.pid, &status, 0);
          killed = true;
        }
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
        const double t = now();
        write_meta(p, code, killed, t);
        const std::string queue_key = p.launch.site + "/" + p.launch.queue;
        if (killed) {
          events_.push_back({t, p.launch.job_id, p.launch.attempt, p.launch.segment, EventKind::kWalltimeKilled, 0, "",
                             queue_key});
        } else {
          events_.push_back({t, p.launch.job_id, p.launch.attempt, p.launch.segment, EventKind::kExited, code,
                             code == 0 ? "" : "see stderr.txt", queue_key});
        }
        it = running_.erase(it);
        changed = true;
      }
      if (changed) {
        start_ready_locked();
        cv_.notify_all();
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
}

void LocalExecutor::cancel(const std::string& job_id) {
  std::lock_guard lock(mu_);
  std::erase_if(waiting_, [&](const Launch& l) { return l.job_id == job_id; });
  if (auto it = running_.find(job_id); it != running_.end()) {
    ::kill(-it->second.pid, SIGKILL);
    ::waitpid(it->second.pid, nullptr, 0);
    running_.erase(it);
  }
  // Drop anything already reported for the job.
  std::erase_if(events_, [&](const ExecEvent& e) { return e.job_id == job_id; });
  start_ready_locked();
}

CollectResult LocalExecutor::collect(const scheduler::Job& job, const std::string& run_id) {
  return collect_outputs(job, job_dir(run_id, job.id()) / "outputs", config_.size_scale);
}

bool LocalExecutor::busy() const {
  std::lock_guard lock(mu_);
  return !waiting_.empty() || !running_.empty() || !events_.empty();
}

std::vector<ExecEvent> LocalExecutor::wait_events(double max_wait_s) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, std::chrono::duration<double>(max_wait_s), [this] { return !events_.empty(); });
  return std::exchange(events_, {});
}

}  // namespace gatehub::execution
