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


#include <doctest.h>

#include <fstream>

#include "gatehub/common/error.h"
#include "gatehub/repository/store.h"
#include "test_support.h"

namespace gr = gatehub::repository;
using gatehub::Error;
using gatehub::ErrorCode;
using gatehub::testing::bundled_workflow;
using gatehub::testing::scratch_dir;
using gatehub::testing::source_dir;

namespace {

gr::StoreOptions seeded() {
  gr::StoreOptions o;
  o.templates_dir = source_dir() / "templates";
  return o;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("fresh store seeds an admin and the bundled published templates") {
  gr::Store store(scratch_dir("repo"), seeded());
  auto admin = store.find_user("admin");
  REQUIRE(admin);
  CHECK(admin->role == gr::Role::kAdmin);
  CHECK(admin->password_hash != "admin");

  auto general = store.get_template("general");
  REQUIRE(general);
  CHECK(general->version == 1);
  CHECK(general->published);
  CHECK(general->workflow == [] {
    auto wf = bundled_workflow("general");
    wf.owner = "admin";
    wf.status = gatehub::workflow::WorkflowStatus::kPublished;
    return wf;
  }());
}

TEST_CASE("catalog lists the five virtual labs, each backed by a template") {
  gr::Store store(scratch_dir("repo"), seeded());
  auto labs = store.catalog();
  REQUIRE(labs.size() == 5);
  std::vector<std::string> methods;
  for (const auto& lab : labs) {
    methods.push_back(lab.name);
    auto t = store.get_template(lab.template_ref);
    REQUIRE_MESSAGE(t, lab.template_ref);
    CHECK(t->published);
    for (const auto& c : lab.components) {
      bool found = false;
      for (const auto& n : t->workflow.graph.nodes) found = found || n.name == c || n.id == c;
      CHECK_MESSAGE(found, lab.name << " lists " << c << " which its template lacks");
    }
  }
  std::sort(methods.begin(), methods.end());
  CHECK(methods == std::vector<std::string>{"AFM", "CN-RDF", "ND", "TEM", "XRD"});
  CHECK(labs == gr::default_catalog());
}

TEST_CASE("login issues tokens that resolve until revoked") {
  gr::Store store(scratch_dir("repo"), seeded());
  store.put_user("alice", gr::Role::kEndUser, "s3cret");
  CHECK(code_of([&] { store.login("alice", "wrong"); }) == ErrorCode::kUnauthenticated);
  CHECK(code_of([&] { store.login("nobody", "x"); }) == ErrorCode::kUnauthenticated);
  auto token = store.login("alice", "s3cret");
  auto who = store.user_for_token(token);
  REQUIRE(who);
  CHECK(who->username == "alice");
  CHECK(!store.user_for_token(token + "x"));
  store.revoke(token);
  CHECK(!store.user_for_token(token));

  store.set_role("alice", gr::Role::kPowerUser);
  CHECK(store.find_user("alice")->role == gr::Role::kPowerUser);
  CHECK(store.remove_user("alice"));
  CHECK(!store.find_user("alice"));
  CHECK(code_of([&] { store.put_user("../evil", gr::Role::kEndUser, "x"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("users and tokens persist across reopen") {
  auto root = scratch_dir("repo");
  std::string token;
  {
    gr::Store store(root, seeded());
    store.put_user("bob", gr::Role::kPowerUser, "pw");
    token = store.login("bob", "pw");
  }
  gr::Store again(root, seeded());
  auto who = again.user_for_token(token);
  REQUIRE(who);
  CHECK(who->role == gr::Role::kPowerUser);
  CHECK(again.templates().size() == 7);
}

TEST_CASE("template versions: explicit conflicts, publish once, clone is a draft") {
  gr::Store store(scratch_dir("repo"), seeded());
  auto wf = bundled_workflow("general");

  CHECK(code_of([&] { store.add_template(wf, "bob", false, 1); }) == ErrorCode::kVersionConflict);
  auto v2 = store.add_template(wf, "bob", false);
  CHECK(v2.version == 2);
  CHECK(!v2.published);
  CHECK(store.get_template("general")->version == 2);
  CHECK(store.get_template("general", 1)->published);

  auto pub = store.publish("general", 2);
  CHECK(pub.published);
  CHECK(code_of([&] { store.publish("general", 2); }) == ErrorCode::kVersionConflict);
  CHECK(code_of([&] { store.publish("general", 9); }) == ErrorCode::kNotFound);

  auto copy = store.clone("general", 1, "my-general", "carol");
  CHECK(copy.version == 1);
  CHECK(!copy.published);
  CHECK(copy.owner == "carol");
  CHECK(copy.workflow.graph == wf.graph);
}

TEST_CASE("invalid workflows are rejected as validation failures") {
  gr::Store store(scratch_dir("repo"), seeded());
  auto wf = bundled_workflow("general");
  SUBCASE("edge into an output port") { wf.graph.edges.push_back({{"pizza", "converted"}, {"lammps", "dump"}}); }
  SUBCASE("empty axis") { wf.sweep.axes.push_back({"T", {}}); }
  SUBCASE("bad name") { wf.name = "Bad Name"; }
  CHECK(code_of([&] { store.add_template(wf, "bob", false); }) == ErrorCode::kValidationFailed);
}

TEST_CASE("run records round-trip through JSON and disk") {
  auto root = scratch_dir("repo");
  gr::RunRecord r;
  r.id = "run-abc";
  r.template_name = "general";
  r.template_version = 3;
  r.sweep.axes = {{"T", {{"300", true}, {"600", true}}}};
  r.sweep.constants = {{"label", {"x", false}}};
  r.submitter = "alice";
  r.backend = "local";
  r.seed = 7;
  r.policy.safety = 1.0;
  r.status = gr::RunStatus::kCancelled;
  r.created_at = "2026-01-01T00:00:00Z";
  r.ended_at = "2026-01-01T00:01:00Z";
  r.idempotency_key = "k1";
  r.points = {1};
  r.sim_sigma = 0.0;
  r.sim_failure_rate = 0.25;
  r.true_runtime = {{"lammps", 130.0}};
  r.jobs = {{"run-abc__lammps__x", "lammps", 1, {{"T", "600"}}, {}}};
  r.artifacts = {{"run-abc__lammps__x", "dump", "/tmp/dump.txt", 2048, gatehub::workflow::DataClass::kTextHuge, true, false}};

  auto back = gr::run_record_from_json(nlohmann::json::parse(gr::to_json(r).dump()));
  CHECK(gr::to_json(back).dump() == gr::to_json(r).dump());

  {
    gr::Store store(root, seeded());
    store.create_run(r);
    CHECK(code_of([&] { store.create_run(r); }) == ErrorCode::kVersionConflict);
  }
  gr::Store again(root, seeded());
  CHECK(gr::to_json(again.get_run("run-abc")).dump() == gr::to_json(r).dump());
  CHECK(again.run_for_key("alice", "k1") == std::optional<std::string>("run-abc"));
  CHECK(!again.run_for_key("bob", "k1"));
  CHECK(code_of([&] { again.get_run("run-missing"); }) == ErrorCode::kUnknownRun);
  CHECK(code_of([&] { again.get_run("../users"); }) == ErrorCode::kUnknownRun);
}

TEST_CASE("event logs append, survive reopen and drop a torn tail") {
  auto root = scratch_dir("repo");
  gr::RunRecord r;
  r.id = "run-ev";
  r.jobs = {{"j", "lammps", 0, {}, {}}};
  std::vector<gatehub::scheduler::Transition> ts;
  for (int i = 0; i < 5; ++i) {
    gatehub::scheduler::Transition t;
    t.ts = i * 1.5;
    t.job = "j";
    t.detail = "step " + std::to_string(i);
    ts.push_back(t);
  }
  {
    gr::Store store(root, seeded());
    store.create_run(r);
    for (const auto& t : ts) store.append_event(r.id, t);
  }
  {
    std::ofstream tail(root / "runs" / "run-ev" / "events.ndjson", std::ios::app);
    tail << "{\"ts\": 9, \"job\": \"j\", \"fr";
  }
  gr::Store again(root, seeded());
  CHECK(again.events(r.id) == ts);
  again.rewrite_events(r.id, {ts.begin(), ts.begin() + 2});
  CHECK(again.events(r.id).size() == 2);
}

TEST_CASE("role names round-trip") {
  for (auto role : gr::kAllRoles) CHECK(gr::role_from_string(gr::to_string(role)) == role);
  CHECK(code_of([] { gr::role_from_string("root"); }) == ErrorCode::kInvalidArgument);
}
