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

#include <cmath>
#include <random>

#include "doctest.h"
#include "gatehub/common/duration.h"
#include "gatehub/common/error.h"
#include "gatehub/resource/resource.h"
#include "test_support.h"

using namespace gatehub;
using namespace gatehub::resource;

namespace {

std::vector<Site> ntu_cluster() { return load_site_config(testing::source_dir() / "sites" / "ntu-hpcc.json"); }

std::vector<std::string> names(const std::vector<QueueRef>& refs) {
  std::vector<std::string> out;
  for (const auto& r : refs) out.push_back(r.queue->name);
  return out;
}

ResourceProfile lammps_profile() {
  ResourceProfile p;
  p.name = "lammps";
  p.base_runtime = 180.0;
  p.base_memory = 2048.0;
  p.reference_scale = 2520.0;
  p.cores = 4;
  return p;
}

}  // namespace

TEST_CASE("durations") {
  CHECK(parse_duration_minutes("90m") == 90.0);
  CHECK(parse_duration_minutes("8d") == 11520.0);
  CHECK(parse_duration_minutes("2h") == 120.0);
  CHECK(parse_duration_minutes("30s") == 0.5);
  CHECK(std::isinf(parse_duration_minutes("unlimited")));
  CHECK_THROWS_AS(parse_duration_minutes("90"), Error);
  CHECK_THROWS_AS(parse_duration_minutes("1.5h"), Error);
  CHECK(format_duration_minutes(11520.0) == "8d");
  CHECK(format_duration_minutes(90.0) == "90m");
}

TEST_CASE("calibrate") {
  // Closed-form oracle for (1680,120),(2520,180):
  // sum(s*t) = 201600 + 453600 = 655200, sum(s^2) = 2822400 + 6350400 = 9172800,
  // 655200 / 9172800 = 1/14.
  std::vector<Observation> table{{1680, 120}, {2520, 180}};
  CHECK(calibrate(table).minutes_per_unit == doctest::Approx(1.0 / 14.0).epsilon(1e-12));
  std::vector<Observation> single{{100, 10}};
  CHECK(calibrate(single).minutes_per_unit == doctest::Approx(0.1));
  std::vector<Observation> linear{{100, 10}, {200, 20}, {400, 40}};
  CHECK(calibrate(linear).minutes_per_unit == doctest::Approx(0.1));
  try {
    calibrate(std::vector<Observation>{});
    FAIL("expected NoObservations");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoObservations);
  }
  // The 840 atom / 90 min row is not on the fitted line; the residual is
  // documented, 840 atoms predicts 60 min which still fits ku-small.
  CHECK(calibrate(table).minutes_per_unit * 840 == doctest::Approx(60.0));
}

TEST_CASE("estimate_requirements") {
  auto p = lammps_profile();
  CHECK(estimate_requirements(p, 2520).runtime == doctest::Approx(180.0));
  CHECK(estimate_requirements(p, 5040).runtime == doctest::Approx(360.0));
  CHECK(estimate_requirements(p, 1680).runtime == doctest::Approx(120.0));
  CHECK(estimate_requirements(p, 840).runtime == doctest::Approx(60.0));
  CHECK(estimate_requirements(p, 2520).cores == 4);
  try {
    estimate_requirements(p, 0);
    FAIL("expected NonPositiveScale");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonPositiveScale);
  }
}

TEST_CASE("feasible_queues on the ntu-hpcc queues") {
  const auto sites = ntu_cluster();
  CHECK(names(feasible_queues({150, 0, 1}, sites, 1.0)) == std::vector<std::string>{"ku-normal", "ku-single"});
  CHECK(names(feasible_queues({60, 0, 1}, sites, 1.0)) ==
        std::vector<std::string>{"ku-small", "kh-large", "ku-normal", "ku-single"});
  CHECK(feasible_queues({150, 0, 64}, sites, 1.0).empty());
  CHECK_THROWS_AS(feasible_queues({150, 0, 1}, sites, 0.9), Error);
}

TEST_CASE("load_site_config") {
  const auto sites = ntu_cluster();
  REQUIRE(sites.size() == 1);
  REQUIRE(sites[0].queues.size() == 4);
  CHECK(sites[0].find_queue("ku-small")->walltime == 90.0);
  CHECK(sites[0].find_queue("ku-small")->cores_per_user == 32);
  CHECK(sites[0].find_queue("ku-single")->walltime == 8 * 1440.0);
  CHECK(sites[0].find_queue("ku-single")->cores_per_user == 4);
  CHECK(sites[0].find_queue("ku-normal")->walltime == 180.0);
  CHECK(sites[0].find_queue("ku-normal")->cores_per_user == 32);
  CHECK(sites[0].find_queue("kh-large")->walltime == 120.0);
  CHECK(sites[0].find_queue("kh-large")->cores_per_user == 128);

  auto local = load_site_config(testing::source_dir() / "sites" / "local.json");
  CHECK(std::isinf(local.at(0).queues.at(0).walltime));

  auto expect_code = [](const std::string& text, ErrorCode code, const std::string& needle) {
    try {
      parse_site_config(text);
      FAIL("expected failure");
    } catch (const Error& e) {
      CHECK(e.code() == code);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_code(R"({"sites":[{"name":"s","total_cores":4,"queues":[{"name":"q","walltime":"0m","cores_per_user":1}]}]})",
              ErrorCode::kInvariantViolation, "walltime");
  expect_code(R"({"sites":[{"name":"s","total_cores":4,"queues":[
      {"name":"q","walltime":"1m","cores_per_user":1},{"name":"q","walltime":"2m","cores_per_user":1}]}]})",
              ErrorCode::kInvariantViolation, "duplicate queue");
  expect_code(R"({"sites":[{"name":"s","total_cores":4,"queues":[{"name":"q","walltime":"ten","cores_per_user":1}]}]})",
              ErrorCode::kParseError, "$.sites[0].queues[0].walltime");
  expect_code("{\"sites\": [\n  {\"name\": }\n]}", ErrorCode::kParseError, "line 2");
}

TEST_CASE("property: feasible_queues equals the brute-force filter") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Site> sites(1 + rng() % 3);
    int total = 0;
    for (std::size_t s = 0; s < sites.size(); ++s) {
      sites[s].name = "site" + std::to_string(s);
      sites[s].total_cores = 64;
      const int nq = static_cast<int>(rng() % 20);
      for (int q = 0; q < nq && total < 50; ++q, ++total) {
        sites[s].queues.push_back({"q" + std::to_string(rng() % 1000) + "_" + std::to_string(q),
                                   static_cast<double>(1 + rng() % 600), 1 + static_cast<int>(rng() % 64),
                                   sites[s].name});
      }
    }
    Estimate est{static_cast<double>(1 + rng() % 600), 1.0, 1 + static_cast<int>(rng() % 64)};
    const double safety = 1.0 + static_cast<double>(rng() % 100) / 100.0;
    const auto got = feasible_queues(est, sites, safety);

    std::vector<std::string> expected;
    for (const auto& site : sites) {
      for (const auto& q : site.queues) {
        if (est.runtime * safety <= q.walltime && est.cores <= q.cores_per_user) {
          expected.push_back(site.name + "/" + q.name);
        }
      }
    }
    std::vector<std::string> got_keys;
    for (const auto& r : got) got_keys.push_back(r.key());
    auto sorted_got = got_keys;
    std::sort(sorted_got.begin(), sorted_got.end());
    std::sort(expected.begin(), expected.end());
    CHECK(sorted_got == expected);
    for (std::size_t i = 1; i < got.size(); ++i) {
      CHECK(got[i - 1].queue->walltime <= got[i].queue->walltime);
    }
    // Monotonicity in the safety factor.
    CHECK(feasible_queues(est, sites, safety + 0.5).size() <= got.size());
  }
}

TEST_CASE("property: estimates are homogeneous of degree one") {
  std::mt19937_64 rng(5);
  auto p = lammps_profile();
  for (int i = 0; i < 200; ++i) {
    const double s = 1.0 + static_cast<double>(rng() % 100000);
    const auto one = estimate_requirements(p, s);
    const auto two = estimate_requirements(p, 2 * s);
    CHECK(two.runtime == doctest::Approx(2 * one.runtime).epsilon(1e-12));
    CHECK(two.memory == doctest::Approx(2 * one.memory).epsilon(1e-12));
  }
}

TEST_CASE("property: calibrate recovers the generating coefficient") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(1e-4, 10.0);
  std::uniform_real_distribution<double> scale(1.0, 1e5);
  for (int i = 0; i < 200; ++i) {
    const double c = coef(rng);
    std::vector<Observation> obs;
    for (int k = 0; k < 1 + i % 7; ++k) {
      const double s = scale(rng);
      obs.push_back({s, c * s});
    }
    CHECK(std::abs(calibrate(obs).minutes_per_unit - c) / c < 1e-12);
  }
}
