// Copyright 2026 The vcache Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vcache/checks.hpp"
#include "vcache/error.hpp"

using namespace vcache;

namespace {

CheckRequest request(const std::string& name, double tol, Json params = Json::object()) {
  CheckRequest r;
  r.name = name;
  r.label = name;
  r.tolerance = tol;
  r.params = std::move(params);
  return r;
}

ExperimentSpec short_base() {
  return parse_config_text(R"({"scenario": {"n_slots": 150, "offline_update_interval_slots": 50},
                               "seed": 5})");
}

}  // namespace

TEST_CASE("kappa oracle passes at 1e-6 and fails at a corrupted tolerance") {
  CheckRunner runner(short_base(), 1);
  const CheckOutcome ok = runner.run(request("kappa_oracle", 1e-6, {{"rates", {1, 2, 1, 1}}}));
  CHECK(ok.pass);
  const CheckOutcome strict =
      runner.run(request("closed_form_ctmc", 1e-18, {{"tuples", 20}}));
  CHECK_FALSE(strict.pass);
  CHECK(runner.run(request("closed_form_ctmc", 1e-6, {{"tuples", 20}})).pass);
}

TEST_CASE("eta is nonincreasing over V in {5, 50, 500}") {
  CheckRunner runner(short_base(), 2);
  const CheckOutcome o = runner.run(
      request("eta_monotone_v", 0.0, {{"v_values", {5, 50, 500}}, {"replicates", 2}}));
  CHECK(o.pass);
  CHECK(o.measured.find("eta [") != std::string::npos);
}

TEST_CASE("solver oracles pass") {
  CheckRunner runner(short_base(), 1);
  CHECK(runner.run(request("slot_grid", 1e-9, {{"instances", 50}})).pass);
  CHECK(runner.run(request("slot_lp", 1e-9, {{"instances", 50}})).pass);
  CHECK(runner.run(request("dinkelbach", 1e-9, {{"instances", 20}})).pass);
  CHECK(runner.run(request("argmin_equivalence", 1e-12, {{"spaces", 20}})).pass);
}

TEST_CASE("determinism check holds on a short scenario") {
  CheckRunner runner(short_base(), 2);
  CHECK(runner.run(request("determinism", 0.0, {{"slots", 60}, {"replicates", 1}})).pass);
}

TEST_CASE("check failures are reported, not thrown") {
  CheckRunner runner(short_base(), 1);
  const CheckOutcome o =
      runner.run(request("stability", 0.01, {{"overrides", {{"rates.lambda", 9.0}}}}));
  CHECK_FALSE(o.pass);
  CHECK(o.measured.find("error") != std::string::npos);
}

TEST_CASE("expectations parsing") {
  const std::vector<CheckRequest> r = parse_expectations(Json::parse(
      R"({"checks": [{"check": "slot_lp", "tolerance": 1e-9, "criterion": 3}]})"));
  REQUIRE(r.size() == 1);
  CHECK(r[0].label == "slot_lp");
  CHECK(r[0].criterion == 3);
  auto code = [](const char* text) {
    try {
      parse_expectations(Json::parse(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kOk;
  };
  CHECK(code(R"({"checks": [{"check": "nope", "tolerance": 1}]})") == ErrorCode::kParseError);
  CHECK(code(R"({"checks": [{"check": "slot_lp", "tol": 1}]})") == ErrorCode::kParseError);
  CHECK(code(R"({"checks": [{"check": "slot_lp", "tolerance": -1}]})") ==
        ErrorCode::kValidationError);
  CHECK(code(R"({"tests": []})") == ErrorCode::kParseError);
}
