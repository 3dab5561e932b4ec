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

#ifndef VCACHE_CHECKS_HPP
#define VCACHE_CHECKS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vcache/experiment.hpp"

namespace vcache {

/// One entry of an expectations file.
struct CheckRequest {
  std::string name;   ///< check kind, one of check_names()
  std::string label;  ///< display name; defaults to name
  int criterion = 0;  ///< acceptance criterion it belongs to, 0 for none
  bool informational = false;  ///< reported but never counted as a failure
  double tolerance = 0.0;
  Json params = Json::object();
};

struct CheckOutcome {
  std::string label;
  int criterion = 0;
  bool informational = false;
  bool pass = false;
  double tolerance = 0.0;
  std::string measured;
  double seconds = 0.0;
};

std::vector<std::string> check_names();

/// Reads {"checks": [{"check", "label", "criterion", "informational",
/// "tolerance", "params"}...]}. Unknown keys raise ParseError.
std::vector<CheckRequest> parse_expectations(const Json& j);
std::vector<CheckRequest> load_expectations(const std::string& path);

/// Runs checks against the base scenario of an experiment. Sweeps shared
/// between checks are computed once.
class CheckRunner {
 public:
  CheckRunner(ExperimentSpec base, unsigned threads);
  CheckOutcome run(const CheckRequest& request);

 private:
  const ExperimentResult& sweep(const Json& scenario_overrides,
                                const std::vector<SweepAxis>& axes, std::size_t replicates);
  ExperimentSpec base_;
  unsigned threads_;
  std::map<std::string, ExperimentResult> memo_;
};

std::string format_outcome(const CheckOutcome& o);

}  // namespace vcache

#endif  // VCACHE_CHECKS_HPP
