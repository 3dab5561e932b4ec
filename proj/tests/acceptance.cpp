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

// Acceptance suite: runs configs/acceptance_expectations.json against
// configs/acceptance.json through the C API and prints one line per
// criterion. Check-level detail goes to stderr.

#include <cstdio>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "vcache/vcache.h"

#ifndef VCACHE_CONFIG_DIR
#define VCACHE_CONFIG_DIR "configs"
#endif

namespace {

struct Criterion {
  const char* title;
  bool pass = true;
  int checks = 0;
  double seconds = 0.0;
  std::string detail;
};

std::map<int, Criterion> g_criteria = {
    {1, {"closed-form queue lengths vs truncated chain"}},
    {2, {"Monte-Carlo vehicle share vs kappa1"}},
    {3, {"slot solver vs grid and LP oracles"}},
    {4, {"Dinkelbach contract and argmin equivalence"}},
    {5, {"virtual queue stability and delay budget"}},
    {6, {"eta nonincreasing in V"}},
    {7, {"figure shapes (rate, capacity, proportion sweeps)"}},
    {8, {"determinism across runs and thread counts"}},
};

void collect(const vc_check_result* r, void*) {
  std::fprintf(stderr, "  %s %-34s %6.1fs%s  %s\n", r->pass ? "pass" : "FAIL", r->label,
               r->seconds, r->informational ? " (info)" : "", r->measured);
  auto it = g_criteria.find(r->criterion);
  if (it == g_criteria.end() || r->informational) return;
  Criterion& c = it->second;
  c.pass = c.pass && r->pass;
  ++c.checks;
  c.seconds += r->seconds;
  if (!r->pass) c.detail += std::string(c.detail.empty() ? "" : "; ") + r->label + " failed";
}

}  // namespace

int main() {
  const std::string dir = VCACHE_CONFIG_DIR;
  vc_experiment* exp = nullptr;
  if (vc_experiment_load((dir + "/acceptance.json").c_str(), &exp) != VC_OK) {
    std::fprintf(stderr, "cannot load acceptance config: %s\n", vc_last_error());
    return 2;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  std::size_t failed = 0;
  const vc_status s = vc_verify(exp, (dir + "/acceptance_expectations.json").c_str(),
                                hw > 0 ? hw : 1, collect, nullptr, &failed);
  vc_experiment_free(exp);
  if (s != VC_OK && s != VC_PARTIAL_FAILURE) {
    std::fprintf(stderr, "verification aborted: %s: %s\n", vc_status_name(s), vc_last_error());
    return 2;
  }
  int n_fail = 0;
  for (auto& [id, c] : g_criteria) {
    const bool ok = c.pass && c.checks > 0;
    if (c.checks == 0) c.detail = "no checks ran";
    n_fail += ok ? 0 : 1;
    std::printf("%s criterion %d: %s (%d check%s, %.1fs)%s%s\n", ok ? "PASS" : "FAIL", id, c.title,
                c.checks, c.checks == 1 ? "" : "s", c.seconds, c.detail.empty() ? "" : ": ",
                c.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(g_criteria.size()) - n_fail,
              g_criteria.size());
  return n_fail == 0 ? 0 : 1;
}
