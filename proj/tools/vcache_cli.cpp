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

// Command-line front end. Talks to the library only through vcache.h.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "vcache/vcache.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailures = 1;  // some episodes or checks failed
constexpr int kExitConfig = 2;    // configuration could not be loaded
constexpr int kExitError = 3;

struct Options {
  std::string config;
  std::string expectations;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  unsigned threads = 0;
  bool emit_traces = false;
};

int report(vc_status s, const char* what) {
  std::fprintf(stderr, "error: %s: %s: %s\n", what, vc_status_name(s), vc_last_error());
  return (s == VC_PARSE_ERROR || s == VC_VALIDATION_ERROR || s == VC_IO_ERROR) ? kExitConfig
                                                                               : kExitError;
}

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

struct Experiment {
  vc_experiment* handle = nullptr;
  ~Experiment() { vc_experiment_free(handle); }
};

int load(const Options& o, Experiment& exp) {
  vc_status s = vc_experiment_load(o.config.c_str(), &exp.handle);
  if (s != VC_OK) return report(s, "loading configuration");
  if (o.seed) vc_experiment_set_seed(exp.handle, *o.seed);
  if (o.out_dir) {
    s = vc_experiment_set_out_dir(exp.handle, o.out_dir->c_str());
    if (s != VC_OK) return report(s, "--out-dir");
  }
  if (o.emit_traces) vc_experiment_set_emit_traces(exp.handle, 1);
  return kExitOk;
}

int cmd_run(const Options& o) {
  Experiment exp;
  if (int rc = load(o, exp)) return rc;
  std::size_t points = 0;
  std::size_t reps = 0;
  vc_experiment_point_count(exp.handle, &points, &reps);
  const unsigned threads = thread_count(o.threads);
  std::fprintf(stderr, "running %zu point(s) x %zu replicate(s) on %u thread(s)\n", points, reps,
               threads);
  std::size_t failed = 0;
  const vc_status s = vc_experiment_run(exp.handle, threads, &failed);
  if (s == VC_PARTIAL_FAILURE) {
    std::fprintf(stderr, "warning: %s (see the error column of metrics.csv)\n", vc_last_error());
    return kExitFailures;
  }
  if (s != VC_OK) return report(s, "running experiment");
  return kExitOk;
}

void print_check(const vc_check_result* r, void*) {
  std::printf("%s %-28s tol=%-8g %6.1fs%s  %s\n", r->pass ? "PASS" : "FAIL", r->label,
              r->tolerance, r->seconds, r->informational ? " (info)" : "", r->measured);
  std::fflush(stdout);
}

int cmd_verify(const Options& o) {
  Experiment exp;
  if (int rc = load(o, exp)) return rc;
  std::size_t failed = 0;
  const vc_status s = vc_verify(exp.handle, o.expectations.c_str(), thread_count(o.threads),
                                print_check, nullptr, &failed);
  if (s == VC_PARTIAL_FAILURE) {
    std::printf("%zu check(s) failed\n", failed);
    return kExitFailures;
  }
  if (s != VC_OK) return report(s, "verifying");
  std::printf("all checks passed\n");
  return kExitOk;
}

int cmd_sweep_list(const Options& o) {
  Experiment exp;
  if (int rc = load(o, exp)) return rc;
  char* listing = nullptr;
  const vc_status s = vc_experiment_sweep_list(exp.handle, &listing);
  if (s != VC_OK) return report(s, "listing sweep");
  std::fputs(listing, stdout);
  vc_string_free(listing);
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("config", o.config, "Experiment configuration (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Master seed; replaces the configured seeds");
  cmd->add_option("--out-dir", o.out_dir, "Output directory");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
  cmd->add_flag("--emit-traces", o.emit_traces, "Write per-slot traces");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicular edge caching simulator"};
  app.set_version_flag("--version", std::string(vc_version()));
  app.require_subcommand(1);
  Options o;

  CLI::App* run = app.add_subcommand("run", "Run every sweep point and write CSV outputs");
  add_common(run, o);
  CLI::App* verify = app.add_subcommand("verify", "Run the checks of an expectations file");
  add_common(verify, o);
  verify->add_option("expectations", o.expectations, "Expectations file (JSON)")->required();
  CLI::App* list = app.add_subcommand("sweep-list", "Print the resolved sweep grid");
  add_common(list, o);

  CLI11_PARSE(app, argc, argv);
  if (*run) return cmd_run(o);
  if (*verify) return cmd_verify(o);
  return cmd_sweep_list(o);
}
