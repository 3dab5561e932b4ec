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

#include "vcache/vcache.h"

#include <cstring>
#include <new>
#include <string>

#include "vcache/catalog.hpp"
#include "vcache/checks.hpp"
#include "vcache/error.hpp"
#include "vcache/experiment.hpp"
#include "vcache/interaction.hpp"
#include "vcache/optimizer.hpp"

struct vc_experiment {
  vcache::ExperimentSpec spec;
};

namespace {

thread_local std::string g_last_error;

vc_status set_error(vc_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

vc_status to_status(vcache::ErrorCode c) { return static_cast<vc_status>(static_cast<int>(c)); }

// Runs fn, translating exceptions into status codes.
template <typename F>
vc_status guarded(F&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const vcache::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(VC_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(VC_INTERNAL, e.what());
  } catch (...) {
    return set_error(VC_INTERNAL, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

vcache::InteractionRates rates(double lambda, double nu, double xi, double omega) {
  return {lambda, nu, xi, omega};
}

}  // namespace

extern "C" {

const char* vc_version(void) { return vcache::version_string(); }

const char* vc_status_name(vc_status status) {
  switch (status) {
    case VC_INVALID_ARGUMENT: return "InvalidArgument";
    case VC_PARTIAL_FAILURE: return "PartialFailure";
    default: break;
  }
  if (status < VC_OK || status > VC_INTERNAL) return "Unknown";
  return vcache::to_string(static_cast<vcache::ErrorCode>(status));
}

const char* vc_last_error(void) { return g_last_error.c_str(); }

void vc_string_free(char* s) { delete[] s; }

vc_status vc_experiment_load(const char* path, vc_experiment** out) {
  if (!path || !out) return set_error(VC_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new vc_experiment{vcache::load_config(path)};
    return VC_OK;
  });
}

vc_status vc_experiment_parse(const char* json_text, vc_experiment** out) {
  if (!json_text || !out) return set_error(VC_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new vc_experiment{vcache::parse_config_text(json_text)};
    return VC_OK;
  });
}

void vc_experiment_free(vc_experiment* exp) { delete exp; }

vc_status vc_experiment_set_seed(vc_experiment* exp, uint64_t seed) {
  if (!exp) return set_error(VC_INVALID_ARGUMENT, "null experiment");
  if (!exp->spec.seeds.empty()) {
    exp->spec.replicates = exp->spec.seeds.size();
    exp->spec.seeds.clear();
  }
  exp->spec.master_seed = seed;
  return VC_OK;
}

vc_status vc_experiment_set_out_dir(vc_experiment* exp, const char* dir) {
  if (!exp || !dir) return set_error(VC_INVALID_ARGUMENT, "null argument");
  if (!*dir) return set_error(VC_INVALID_ARGUMENT, "empty output directory");
  exp->spec.out_dir = dir;
  return VC_OK;
}

vc_status vc_experiment_set_emit_traces(vc_experiment* exp, int enabled) {
  if (!exp) return set_error(VC_INVALID_ARGUMENT, "null experiment");
  exp->spec.emit_traces = enabled != 0;
  return VC_OK;
}

vc_status vc_experiment_point_count(const vc_experiment* exp, size_t* points,
                                    size_t* replicates) {
  if (!exp) return set_error(VC_INVALID_ARGUMENT, "null experiment");
  return guarded([&] {
    if (points) *points = exp->spec.points().size();
    if (replicates) *replicates = exp->spec.episode_seeds().size();
    return VC_OK;
  });
}

vc_status vc_experiment_run(vc_experiment* exp, unsigned threads, size_t* failed_rows) {
  if (!exp) return set_error(VC_INVALID_ARGUMENT, "null experiment");
  return guarded([&] {
    const vcache::ExperimentResult res = vcache::execute(exp->spec, threads);
    const std::size_t failed = vcache::write_outputs(exp->spec, res);
    if (failed_rows) *failed_rows = failed;
    if (failed > 0) {
      return set_error(VC_PARTIAL_FAILURE, std::to_string(failed) + " of " +
                                               std::to_string(res.rows.size()) +
                                               " episodes failed");
    }
    return VC_OK;
  });
}

vc_status vc_experiment_sweep_list(const vc_experiment* exp, char** listing) {
  if (!exp || !listing) return set_error(VC_INVALID_ARGUMENT, "null argument");
  *listing = nullptr;
  return guarded([&] {
    *listing = dup_string(vcache::sweep_listing(exp->spec));
    return VC_OK;
  });
}

vc_status vc_verify(const vc_experiment* exp, const char* expectations_path, unsigned threads,
                    vc_check_callback callback, void* user, size_t* failed_checks) {
  if (!exp || !expectations_path) return set_error(VC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::vector<vcache::CheckRequest> checks = vcache::load_expectations(expectations_path);
    vcache::CheckRunner runner(exp->spec, threads);
    std::size_t failed = 0;
    for (const vcache::CheckRequest& req : checks) {
      const vcache::CheckOutcome o = runner.run(req);
      if (!o.pass && !o.informational) ++failed;
      if (callback) {
        const vc_check_result r{o.label.c_str(), o.measured.c_str(), o.criterion,
                                o.pass ? 1 : 0,  o.informational ? 1 : 0,
                                o.tolerance,     o.seconds};
        callback(&r, user);
      }
    }
    if (failed_checks) *failed_checks = failed;
    if (failed > 0) {
      return set_error(VC_PARTIAL_FAILURE, std::to_string(failed) + " check(s) failed");
    }
    return VC_OK;
  });
}

vc_status vc_service_split(double lambda, double nu, double xi, double omega, double* kappa0,
                           double* kappa1) {
  return guarded([&] {
    const vcache::ServiceSplit s = vcache::service_split(rates(lambda, nu, xi, omega));
    if (kappa0) *kappa0 = s.kappa0;
    if (kappa1) *kappa1 = s.kappa1;
    return VC_OK;
  });
}

vc_status vc_expected_queue_lengths(double lambda, double nu, double xi, double omega,
                                    double* e_l0, double* e_l1) {
  return guarded([&] {
    const vcache::QueueLengths l = vcache::expected_queue_lengths(rates(lambda, nu, xi, omega));
    if (e_l0) *e_l0 = l.e_l0;
    if (e_l1) *e_l1 = l.e_l1;
    return VC_OK;
  });
}

vc_status vc_zipf(size_t n_fragments, double exponent, double* popularity) {
  if (!popularity && n_fragments > 0) return set_error(VC_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    const std::vector<double> p = vcache::zipf_popularity(n_fragments, exponent);
    std::copy(p.begin(), p.end(), popularity);
    return VC_OK;
  });
}

vc_status vc_solve_slot(size_t n_fragments, const double* coeffs, double fragment_bits,
                        double capacity_bits, double* q) {
  if (n_fragments > 0 && (!coeffs || !q)) return set_error(VC_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    vcache::SlotProblem p;
    p.linear_coeffs.assign(coeffs, coeffs + n_fragments);
    p.fragment_size_bits = fragment_bits;
    p.capacity_bits = capacity_bits;
    const vcache::CacheVector cv = vcache::solve_slot(p);
    std::copy(cv.q.begin(), cv.q.end(), q);
    return VC_OK;
  });
}

}  // extern "C"
