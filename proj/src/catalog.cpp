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

#include "vcache/catalog.hpp"

#include <cmath>
#include <sstream>

#include "vcache/error.hpp"

namespace vcache {

std::vector<double> zipf_popularity(std::size_t n_fragments, double phi) {
  if (n_fragments == 0) fail(ErrorCode::kDomainError, "catalog is empty");
  if (!(phi >= 0.0) || !std::isfinite(phi)) {
    fail(ErrorCode::kDomainError, "zipf exponent must be >= 0");
  }
  std::vector<double> p(n_fragments);
  double h = 0.0;
  for (std::size_t j = 0; j < n_fragments; ++j) {
    p[j] = std::pow(static_cast<double>(j + 1), -phi);
    h += p[j];
  }
  for (double& v : p) v /= h;
  return p;
}

Catalog Catalog::make(std::size_t n_fragments, double fragment_size_bits,
                      double zipf_exponent) {
  if (!(fragment_size_bits > 0.0) || !std::isfinite(fragment_size_bits)) {
    fail(ErrorCode::kDomainError, "fragment size must be positive");
  }
  Catalog c;
  c.n_fragments = n_fragments;
  c.fragment_size_bits = fragment_size_bits;
  c.zipf_exponent = zipf_exponent;
  c.popularity = zipf_popularity(n_fragments, zipf_exponent);
  return c;
}

CacheValidation validate_cache_vector(const CacheVector& cache,
                                      const Catalog& catalog) {
  CacheValidation r;
  if (cache.q.size() != catalog.n_fragments) {
    r.ok = false;
    r.violation = CacheViolation::kLengthMismatch;
    r.message = "cache vector length differs from catalog size";
    return r;
  }
  double mass = 0.0;
  for (std::size_t j = 0; j < cache.q.size(); ++j) {
    const double qj = cache.q[j];
    if (!(qj >= 0.0 && qj <= 1.0)) {
      r.ok = false;
      r.violation = CacheViolation::kRange;
      r.index = j;
      std::ostringstream os;
      os << "C3 violated: q[" << j << "] = " << qj << " outside [0,1]";
      r.message = os.str();
      return r;
    }
    mass += qj;
  }
  r.used_bits = mass * catalog.fragment_size_bits;
  // Relative slack absorbs the rounding of the sum.
  if (r.used_bits > cache.capacity_bits * (1.0 + 1e-12)) {
    r.ok = false;
    r.violation = CacheViolation::kCapacity;
    std::ostringstream os;
    os << "C2 violated: " << r.used_bits << " bits cached > capacity "
       << cache.capacity_bits;
    r.message = os.str();
  }
  return r;
}

}  // namespace vcache
