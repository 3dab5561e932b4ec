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

#ifndef VCACHE_CATALOG_HPP
#define VCACHE_CATALOG_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace vcache {

/// p_j = j^-phi / H with H = sum_{k=1..n} k^-phi (1-based rank j).
std::vector<double> zipf_popularity(std::size_t n_fragments, double phi);

struct Catalog {
  std::size_t n_fragments = 0;
  double fragment_size_bits = 0.0;
  double zipf_exponent = 0.0;
  std::vector<double> popularity;

  static Catalog make(std::size_t n_fragments, double fragment_size_bits,
                      double zipf_exponent);
};

struct CacheVector {
  std::vector<double> q;
  double capacity_bits = 0.0;
};

enum class CacheViolation { kNone, kLengthMismatch, kRange, kCapacity };

struct CacheValidation {
  bool ok = true;
  CacheViolation violation = CacheViolation::kNone;
  std::optional<std::size_t> index;  // set for range violations
  double used_bits = 0.0;
  std::string message;
};

/// Checks 0 <= q_j <= 1 (reported first, with the offending index) and
/// sum_j q_j * B <= S_cv.
CacheValidation validate_cache_vector(const CacheVector& cache,
                                      const Catalog& catalog);

}  // namespace vcache

#endif  // VCACHE_CATALOG_HPP
