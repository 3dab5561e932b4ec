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

#ifndef VCACHE_INTERACTION_HPP
#define VCACHE_INTERACTION_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace vcache {

/// Rates of the two-dimensional (K, J) contact process between a user and
/// the caching vehicles. K = 1 while a vehicle serves the user's queue,
/// K = 0 while requests wait for a contact (and may expire to the MBS).
struct InteractionRates {
  double lambda = 1.0;  ///< request arrivals per second (Poisson)
  double nu = 3.0;      ///< vehicle service completions per second
  double xi = 1.0;      ///< contacts per second with a caching vehicle
  double omega = 0.5;   ///< tolerance expiry rate, 1/s

  /// Throws DomainError unless lambda, nu, omega are positive and finite
  /// and xi is finite and nonnegative.
  void validate() const;

  /// nu*omega + nu*xi - lambda*omega > 0 and lambda < nu.
  bool stable() const noexcept;
};

struct QueueLengths {
  double e_l0 = 0.0;
  double e_l1 = 0.0;
};

struct ServiceSplit {
  double e_l0 = 0.0;
  double e_l1 = 0.0;
  double kappa0 = 1.0;
  double kappa1 = 0.0;
};

/// Stationary distribution of the chain truncated at J = j_max.
/// p0[j] = P{K=0, J=j} for j in [0, j_max]; p1[j] = P{K=1, J=j} with p1[0]
/// identically zero.
struct TruncatedChain {
  std::size_t j_max = 0;
  std::vector<double> p0;
  std::vector<double> p1;

  double mean_queue_k0() const;   ///< sum_j j * P0j
  double mass_k1() const;         ///< sum_j P1j
  double mean_queue_k1() const;   ///< sum_j j * P1j
  double tail_mass() const;       ///< P{J = j_max}
  double total_mass() const;

  /// Largest absolute residual of the balance equations over the states
  /// with j < j_max (the truncation boundary is excluded).
  double max_interior_residual(const InteractionRates& rates) const;
};

/// Closed forms E[L0] = (lambda*nu - lambda^2) / d and
/// E[L1] = xi*lambda / d with d = nu*omega + nu*xi - lambda*omega.
QueueLengths expected_queue_lengths(const InteractionRates& rates);

ServiceSplit service_split(const InteractionRates& rates);

/// Binomial probability that n of n_users are served through the mode with
/// per-user probability kappa.
double served_count_pmf(std::size_t n_users, double kappa, std::size_t n);

/// Direct sparse solve of the truncated generator. Throws
/// TruncationInsufficient when the mass at j_max is 1e-8 or more.
TruncatedChain solve_truncated_chain(const InteractionRates& rates,
                                     std::size_t j_max);

/// Doubles j_max from `j_start` until the tail mass drops below 1e-8.
TruncatedChain solve_chain_auto(const InteractionRates& rates,
                                std::size_t j_start = 16,
                                std::size_t j_limit = 1u << 14);

/// xi_base * cache_proportion * sum_j p_j q_j.
double effective_meeting_rate(double xi_base, std::span<const double> q,
                              std::span<const double> popularity,
                              double cache_proportion);

/// Fraction of requests completed by a vehicle rather than expiring,
/// 1 - omega * E[L0] / lambda.
double vehicle_request_fraction(const InteractionRates& rates);

/// Expected response time (E[L0] + E[L1]) / lambda.
double expected_delay(const InteractionRates& rates);

/// d/dxi of expected_delay at the given rates.
double expected_delay_slope_xi(const InteractionRates& rates);

}  // namespace vcache

#endif  // VCACHE_INTERACTION_HPP
