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

#ifndef VCACHE_PHY_HPP
#define VCACHE_PHY_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vcache/catalog.hpp"
#include "vcache/interaction.hpp"

namespace vcache {

double dbm_to_watts(double dbm);

struct RadioParams {
  double p_mbs_tx_w = 39.810717055349734;  // 46 dBm
  double p_veh_tx_w = 0.19952623149688797;  // 23 dBm
  double noise_power_w = 1e-14;            // -110 dBm
  double bandwidth_hz = 10e6;
  double pathloss_exponent = 3.0;
  double reference_gain = 1.27e-8;  // linear gain at 1 m
  double d2d_range_m = 15.0;
  double cell_radius_m = 350.0;
  double min_distance_m = 1.0;
  /// Whether the MBS downlink power counts as interference on the
  /// vehicle-to-user link. Off by default (ideal interference management).
  bool d2d_mbs_interference = false;

  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

/// Boundary-inclusive unit disk.
bool in_range(Point a, Point b, double radius);

/// reference_gain * max(d, min_distance)^-pathloss_exponent.
double channel_gain(double distance_m, const RadioParams& params);

/// Per-slot radio state between the MBS, the vehicles and the users.
/// Pairwise arrays are vehicle-major: index = v * n_users + k.
struct LinkState {
  std::size_t n_users = 0;
  std::size_t n_vehicles = 0;
  std::vector<double> gain_mbs_to_user;
  std::vector<double> gain_veh_to_user;
  std::vector<double> veh_user_distance_m;
  std::vector<std::uint8_t> reuse;

  LinkState() = default;
  LinkState(std::size_t users, std::size_t vehicles);

  std::size_t pair(std::size_t v, std::size_t k) const { return v * n_users + k; }

  /// Gains nonnegative, array sizes consistent, each vehicle reuses at most
  /// one downlink channel.
  void validate() const;
};

/// Signal over noise plus co-channel vehicle interference at user k.
double sinr_mbs_user(std::size_t k, const LinkState& state,
                     const RadioParams& params);

/// Link from vehicle v to user k. Throws OutOfRange when v lies outside the
/// D2D disk of k.
double sinr_vehicle_user(std::size_t k, std::size_t v, const LinkState& state,
                         const RadioParams& params);

/// Same denominator as sinr_vehicle_user for a serving transmitter that is
/// not part of `state` (received signal power given directly).
double sinr_d2d_signal(double signal_w, std::size_t k, const LinkState& state,
                       const RadioParams& params);

/// W * log2(1 + sinr).
double shannon_rate(double bandwidth_hz, double sinr);

struct SinrPair {
  double mbs = 0.0;
  double veh = 0.0;
};

struct SlotThroughput {
  double r_mbs = 0.0;
  double r_veh = 0.0;
  double r_total = 0.0;
};

/// Binomially weighted slot throughput in bits:
///   R_m = W*T * sum_k k*P_m(k) * sum_j (1-q_j) p_j log2(1+g^m_k)
///   R_v = W*T * sum_k k*P_v(k) * sum_j q_j p_j log2(1+g^v_k)
/// with P_m, P_v the binomial served-count pmfs of kappa0 / kappa1 and
/// sinrs[k-1] the pair of user k.
SlotThroughput slot_throughput(const CacheVector& cache, const Catalog& catalog,
                               const ServiceSplit& split, std::size_t n_users,
                               std::span<const SinrPair> sinrs,
                               double bandwidth_hz, double slot_seconds);

/// Slot throughput written as an affine function of the cached popularity
/// mass Q = sum_j p_j q_j:  R_m(Q) = m0 + m1*Q,  R_v(Q) = v1*Q.
struct LinearThroughput {
  double m0 = 0.0;
  double m1 = 0.0;
  double v1 = 0.0;

  double mbs(double cached_mass) const { return m0 + m1 * cached_mass; }
  double veh(double cached_mass) const { return v1 * cached_mass; }
  double total(double cached_mass) const { return mbs(cached_mass) + veh(cached_mass); }
};

/// The slot_throughput formula in affine form.
LinearThroughput binomial_throughput_model(const ServiceSplit& split,
                                           std::span<const SinrPair> sinrs,
                                           double bandwidth_hz,
                                           double slot_seconds);

/// Every request is routed somewhere: a user is in vehicle mode with
/// probability kappa1 and then fetches cached fragments over D2D and the rest
/// from the MBS; users in MBS mode fetch everything from the MBS.
///   R_v = W*T * sum_k kappa1 * Q * log2(1+g^v_k)
///   R_m = W*T * sum_k (1 - kappa1*Q) * log2(1+g^m_k)
LinearThroughput routed_throughput_model(double kappa1,
                                         std::span<const SinrPair> sinrs,
                                         double bandwidth_hz,
                                         double slot_seconds);

}  // namespace vcache

#endif  // VCACHE_PHY_HPP
