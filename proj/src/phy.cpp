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

#include "vcache/phy.hpp"

#include <cmath>
#include <sstream>

#include "vcache/error.hpp"

namespace vcache {

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }

void RadioParams::validate() const {
  auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!pos(p_mbs_tx_w) || !pos(p_veh_tx_w) || !pos(noise_power_w) ||
      !pos(bandwidth_hz) || !pos(reference_gain) || !pos(d2d_range_m) ||
      !pos(cell_radius_m) || !pos(min_distance_m)) {
    fail(ErrorCode::kValidationError,
         "radio powers, bandwidth, gains and radii must be positive");
  }
  if (!(pathloss_exponent >= 2.0) || !std::isfinite(pathloss_exponent)) {
    fail(ErrorCode::kValidationError, "pathloss exponent must be >= 2");
  }
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool in_range(Point a, Point b, double radius) {
  // Squared comparison keeps the 3-4-5 boundary exact.
  const double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy <= radius * radius;
}

double channel_gain(double distance_m, const RadioParams& params) {
  if (!(distance_m > 0.0)) {
    fail(ErrorCode::kDomainError, "distance must be positive");
  }
  const double d = std::max(distance_m, params.min_distance_m);
  return params.reference_gain * std::pow(d, -params.pathloss_exponent);
}

LinkState::LinkState(std::size_t users, std::size_t vehicles)
    : n_users(users),
      n_vehicles(vehicles),
      gain_mbs_to_user(users, 0.0),
      gain_veh_to_user(users * vehicles, 0.0),
      veh_user_distance_m(users * vehicles, 0.0),
      reuse(users * vehicles, 0) {}

void LinkState::validate() const {
  if (gain_mbs_to_user.size() != n_users ||
      gain_veh_to_user.size() != n_users * n_vehicles ||
      veh_user_distance_m.size() != n_users * n_vehicles ||
      reuse.size() != n_users * n_vehicles) {
    fail(ErrorCode::kDimensionMismatch, "link state arrays have wrong sizes");
  }
  for (double g : gain_mbs_to_user) {
    if (!(g >= 0.0)) fail(ErrorCode::kDomainError, "negative channel gain");
  }
  for (double g : gain_veh_to_user) {
    if (!(g >= 0.0)) fail(ErrorCode::kDomainError, "negative channel gain");
  }
  for (std::size_t v = 0; v < n_vehicles; ++v) {
    int channels = 0;
    for (std::size_t k = 0; k < n_users; ++k) channels += reuse[pair(v, k)] ? 1 : 0;
    if (channels > 1) {
      std::ostringstream os;
      os << "vehicle " << v << " reuses " << channels << " downlink channels";
      fail(ErrorCode::kValidationError, os.str());
    }
  }
}

namespace {

double vehicle_interference(std::size_t k, std::size_t skip,
                            const LinkState& state, const RadioParams& params) {
  double sum = 0.0;
  for (std::size_t n = 0; n < state.n_vehicles; ++n) {
    if (n == skip) continue;
    const std::size_t i = state.pair(n, k);
    if (state.reuse[i]) sum += params.p_veh_tx_w * state.gain_veh_to_user[i];
  }
  return sum;
}

void check_user(std::size_t k, const LinkState& state) {
  if (k >= state.n_users) fail(ErrorCode::kOutOfRange, "user index out of range");
}

}  // namespace

double sinr_mbs_user(std::size_t k, const LinkState& state,
                     const RadioParams& params) {
  check_user(k, state);
  const double signal = params.p_mbs_tx_w * state.gain_mbs_to_user[k];
  const double interference =
      vehicle_interference(k, state.n_vehicles, state, params);
  return signal / (params.noise_power_w + interference);
}

double sinr_vehicle_user(std::size_t k, std::size_t v, const LinkState& state,
                         const RadioParams& params) {
  check_user(k, state);
  if (v >= state.n_vehicles) {
    fail(ErrorCode::kOutOfRange, "vehicle index out of range");
  }
  const std::size_t i = state.pair(v, k);
  if (state.veh_user_distance_m[i] > params.d2d_range_m) {
    std::ostringstream os;
    os << "vehicle " << v << " is " << state.veh_user_distance_m[i]
       << " m from user " << k << ", beyond the D2D range";
    fail(ErrorCode::kOutOfRange, os.str());
  }
  double denom = params.noise_power_w + vehicle_interference(k, v, state, params);
  if (params.d2d_mbs_interference) {
    denom += params.p_mbs_tx_w * state.gain_mbs_to_user[k];
  }
  return params.p_veh_tx_w * state.gain_veh_to_user[i] / denom;
}

double sinr_d2d_signal(double signal_w, std::size_t k, const LinkState& state,
                       const RadioParams& params) {
  check_user(k, state);
  double denom =
      params.noise_power_w + vehicle_interference(k, state.n_vehicles, state, params);
  if (params.d2d_mbs_interference) {
    denom += params.p_mbs_tx_w * state.gain_mbs_to_user[k];
  }
  return signal_w / denom;
}

double shannon_rate(double bandwidth_hz, double sinr) {
  if (!(sinr >= 0.0)) fail(ErrorCode::kDomainError, "negative SINR");
  return bandwidth_hz * std::log2(1.0 + sinr);
}

LinearThroughput binomial_throughput_model(const ServiceSplit& split,
                                           std::span<const SinrPair> sinrs,
                                           double bandwidth_hz,
                                           double slot_seconds) {
  const std::size_t n = sinrs.size();
  double mbs = 0.0, veh = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const SinrPair& s = sinrs[k - 1];
    mbs += kk * served_count_pmf(n, split.kappa0, k) * std::log2(1.0 + s.mbs);
    veh += kk * served_count_pmf(n, split.kappa1, k) * std::log2(1.0 + s.veh);
  }
  const double scale = bandwidth_hz * slot_seconds;
  return {scale * mbs, -scale * mbs, scale * veh};
}

SlotThroughput slot_throughput(const CacheVector& cache, const Catalog& catalog,
                               const ServiceSplit& split, std::size_t n_users,
                               std::span<const SinrPair> sinrs,
                               double bandwidth_hz, double slot_seconds) {
  if (cache.q.size() != catalog.popularity.size()) {
    fail(ErrorCode::kDimensionMismatch, "cache vector and catalog differ in length");
  }
  if (sinrs.size() != n_users) {
    fail(ErrorCode::kDimensionMismatch, "one SINR pair per user is required");
  }
  double cached = 0.0;
  for (std::size_t j = 0; j < cache.q.size(); ++j) {
    cached += cache.q[j] * catalog.popularity[j];
  }
  const LinearThroughput m =
      binomial_throughput_model(split, sinrs, bandwidth_hz, slot_seconds);
  SlotThroughput t;
  t.r_mbs = m.mbs(cached);
  t.r_veh = m.veh(cached);
  t.r_total = t.r_mbs + t.r_veh;
  return t;
}

LinearThroughput routed_throughput_model(double kappa1,
                                         std::span<const SinrPair> sinrs,
                                         double bandwidth_hz,
                                         double slot_seconds) {
  if (!(kappa1 >= 0.0 && kappa1 <= 1.0)) {
    fail(ErrorCode::kDomainError, "kappa1 outside [0,1]");
  }
  double mbs = 0.0, veh = 0.0;
  for (const SinrPair& s : sinrs) {
    mbs += std::log2(1.0 + s.mbs);
    veh += std::log2(1.0 + s.veh);
  }
  const double scale = bandwidth_hz * slot_seconds;
  return {scale * mbs, -scale * kappa1 * mbs, scale * kappa1 * veh};
}

}  // namespace vcache
