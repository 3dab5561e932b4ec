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

#ifndef VCACHE_SIM_HPP
#define VCACHE_SIM_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vcache/catalog.hpp"
#include "vcache/energy.hpp"
#include "vcache/interaction.hpp"
#include "vcache/optimizer.hpp"
#include "vcache/phy.hpp"

namespace vcache {

using Rng = std::mt19937_64;

enum class Policy { kOnline, kOffline, kNone };
enum class DelayModel { kAnalytic, kEmpirical };

const char* to_string(Policy p) noexcept;
std::optional<Policy> parse_policy(const std::string& s);

/// Popularity churn: every interval_slots slots, `swaps` times, a fragment
/// among the hot_ranks most popular trades places with a uniformly random
/// fragment. interval_slots = 0 keeps popularity fixed.
struct DriftParams {
  std::size_t interval_slots = 300;
  std::size_t hot_ranks = 20;
  std::size_t swaps = 2;
};

struct ScenarioConfig {
  double user_intensity = 200.0;
  double vehicle_count_mean = 100.0;
  double cache_proportion = 0.5;
  /// Per-vehicle storage as a fraction of the catalog size.
  double normalized_capacity = 0.01;

  /// rates.xi is the base meeting rate xi_base; defaults lambda=1, nu=3,
  /// xi=100, omega=0.5.
  InteractionRates rates{1.0, 3.0, 100.0, 0.5};
  std::optional<double> fixed_xi_eff;

  std::size_t n_fragments = 1000;
  double fragment_size_bits = 10e6;
  double zipf_exponent = 0.7;
  DriftParams drift;

  RadioParams radio;
  std::size_t road_lanes = 4;
  double lane_spacing_m = 5.0;

  EnergyParams energy;
  double backhaul_amortization_slots = 100.0;

  Policy policy = Policy::kOnline;
  std::size_t offline_update_interval_slots = 86400;
  double v_param = 50.0;
  ThroughputModel throughput_model = ThroughputModel::kRouted;
  DelayModel delay_model = DelayModel::kAnalytic;

  std::size_t n_slots = 3600;
  std::uint64_t rng_seed = 1;
  bool emit_traces = false;

  double capacity_bits() const;
  /// Mean tolerance time 1/omega.
  double delay_budget() const;
  /// Throws ValidationError naming the offending field.
  void validate() const;
};

struct Vehicle {
  Point pos;
  bool caching = false;
};

/// Poisson(intensity) points uniform on the disk of the given radius.
std::vector<Point> spawn_users(double intensity, double radius, Rng& rng);

/// Fixed count of uniform points on the disk.
std::vector<Point> place_users(std::size_t count, double radius, Rng& rng);

/// Poisson(mean_count) vehicles, each caching with probability
/// cache_proportion, spread uniformly over `lanes` parallel lanes of a road
/// through the cell centre.
std::vector<Vehicle> spawn_vehicles(double mean_count, double cache_proportion,
                                    double radius, std::size_t lanes,
                                    double lane_spacing_m, Rng& rng);

/// Redraws positions of an existing fleet on the same road.
void place_vehicles(std::vector<Vehicle>& fleet, double radius, std::size_t lanes,
                    double lane_spacing_m, Rng& rng);

struct SlotTrace {
  std::size_t slot = 0;
  double eta = 0.0;
  double r_mbs = 0.0;
  double r_veh = 0.0;
  double r_novc = 0.0;
  double energy = 0.0;
  double cached_mass = 0.0;
  double xi_eff = 0.0;
  double max_backlog = 0.0;
  double objective = 0.0;
  std::uint64_t requests = 0;
  std::uint64_t hits = 0;
};

struct EpisodeMetrics {
  double eta_ee = 0.0;
  double hit_ratio = 0.0;
  double cache_utilization = 0.0;
  double system_gain = 0.0;

  double bits_total = 0.0;
  double bits_mbs = 0.0;
  double bits_veh = 0.0;
  double bits_novc = 0.0;
  double energy_total = 0.0;
  double energy_mbs = 0.0;
  double energy_veh_tx = 0.0;
  double energy_cache = 0.0;
  double energy_backhaul = 0.0;
  double backhauled_bits = 0.0;

  std::uint64_t requests = 0;  ///< requests resolved (vehicle or MBS)
  std::uint64_t vehicle_hits = 0;
  std::uint64_t vehicle_services = 0;  ///< completions in vehicle mode, hit or miss
  std::uint64_t expiries = 0;
  /// Time share of vehicle mode, T1 / (A0 + T1) with A0 the queue-weighted
  /// time in cellular mode.
  double kappa1_occupancy = 0.0;
  double vehicle_request_fraction = 0.0;

  double mean_delay = 0.0;    ///< time average of the slot delays fed to the queues
  double mean_sojourn = 0.0;  ///< measured request sojourn time
  double delay_budget = 0.0;
  double max_backlog = 0.0;
  double backlog_per_slot = 0.0;  ///< max_n H_n(K) / K
  double b_estimate = 0.0;
  double bound_gap = 0.0;
  double mean_cached_mass = 0.0;

  std::size_t n_users = 0;
  std::size_t n_vehicles = 0;
  std::size_t n_caching = 0;
  std::size_t n_slots = 0;

  std::vector<SlotTrace> traces;
};

/// Runs one episode of n_slots slots under the configured policy.
/// Deterministic in (config, config.rng_seed).
EpisodeMetrics run_episode(const ScenarioConfig& config);

struct SweepRow {
  std::optional<EpisodeMetrics> metrics;
  std::string error;
};

/// Runs every config on up to `threads` worker threads; row i belongs to
/// configs[i] regardless of scheduling. Failures are captured per row.
std::vector<SweepRow> sweep(const std::vector<ScenarioConfig>& configs,
                            unsigned threads = 1);

/// Seed of replicate `replicate`, derived from the master seed with
/// splitmix64. It does not depend on the sweep point, so every point of a
/// sweep sees the same seeds (paired comparisons).
std::uint64_t episode_seed(std::uint64_t master, std::uint64_t replicate);

/// Popularity mass of the best fill of `capacity_fragments` slots
/// (top fragments by popularity, fractional at the margin).
double top_fill_mass(std::span<const double> popularity, double capacity_fragments);

}  // namespace vcache

#endif  // VCACHE_SIM_HPP
