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

#ifndef VCACHE_ENERGY_HPP
#define VCACHE_ENERGY_HPP

namespace vcache {

struct EnergyParams {
  double mbs_rate_energy = 0.5e-8;     ///< J per bit sent by the MBS
  double cache_rate_energy = 6.25e-12; ///< J per bit served from a vehicle cache
  double amplifier_factor = 15.13;     ///< vehicle PA / cooling overhead
  double slot_seconds = 1.0;
  /// Charge backhaul on bits served by vehicles instead of on bits pushed
  /// into vehicle caches.
  bool backhaul_per_served_bit = false;

  void validate() const;
};

struct VehicleEnergy {
  double p_tx = 0.0;
  double p_cache = 0.0;
  double p_backhaul = 0.0;
};

struct EnergyLedger {
  double p_mbs = 0.0;
  double p_veh_tx = 0.0;
  double p_cache = 0.0;
  double p_backhaul = 0.0;
  double p_total = 0.0;
};

double mbs_energy(double r_mbs_bits, const EnergyParams& params);

/// p_tx = amplifier_factor * tx_power_w * slot_seconds, p_cache = r_veh *
/// cache_rate_energy and p_backhaul = backhauled_bits * mbs_rate_energy (or
/// r_veh * mbs_rate_energy with backhaul_per_served_bit).
VehicleEnergy vehicle_energy(double r_veh_bits, double backhauled_bits,
                             double tx_power_w, const EnergyParams& params);

EnergyLedger total_energy(double p_mbs, const VehicleEnergy& vehicle);

}  // namespace vcache

#endif  // VCACHE_ENERGY_HPP
