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

#include "vcache/energy.hpp"

#include <cmath>

#include "vcache/error.hpp"

namespace vcache {

void EnergyParams::validate() const {
  auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!pos(mbs_rate_energy) || !pos(cache_rate_energy) ||
      !pos(amplifier_factor) || !pos(slot_seconds)) {
    fail(ErrorCode::kValidationError, "energy parameters must be positive");
  }
}

double mbs_energy(double r_mbs_bits, const EnergyParams& params) {
  if (!(r_mbs_bits >= 0.0)) fail(ErrorCode::kDomainError, "negative MBS bits");
  return r_mbs_bits * params.mbs_rate_energy;
}

VehicleEnergy vehicle_energy(double r_veh_bits, double backhauled_bits,
                             double tx_power_w, const EnergyParams& params) {
  if (!(r_veh_bits >= 0.0) || !(backhauled_bits >= 0.0) || !(tx_power_w >= 0.0)) {
    fail(ErrorCode::kDomainError, "vehicle energy inputs must be nonnegative");
  }
  VehicleEnergy e;
  e.p_tx = params.amplifier_factor * tx_power_w * params.slot_seconds;
  e.p_cache = r_veh_bits * params.cache_rate_energy;
  const double bh_bits = params.backhaul_per_served_bit ? r_veh_bits : backhauled_bits;
  e.p_backhaul = bh_bits * params.mbs_rate_energy;
  return e;
}

EnergyLedger total_energy(double p_mbs, const VehicleEnergy& vehicle) {
  if (!(p_mbs >= 0.0) || !(vehicle.p_tx >= 0.0) || !(vehicle.p_cache >= 0.0) ||
      !(vehicle.p_backhaul >= 0.0)) {
    fail(ErrorCode::kDomainError, "energy parts must be nonnegative");
  }
  EnergyLedger l;
  l.p_mbs = p_mbs;
  l.p_veh_tx = vehicle.p_tx;
  l.p_cache = vehicle.p_cache;
  l.p_backhaul = vehicle.p_backhaul;
  l.p_total = p_mbs + vehicle.p_tx + vehicle.p_cache + vehicle.p_backhaul;
  return l;
}

}  // namespace vcache
