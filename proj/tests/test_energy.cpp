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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "vcache/energy.hpp"
#include "vcache/error.hpp"

using namespace vcache;

TEST_CASE("MBS energy cases") {
  const EnergyParams p;
  CHECK(mbs_energy(1e8, p) == doctest::Approx(0.5));
  CHECK(mbs_energy(0.0, p) == 0.0);
  CHECK(mbs_energy(2e8, p) == doctest::Approx(1.0));
  CHECK_THROWS_AS(mbs_energy(-1.0, p), Error);
}

TEST_CASE("vehicle energy cases") {
  const EnergyParams p;
  CHECK(vehicle_energy(0, 0, 0.2, p).p_tx == doctest::Approx(3.026));
  const VehicleEnergy idle = vehicle_energy(0, 0, 0.2, p);
  CHECK(idle.p_cache == 0.0);
  CHECK(idle.p_backhaul == 0.0);
  CHECK(vehicle_energy(1e9, 0, 0.2, p).p_cache == doctest::Approx(6.25e-3));
  CHECK(vehicle_energy(0, 1e7, 0.2, p).p_backhaul == doctest::Approx(0.05));
  EnergyParams served = p;
  served.backhaul_per_served_bit = true;
  CHECK(vehicle_energy(1e7, 0, 0.2, served).p_backhaul == doctest::Approx(0.05));
  CHECK_THROWS_AS(vehicle_energy(-1, 0, 0.2, p), Error);
}

TEST_CASE("total energy cases") {
  CHECK(total_energy(0, {0, 0, 0}).p_total == 0.0);
  CHECK(total_energy(0.5, {3.026, 6.25e-3, 0.1}).p_total == doctest::Approx(3.63225));
  CHECK(total_energy(0, {0, 0.7, 0}).p_total == 0.7);
  CHECK_THROWS_AS(total_energy(-0.1, {0, 0, 0}), Error);
}

TEST_CASE("bit-driven energy terms are linear") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1e9);
  const EnergyParams p;
  for (int i = 0; i < 200; ++i) {
    const double rm = u(rng), rv = u(rng), bh = u(rng);
    const VehicleEnergy a = vehicle_energy(rv, bh, 0.2, p);
    const VehicleEnergy b = vehicle_energy(2 * rv, 2 * bh, 0.2, p);
    const double one = mbs_energy(rm, p) + a.p_cache + a.p_backhaul;
    const double two = mbs_energy(2 * rm, p) + b.p_cache + b.p_backhaul;
    CHECK(two == doctest::Approx(2 * one).epsilon(1e-14));
  }
}

TEST_CASE("caching more never lowers cache and backhaul energy") {
  const EnergyParams p;
  double prev = -1.0;
  for (double q = 0.0; q <= 1.0; q += 0.05) {
    // Fixed demand of 1e9 bits, share q of it served from caches holding q of 1e8 bits.
    const VehicleEnergy e = vehicle_energy(q * 1e9, q * 1e8, 0.2, p);
    const double cost = e.p_cache + e.p_backhaul;
    CHECK(cost >= prev);
    prev = cost;
  }
}

TEST_CASE("energy parameters validate") {
  EnergyParams p;
  CHECK_NOTHROW(p.validate());
  p.slot_seconds = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}
