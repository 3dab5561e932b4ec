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

#include <cmath>
#include <random>
#include <vector>

#include "vcache/catalog.hpp"
#include "vcache/error.hpp"
#include "vcache/interaction.hpp"
#include "vcache/phy.hpp"

using namespace vcache;

namespace {

RadioParams unit_radio() {
  RadioParams r;
  r.p_mbs_tx_w = 1.0;
  r.p_veh_tx_w = 1.0;
  r.noise_power_w = 1e-9;
  r.reference_gain = 1.0;
  return r;
}

}  // namespace

TEST_CASE("channel gain cases") {
  RadioParams r;
  r.reference_gain = 1.0;
  r.pathloss_exponent = 3.0;
  CHECK(channel_gain(1.0, r) == doctest::Approx(1.0));
  CHECK(channel_gain(10.0, r) == doctest::Approx(1e-3));
  r.pathloss_exponent = 2.0;
  CHECK(channel_gain(100.0, r) == doctest::Approx(1e-4));
}

TEST_CASE("MBS SINR cases") {
  const RadioParams r = unit_radio();
  LinkState alone(1, 0);
  alone.gain_mbs_to_user[0] = 1e-6;
  CHECK(sinr_mbs_user(0, alone, r) == doctest::Approx(1000.0));

  LinkState reused(1, 1);
  reused.gain_mbs_to_user[0] = 1e-6;
  reused.gain_veh_to_user[reused.pair(0, 0)] = 1e-6;
  reused.reuse[reused.pair(0, 0)] = 1;
  CHECK(sinr_mbs_user(0, reused, r) == doctest::Approx(1e-6 / (1e-9 + 1e-6)));

  alone.gain_mbs_to_user[0] = 0.0;
  CHECK(sinr_mbs_user(0, alone, r) == 0.0);
}

TEST_CASE("vehicle SINR cases") {
  RadioParams r = unit_radio();
  LinkState s(1, 1);
  s.gain_veh_to_user[s.pair(0, 0)] = 1e-7;
  s.veh_user_distance_m[s.pair(0, 0)] = 5.0;
  s.gain_mbs_to_user[0] = 1e-7;
  CHECK(sinr_vehicle_user(0, 0, s, r) == doctest::Approx(100.0));
  r.d2d_mbs_interference = true;
  CHECK(sinr_vehicle_user(0, 0, s, r) == doctest::Approx(1e-7 / (1e-9 + 1e-7)));
  s.gain_veh_to_user[s.pair(0, 0)] = 0.0;
  CHECK(sinr_vehicle_user(0, 0, s, r) == 0.0);
  s.veh_user_distance_m[s.pair(0, 0)] = r.d2d_range_m + 1.0;
  CHECK_THROWS_AS(sinr_vehicle_user(0, 0, s, r), Error);
}

TEST_CASE("range test is boundary inclusive") {
  CHECK(in_range({0, 0}, {0, 0}, 1.0));
  CHECK(in_range({0, 0}, {3, 4}, 5.0));
  CHECK_FALSE(in_range({0, 0}, {3, 4}, 4.9));
}

TEST_CASE("shannon rate cases") {
  CHECK(shannon_rate(10e6, 3.0) == doctest::Approx(2e7));
  CHECK(shannon_rate(10e6, 0.0) == 0.0);
  CHECK(shannon_rate(10e6, 1.0) == doctest::Approx(1e7));
}

TEST_CASE("shannon rate is increasing and concave") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < 1000; ++i) {
    const double g = u(rng);
    const double h = 1e-3 * (1.0 + g);
    const double a = shannon_rate(1e6, g);
    const double b = shannon_rate(1e6, g + h);
    const double c = shannon_rate(1e6, g + 2 * h);
    CHECK(b > a);
    CHECK(c - b < b - a);
  }
}

TEST_CASE("slot throughput cases") {
  Catalog one;
  one.n_fragments = 1;
  one.fragment_size_bits = 1.0;
  one.popularity = {1.0};
  ServiceSplit split;
  split.kappa0 = 0.4;
  split.kappa1 = 0.6;
  const std::vector<SinrPair> sinrs{{3.0, 1.0}};
  const SlotThroughput t = slot_throughput({{1.0}, 1.0}, one, split, 1, sinrs, 1.0, 1.0);
  CHECK(std::abs(t.r_mbs) < 1e-12);
  CHECK(t.r_veh == doctest::Approx(0.6));
  CHECK(t.r_total == doctest::Approx(0.6));

  const Catalog c = Catalog::make(5, 1.0, 0.7);
  const std::vector<SinrPair> many{{3, 1}, {7, 2}, {1, 0.5}};
  const SlotThroughput z = slot_throughput({{0, 0, 0, 0, 0}, 5.0}, c, split, 3, many, 1e6, 1.0);
  CHECK(z.r_veh == 0.0);
  CHECK(z.r_total == z.r_mbs);

  ServiceSplit all;
  all.kappa0 = 0.0;
  all.kappa1 = 1.0;
  const SlotThroughput f = slot_throughput({{1, 1, 1, 1, 1}, 5.0}, c, all, 3, many, 1e6, 1.0);
  CHECK(std::abs(f.r_mbs) < 1e-6);
}

TEST_CASE("slot throughput is linear in q") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Catalog c = Catalog::make(8, 1.0, 0.8);
  const std::vector<SinrPair> sinrs{{3, 10}, {0.5, 4}, {12, 1}, {2, 2}};
  const ServiceSplit split = service_split({1, 3, 2, 0.5});
  for (int i = 0; i < 100; ++i) {
    std::vector<double> q1(8), q2(8), mix(8);
    for (double& x : q1) x = u(rng);
    for (double& x : q2) x = u(rng);
    const double a = u(rng);
    for (int j = 0; j < 8; ++j) mix[j] = a * q1[j] + (1 - a) * q2[j];
    const double r1 = slot_throughput({q1, 8}, c, split, 4, sinrs, 1e6, 1).r_total;
    const double r2 = slot_throughput({q2, 8}, c, split, 4, sinrs, 1e6, 1).r_total;
    const double rm = slot_throughput({mix, 8}, c, split, 4, sinrs, 1e6, 1).r_total;
    CHECK(rm == doctest::Approx(a * r1 + (1 - a) * r2).epsilon(1e-9));
  }
}

TEST_CASE("adding an interferer never raises a SINR") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> g(1e-9, 1e-5);
  RadioParams r = unit_radio();
  r.d2d_mbs_interference = true;
  for (int i = 0; i < 200; ++i) {
    LinkState s(2, 3);
    for (double& x : s.gain_mbs_to_user) x = g(rng);
    for (double& x : s.gain_veh_to_user) x = g(rng);
    for (double& x : s.veh_user_distance_m) x = 1.0;
    s.reuse[s.pair(0, 0)] = 1;
    const double m0 = sinr_mbs_user(0, s, r);
    const double v0 = sinr_vehicle_user(0, 0, s, r);
    s.reuse[s.pair(2, 0)] = 1;
    CHECK(sinr_mbs_user(0, s, r) <= m0);
    CHECK(sinr_vehicle_user(0, 0, s, r) <= v0);
  }
}

TEST_CASE("link state rejects double channel reuse") {
  LinkState s(2, 1);
  s.reuse[s.pair(0, 0)] = 1;
  s.reuse[s.pair(0, 1)] = 1;
  CHECK_THROWS_AS(s.validate(), Error);
}
