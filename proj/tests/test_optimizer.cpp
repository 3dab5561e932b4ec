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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "vcache/error.hpp"
#include "vcache/optimizer.hpp"

using namespace vcache;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

// Full per-slot objective V*(P - eta*R) + H*D evaluated from first principles
// for the routed throughput model at a fixed service share kappa1.
struct Scene {
  std::vector<double> p;
  std::vector<SinrPair> sinrs;
  double kappa1 = 0.4;
  double bandwidth = 1e6;
  EnergyParams energy;
  InteractionRates rates{1, 3, 2, 0.5};
  double xi_gain = 0.0;
  double eta = 0.0;
  double v = 10.0;
  double backlog = 0.0;

  double delay(double xi) const {
    const double d = rates.nu * rates.omega + rates.nu * xi - rates.lambda * rates.omega;
    const double l0 = (rates.lambda * rates.nu - rates.lambda * rates.lambda) / d;
    const double l1 = xi * rates.lambda / d;
    return (l0 + l1) / rates.lambda;
  }

  double objective(const std::vector<double>& q) const {
    double mass = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) mass += p[j] * q[j];
    double lm = 0.0, lv = 0.0;
    for (const SinrPair& s : sinrs) {
      lm += std::log2(1 + s.mbs);
      lv += std::log2(1 + s.veh);
    }
    const double r_m = bandwidth * lm * (1 - kappa1 * mass);
    const double r_v = bandwidth * lv * kappa1 * mass;
    const double power = energy.mbs_rate_energy * r_m + energy.cache_rate_energy * r_v;
    return v * (power - eta * (r_m + r_v)) + backlog * delay(rates.xi + xi_gain * mass);
  }

  SlotSnapshot snapshot(VirtualQueues& queues) const {
    SlotSnapshot s;
    s.popularity = p;
    s.fragment_size_bits = 1e6;
    s.capacity_bits = 2e6;
    s.sinrs = sinrs;
    ServiceSplit split;
    split.kappa1 = kappa1;
    split.kappa0 = 1 - kappa1;
    s.split = split;
    s.bandwidth_hz = bandwidth;
    s.rates = rates;
    s.xi_gain = xi_gain;
    s.energy = energy;
    queues.h = {backlog};
    queues.d_av = 1.0;
    s.queues = &queues;
    s.eta = eta;
    s.v_param = v;
    return s;
  }
};

Scene random_scene(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Scene sc;
  sc.p.resize(n);
  double s = 0.0;
  for (double& x : sc.p) s += (x = 0.1 + u(rng));
  for (double& x : sc.p) x /= s;
  for (int k = 0; k < 5; ++k) sc.sinrs.push_back({0.5 + 20 * u(rng), 0.5 + 200 * u(rng)});
  sc.kappa1 = 0.1 + 0.8 * u(rng);
  return sc;
}

std::vector<double> finite_difference(const Scene& sc) {
  std::vector<double> g(sc.p.size());
  std::vector<double> q(sc.p.size(), 0.0);  // the snapshot rates describe q = 0
  for (std::size_t j = 0; j < q.size(); ++j) {
    std::vector<double> hi = q, lo = q;
    hi[j] += 1e-4;
    lo[j] -= 1e-4;
    g[j] = (sc.objective(hi) - sc.objective(lo)) / 2e-4;
  }
  return g;
}

double grid_min(const SlotProblem& p, double cap_units) {
  const std::size_t n = p.linear_coeffs.size();
  std::vector<int> k(n, 0);
  std::vector<double> q(n);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double used = 0;
    for (std::size_t j = 0; j < n; ++j) used += (q[j] = k[j] / 10.0);
    if (used <= cap_units + 1e-9) best = std::min(best, p.objective(q));
    std::size_t j = 0;
    while (j < n && ++k[j] > 10) k[j++] = 0;
    if (j == n) return best;
  }
}

// Exact LP optimum: sort unit pieces by slope and pour capacity into the
// negative ones. Independent of the library's piece bookkeeping.
double lp_min(const SlotProblem& p, double cap_units) {
  std::vector<std::pair<double, double>> pieces;  // slope, length
  for (std::size_t j = 0; j < p.linear_coeffs.size(); ++j) {
    const double a = p.anchor.empty() ? 1.0 : p.anchor[j];
    pieces.push_back({p.linear_coeffs[j], a});
    if (!p.anchor.empty()) pieces.push_back({p.linear_coeffs[j] + p.raise_cost[j], 1.0 - a});
  }
  std::sort(pieces.begin(), pieces.end());
  double room = cap_units, f = 0.0;
  for (const auto& [slope, len] : pieces) {
    if (slope >= 0.0 || room <= 0.0) break;
    const double take = std::min(len, room);
    f += slope * take;
    room -= take;
  }
  return f;
}

}  // namespace

TEST_CASE("virtual queue update cases") {
  CHECK(update_virtual_queue(2, 3, 5) == 0.0);
  CHECK(update_virtual_queue(0, 5, 5) == 0.0);
  CHECK(update_virtual_queue(1, 4, 2) == 3.0);

  VirtualQueues q{{1.0, 0.0}, 2.0};
  const double drift = update_virtual_queues(q, std::vector<double>{4.0, 1.0});
  CHECK(q.h == std::vector<double>{3.0, 0.0});
  CHECK(drift == doctest::Approx(0.5 * (4.0 + 1.0)));
  CHECK(q.max_backlog() == 3.0);
  CHECK(code_of([&] { update_virtual_queues(q, std::vector<double>{1.0}); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("efficiency tracker cases") {
  EfficiencyTracker t = update_eta({}, 10, 100);
  CHECK(t.eta == doctest::Approx(0.1));
  CHECK(update_eta(t, 0, 0).eta == doctest::Approx(0.1));
  CHECK(update_eta(t, 20, 100).eta == doctest::Approx(0.15));
}

TEST_CASE("slot coefficients match the finite-difference gradient") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    Scene sc = random_scene(rng, 6);
    sc.eta = i % 2 ? 0.0 : 2e-9;
    sc.backlog = i % 3 ? 0.0 : 4.0;
    sc.xi_gain = 50.0;
    VirtualQueues queues;
    const SlotProblem prob = build_slot_problem(sc.snapshot(queues));
    const std::vector<double> g = finite_difference(sc);
    for (std::size_t j = 0; j < g.size(); ++j) {
      CHECK(prob.linear_coeffs[j] == doctest::Approx(g[j]).epsilon(1e-5));
    }
  }
}

TEST_CASE("caching pays when the vehicle path is cheaper and queues are empty") {
  std::mt19937_64 rng(13);
  Scene sc = random_scene(rng, 8);
  VirtualQueues queues;
  const SlotProblem prob = build_slot_problem(sc.snapshot(queues));
  for (double c : prob.linear_coeffs) CHECK(c < 0.0);
}

TEST_CASE("with V = 0 only the delay term remains") {
  std::mt19937_64 rng(14);
  Scene a = random_scene(rng, 4);
  a.v = 0.0;
  a.backlog = 3.0;
  a.xi_gain = 20.0;
  Scene b = a;
  b.eta = 5e-9;
  b.energy.mbs_rate_energy = 1e-6;
  VirtualQueues qa, qb;
  const SlotProblem pa = build_slot_problem(a.snapshot(qa));
  const SlotProblem pb = build_slot_problem(b.snapshot(qb));
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(pa.linear_coeffs[j] == pb.linear_coeffs[j]);
    const double expect = 3.0 * expected_delay_slope_xi(a.rates) * 20.0 * a.p[j];
    CHECK(pa.linear_coeffs[j] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("equal popularity gives equal coefficients") {
  std::mt19937_64 rng(15);
  Scene sc = random_scene(rng, 2);
  sc.p = {0.5, 0.5};
  sc.backlog = 2.0;
  sc.xi_gain = 10.0;
  VirtualQueues queues;
  const SlotProblem prob = build_slot_problem(sc.snapshot(queues));
  CHECK(std::abs(prob.linear_coeffs[0] - prob.linear_coeffs[1]) <= 1e-12);
}

TEST_CASE("missing snapshot state is reported") {
  std::mt19937_64 rng(16);
  Scene sc = random_scene(rng, 3);
  VirtualQueues queues;
  SlotSnapshot s = sc.snapshot(queues);
  s.split.reset();
  CHECK(code_of([&] { build_slot_problem(s); }) == ErrorCode::kMissingState);
  s = sc.snapshot(queues);
  s.queues = nullptr;
  CHECK(code_of([&] { build_slot_problem(s); }) == ErrorCode::kMissingState);
  s = sc.snapshot(queues);
  s.eta.reset();
  CHECK(code_of([&] { build_slot_problem(s); }) == ErrorCode::kMissingState);
}

TEST_CASE("solve_slot cases") {
  SlotProblem p;
  p.fragment_size_bits = 1e6;
  p.capacity_bits = 2e6;
  p.linear_coeffs = {-5, -3, -1};
  CHECK(solve_slot(p).q == std::vector<double>{1, 1, 0});
  p.linear_coeffs = {0, 2, 7};
  CHECK(solve_slot(p).q == std::vector<double>{0, 0, 0});
  p.linear_coeffs = {-5, -3};
  p.capacity_bits = 1.5e6;
  const std::vector<double> q = solve_slot(p).q;
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == doctest::Approx(0.5));
  p.capacity_bits = 0.0;
  CHECK(code_of([&] { solve_slot(p); }) == ErrorCode::kInfeasibleCapacity);
}

TEST_CASE("solve_slot agrees with grid search and an exact LP") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 400; ++i) {
    const bool small = i < 200;
    const std::size_t n = small ? 1 + i % 4 : 1 + static_cast<std::size_t>(u(rng) * 50);
    SlotProblem p;
    p.fragment_size_bits = 1e7;
    p.linear_coeffs.resize(n);
    for (double& c : p.linear_coeffs) c = 2 * u(rng) - 1;
    const double cap = small ? std::ceil(u(rng) * 10 * n) / 10 : 0.1 + u(rng) * n;
    p.capacity_bits = cap * p.fragment_size_bits;
    if (i % 2) {
      p.anchor.resize(n);
      p.raise_cost.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        p.anchor[j] = small ? std::floor(u(rng) * 11) / 10 : u(rng);
        p.raise_cost[j] = u(rng);
      }
    }
    const CacheVector cv = solve_slot(p);
    double used = 0;
    for (double x : cv.q) {
      CHECK((x >= 0.0 && x <= 1.0));
      used += x;
    }
    CHECK(used <= cap + 1e-12);
    const double f = p.objective(cv.q);
    if (small) CHECK(f == doctest::Approx(grid_min(p, cap)).epsilon(1e-12));
    CHECK(f == doctest::Approx(lp_min(p, cap)).epsilon(1e-12));
  }
}

TEST_CASE("Dinkelbach cases") {
  const QFunction p10 = [](std::span<const double>) { return 10.0; };
  const QFunction r100 = [](std::span<const double>) { return 100.0; };
  const KnapsackSpace space(3, 1e6, 2e6);
  const DinkelbachResult flat = dinkelbach_solve_static(p10, r100, space, 1e-12);
  CHECK(flat.eta == doctest::Approx(0.1));
  CHECK(flat.iterations == 1);

  const DiscreteSpace two({{0.0}, {1.0}});
  const QFunction p = [](std::span<const double> q) { return q[0] < 0.5 ? 4.0 : 3.0; };
  const QFunction r = [](std::span<const double> q) { return q[0] < 0.5 ? 10.0 : 5.0; };
  const DinkelbachResult pick = dinkelbach_solve_static(p, r, two, 1e-12);
  CHECK(pick.eta == doctest::Approx(0.4));
  CHECK(pick.q == std::vector<double>{0.0});
}

TEST_CASE("Dinkelbach iterates never increase and end at a root") {
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 2 + i % 20;
    std::vector<double> pc(n), rc(n);
    const double p0 = 1 + 5 * u(rng), r0 = 1 + 5 * u(rng);
    for (std::size_t j = 0; j < n; ++j) {
      pc[j] = (1.5 * u(rng) - 0.5) * p0 / n;
      rc[j] = 2 * u(rng) * r0 / n;
    }
    auto affine = [](double c0, const std::vector<double>& c) {
      return QFunction([c0, c](std::span<const double> q) {
        double v = c0;
        for (std::size_t j = 0; j < c.size(); ++j) v += c[j] * q[j];
        return v;
      });
    };
    const QFunction P = affine(p0, pc), R = affine(r0, rc);
    const KnapsackSpace space(n, 1.0, 0.3 * n);
    const DinkelbachResult res = dinkelbach_solve_static(P, R, space, 1e-12);
    for (std::size_t k = 1; k < res.eta_history.size(); ++k) {
      CHECK(res.eta_history[k] <= res.eta_history[k - 1]);
    }
    CHECK(std::abs(P(res.q) - res.eta * R(res.q)) / R(res.q) < 1e-9);
    // Independent ratio minimum: the optimum of an affine ratio over the
    // knapsack lies on a vertex with at most one fractional entry; compare
    // with the parametric LP value at the returned eta.
    SlotProblem lin;
    lin.linear_coeffs.resize(n);
    for (std::size_t j = 0; j < n; ++j) lin.linear_coeffs[j] = pc[j] - res.eta * rc[j];
    const double fmin = p0 - res.eta * r0 + lp_min(lin, 0.3 * n);
    CHECK(std::abs(fmin) / R(res.q) < 1e-9);
  }
}

TEST_CASE("ratio and parametric argmins coincide on discrete spaces") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int s = 0; s < 50; ++s) {
    const std::size_t n = 2 + s % 12;
    std::vector<std::vector<double>> pts;
    std::vector<double> pv(n), rv(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back({static_cast<double>(i)});
      pv[i] = u(rng);
      rv[i] = u(rng);
    }
    double eta = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pv[i] / rv[i] < eta) {
        eta = pv[i] / rv[i];
        best = i;
      }
    }
    std::size_t pbest = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pv[i] - eta * rv[i] < pv[pbest] - eta * rv[pbest]) pbest = i;
    }
    CHECK(pbest == best);
    CHECK(std::abs(pv[pbest] - eta * rv[pbest]) < 1e-12);
    const QFunction P = [&](std::span<const double> q) { return pv[std::lround(q[0])]; };
    const QFunction R = [&](std::span<const double> q) { return rv[std::lround(q[0])]; };
    const DinkelbachResult res = dinkelbach_solve_static(P, R, DiscreteSpace(pts), 1e-12);
    CHECK(std::lround(res.q[0]) == static_cast<long>(best));
    CHECK(res.eta == doctest::Approx(eta).epsilon(1e-14));
  }
}

TEST_CASE("diagnostic bound cases") {
  CHECK(diagnostics_bound(10, 50, 100) == doctest::Approx(0.002));
  CHECK(diagnostics_bound(10, 100, 100) == doctest::Approx(0.5 * diagnostics_bound(10, 50, 100)));
  CHECK(diagnostics_bound(10, 1e300, 100) < 1e-290);
  CHECK(code_of([] { diagnostics_bound(10, 0, 100); }) == ErrorCode::kDomainError);
}
