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

#include "vcache/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "vcache/error.hpp"

namespace vcache {

double VirtualQueues::max_backlog() const {
  double m = 0.0;
  for (double x : h) m = std::max(m, x);
  return m;
}

double VirtualQueues::total() const { return std::accumulate(h.begin(), h.end(), 0.0); }

double update_virtual_queue(double h_n, double d_n, double d_av) {
  return std::max(h_n + d_n - d_av, 0.0);
}

double update_virtual_queues(VirtualQueues& queues, std::span<const double> delays) {
  if (delays.size() != queues.h.size()) {
    fail(ErrorCode::kDimensionMismatch, "one delay per virtual queue expected");
  }
  double half_sq = 0.0;
  for (std::size_t n = 0; n < delays.size(); ++n) {
    const double e = delays[n] - queues.d_av;
    half_sq += 0.5 * e * e;
    queues.h[n] = update_virtual_queue(queues.h[n], delays[n], queues.d_av);
  }
  return half_sq;
}

EfficiencyTracker update_eta(EfficiencyTracker tracker, double slot_energy,
                             double slot_bits) {
  if (!(slot_energy >= 0.0) || !(slot_bits >= 0.0)) {
    fail(ErrorCode::kDomainError, "slot energy and bits must be nonnegative");
  }
  tracker.cumulative_energy += slot_energy;
  tracker.cumulative_bits += slot_bits;
  if (tracker.cumulative_bits > 0.0) {
    tracker.eta = tracker.cumulative_energy / tracker.cumulative_bits;
  }
  return tracker;
}

double SlotProblem::objective(std::span<const double> q) const {
  double f = 0.0;
  for (std::size_t j = 0; j < q.size() && j < linear_coeffs.size(); ++j) {
    f += linear_coeffs[j] * q[j];
    if (!anchor.empty()) f += raise_cost[j] * std::max(0.0, q[j] - anchor[j]);
  }
  return f;
}

LinearThroughput snapshot_throughput(const SlotSnapshot& snap) {
  if (!snap.split) fail(ErrorCode::kMissingState, "slot snapshot has no service split");
  if (!snap.energy) fail(ErrorCode::kMissingState, "slot snapshot has no energy parameters");
  const double slot = snap.energy->slot_seconds;
  if (snap.throughput_model == ThroughputModel::kBinomial) {
    return binomial_throughput_model(*snap.split, snap.sinrs, snap.bandwidth_hz, slot);
  }
  return routed_throughput_model(snap.split->kappa1, snap.sinrs, snap.bandwidth_hz, slot);
}

SlotProblem build_slot_problem(const SlotSnapshot& snap) {
  if (snap.popularity.empty()) fail(ErrorCode::kMissingState, "slot snapshot has no popularity");
  if (!snap.rates) fail(ErrorCode::kMissingState, "slot snapshot has no interaction rates");
  if (!snap.queues) fail(ErrorCode::kMissingState, "slot snapshot has no virtual queues");
  if (!snap.eta) fail(ErrorCode::kMissingState, "slot snapshot has no efficiency estimate");
  const LinearThroughput tp = snapshot_throughput(snap);
  const EnergyParams& en = *snap.energy;
  const std::size_t n = snap.popularity.size();
  if (!snap.q_current.empty() && snap.q_current.size() != n) {
    fail(ErrorCode::kDimensionMismatch, "current cache and popularity differ in length");
  }

  // Per unit of cached popularity mass Q.
  double energy_slope = en.mbs_rate_energy * tp.m1 + en.cache_rate_energy * tp.v1;
  if (en.backhaul_per_served_bit) energy_slope += en.mbs_rate_energy * tp.v1;
  const double penalty_slope = energy_slope - *snap.eta * (tp.m1 + tp.v1);

  double backlog = snap.queues->total();
  double delay_slope = 0.0;
  if (backlog > 0.0) delay_slope = backlog * expected_delay_slope_xi(*snap.rates) * snap.xi_gain;

  SlotProblem prob;
  prob.capacity_bits = snap.capacity_bits;
  prob.fragment_size_bits = snap.fragment_size_bits;
  prob.v_param = snap.v_param;
  prob.linear_coeffs.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    prob.linear_coeffs[j] = (snap.v_param * penalty_slope + delay_slope) * snap.popularity[j];
  }
  if (!en.backhaul_per_served_bit && !snap.q_current.empty()) {
    if (!(snap.backhaul_amortization_slots > 0.0)) {
      fail(ErrorCode::kDomainError, "backhaul amortization must be positive");
    }
    const double refill = snap.v_param * en.mbs_rate_energy * snap.fragment_size_bits *
                          snap.n_caching_vehicles / snap.backhaul_amortization_slots;
    prob.anchor.assign(snap.q_current.begin(), snap.q_current.end());
    prob.raise_cost.assign(n, refill);
  }
  return prob;
}

CacheVector solve_slot(const SlotProblem& problem) {
  if (!(problem.capacity_bits > 0.0)) {
    fail(ErrorCode::kInfeasibleCapacity, "cache capacity must be positive");
  }
  if (!(problem.fragment_size_bits > 0.0)) {
    fail(ErrorCode::kDomainError, "fragment size must be positive");
  }
  const std::size_t n = problem.linear_coeffs.size();
  const bool segmented = !problem.anchor.empty();
  if (segmented && (problem.anchor.size() != n || problem.raise_cost.size() != n)) {
    fail(ErrorCode::kDimensionMismatch, "anchor / raise cost length mismatch");
  }

  // Each fragment contributes up to two pieces: [0, a_j] at c_j and
  // [a_j, 1] at c_j + r_j. With r_j >= 0 the lower piece always sorts first.
  struct Piece {
    double coeff;
    std::size_t j;
    int part;
    double len;
  };
  std::vector<Piece> pieces;
  pieces.reserve(segmented ? 2 * n : n);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = problem.linear_coeffs[j];
    if (!segmented) {
      pieces.push_back({c, j, 0, 1.0});
      continue;
    }
    const double a = std::clamp(problem.anchor[j], 0.0, 1.0);
    const double r = problem.raise_cost[j];
    if (r < 0.0) fail(ErrorCode::kDomainError, "raise cost must be nonnegative");
    if (a > 0.0) pieces.push_back({c, j, 0, a});
    if (a < 1.0) pieces.push_back({c + r, j, 1, 1.0 - a});
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) {
    if (x.coeff != y.coeff) return x.coeff < y.coeff;
    if (x.j != y.j) return x.j < y.j;
    return x.part < y.part;
  });

  CacheVector out;
  out.capacity_bits = problem.capacity_bits;
  out.q.assign(n, 0.0);
  double room = problem.capacity_bits / problem.fragment_size_bits;
  for (const Piece& p : pieces) {
    if (p.coeff >= 0.0 || room <= 0.0) break;
    const double take = std::min(p.len, room);
    out.q[p.j] += take;
    room -= take;
  }
  for (double& x : out.q) x = std::min(x, 1.0);
  return out;
}

std::vector<double> project_feasible(std::span<const double> q,
                                     double fragment_size_bits,
                                     double capacity_bits) {
  if (!(fragment_size_bits > 0.0) || capacity_bits < 0.0) {
    fail(ErrorCode::kDomainError, "bad projection bounds");
  }
  const double budget = capacity_bits / fragment_size_bits;
  std::vector<double> out(q.size());
  auto fill = [&](double tau) {
    double s = 0.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double v = std::isfinite(q[j]) ? q[j] : 0.0;
      out[j] = std::clamp(v - tau, 0.0, 1.0);
      s += out[j];
    }
    return s;
  };
  if (fill(0.0) <= budget) return out;
  // sum_j clamp(q_j - tau) is nonincreasing in tau; bisect for the budget.
  double lo = 0.0;
  double hi = 1.0;
  for (double v : q) hi = std::max(hi, std::isfinite(v) ? v : 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fill(mid) > budget) lo = mid; else hi = mid;
  }
  const double s = fill(hi);
  if (s > budget && s > 0.0) {
    for (double& x : out) x *= budget / s;
  }
  return out;
}

DiscreteSpace::DiscreteSpace(std::vector<std::vector<double>> points)
    : points_(std::move(points)) {
  if (points_.empty()) fail(ErrorCode::kDomainError, "empty candidate set");
}

std::vector<double> DiscreteSpace::initial() const { return points_.front(); }

std::vector<double> DiscreteSpace::minimize(const QFunction& objective) const {
  std::size_t best = 0;
  double best_val = objective(points_[0]);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double v = objective(points_[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  return points_[best];
}

KnapsackSpace::KnapsackSpace(std::size_t n, double fragment_size_bits,
                             double capacity_bits, std::vector<double> start)
    : n_(n), fragment_size_bits_(fragment_size_bits),
      capacity_bits_(capacity_bits), start_(std::move(start)) {
  if (!(capacity_bits_ > 0.0)) fail(ErrorCode::kInfeasibleCapacity, "cache capacity must be positive");
  if (start_.empty()) start_.assign(n_, 0.0);
  if (start_.size() != n_) fail(ErrorCode::kDimensionMismatch, "start point length");
}

std::vector<double> KnapsackSpace::initial() const { return start_; }

std::vector<double> KnapsackSpace::minimize(const QFunction& objective) const {
  std::vector<double> e(n_, 0.0);
  const double f0 = objective(e);
  SlotProblem prob;
  prob.capacity_bits = capacity_bits_;
  prob.fragment_size_bits = fragment_size_bits_;
  prob.linear_coeffs.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    e[j] = 1.0;
    prob.linear_coeffs[j] = objective(e) - f0;
    e[j] = 0.0;
  }
  return solve_slot(prob).q;
}

DinkelbachResult dinkelbach_solve_static(const QFunction& energy,
                                         const QFunction& throughput,
                                         const QSpace& space, double tol,
                                         int max_iterations) {
  if (!(tol > 0.0)) fail(ErrorCode::kDomainError, "tolerance must be positive");
  auto ratio_at = [&](const std::vector<double>& q, double& p, double& r) {
    p = energy(q);
    r = throughput(q);
    if (!(r > 0.0)) fail(ErrorCode::kDomainError, "throughput must be positive on the feasible set");
  };

  DinkelbachResult res;
  res.q = space.initial();
  ratio_at(res.q, res.energy, res.throughput);
  double eta = res.energy / res.throughput;
  res.eta_history.push_back(eta);

  for (int k = 1; k <= max_iterations; ++k) {
    std::vector<double> q = space.minimize(
        [&](std::span<const double> x) { return energy(x) - eta * throughput(x); });
    double p = 0.0;
    double r = 0.0;
    ratio_at(q, p, r);
    res.iterations = k;
    const double next = p / r;
    if (std::abs(p - eta * r) < tol * r || next >= eta) {
      // At the root, or the minimizer cannot improve on the incumbent
      // anymore (round-off); keep whichever point has the smaller ratio.
      if (next < eta) {
        res.q = std::move(q);
        res.energy = p;
        res.throughput = r;
        eta = next;
        res.eta_history.push_back(eta);
      }
      res.eta = eta;
      return res;
    }
    res.q = std::move(q);
    res.energy = p;
    res.throughput = r;
    eta = next;
    res.eta_history.push_back(eta);
  }
  std::ostringstream os;
  os << "parametric iteration did not converge in " << max_iterations
     << " iterations (eta=" << eta << ")";
  fail(ErrorCode::kNonConvergence, os.str());
}

double diagnostics_bound(double b_estimate, double v, double r_star_estimate) {
  if (!(v > 0.0)) fail(ErrorCode::kDomainError, "V must be positive");
  if (!(r_star_estimate > 0.0)) fail(ErrorCode::kDomainError, "throughput estimate must be positive");
  return b_estimate / (v * r_star_estimate);
}

}  // namespace vcache
