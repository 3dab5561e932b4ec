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

#ifndef VCACHE_OPTIMIZER_HPP
#define VCACHE_OPTIMIZER_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "vcache/catalog.hpp"
#include "vcache/energy.hpp"
#include "vcache/interaction.hpp"
#include "vcache/phy.hpp"

namespace vcache {

/// Per-user delay backlogs H_n with the delay budget they are measured
/// against.
struct VirtualQueues {
  std::vector<double> h;
  double d_av = 0.0;

  double max_backlog() const;
  double total() const;
};

/// max(h_n + d_n - d_av, 0).
double update_virtual_queue(double h_n, double d_n, double d_av);

/// Applies update_virtual_queue to every user and returns 1/2 * sum e_n^2 of
/// the slot's excesses e_n = d_n - d_av.
double update_virtual_queues(VirtualQueues& queues, std::span<const double> delays);

struct EfficiencyTracker {
  double cumulative_energy = 0.0;
  double cumulative_bits = 0.0;
  double eta = 0.0;
};

EfficiencyTracker update_eta(EfficiencyTracker tracker, double slot_energy,
                             double slot_bits);

/// Linear objective sum_j c_j q_j over {0 <= q <= 1, sum_j q_j B <= S_cv}.
///
/// When `anchor` is non-empty every fragment also pays raise_cost[j] per unit
/// of q_j above anchor[j] (cache refills); the objective stays convex and
/// piecewise linear.
struct SlotProblem {
  std::vector<double> linear_coeffs;
  double capacity_bits = 0.0;
  double fragment_size_bits = 0.0;
  double v_param = 0.0;
  std::vector<double> anchor;
  std::vector<double> raise_cost;

  double objective(std::span<const double> q) const;
};

enum class ThroughputModel { kRouted, kBinomial };

/// Everything the per-slot problem is built from. Optional members left
/// empty make build_slot_problem throw MissingState.
struct SlotSnapshot {
  std::span<const double> popularity;
  double fragment_size_bits = 0.0;
  double capacity_bits = 0.0;

  std::vector<SinrPair> sinrs;
  std::optional<ServiceSplit> split;  ///< split the throughput is linearized at
  ThroughputModel throughput_model = ThroughputModel::kRouted;
  double bandwidth_hz = 0.0;

  /// Rates at the current cache (xi = effective meeting rate) and the slope
  /// d xi_eff / dQ = xi_base * cache_proportion.
  std::optional<InteractionRates> rates;
  double xi_gain = 0.0;

  std::optional<EnergyParams> energy;
  const VirtualQueues* queues = nullptr;
  std::optional<double> eta;
  double v_param = 50.0;

  /// Current cache; refills above it cost backhaul energy for each of the
  /// n_caching_vehicles, spread over backhaul_amortization_slots slots.
  std::span<const double> q_current;
  double n_caching_vehicles = 0.0;
  double backhaul_amortization_slots = 1.0;
};

/// Affine slot throughput in the cached popularity mass for the snapshot.
LinearThroughput snapshot_throughput(const SlotSnapshot& snap);

/// Coefficients of sum_n H_n D_n + V (P_tot - eta R_tot) in q, with the delay
/// linearized at the snapshot's rates.
SlotProblem build_slot_problem(const SlotSnapshot& snap);

/// Exact minimizer by greedy fill over ascending coefficients (ties to the
/// lower index). Throws InfeasibleCapacity when S_cv <= 0.
CacheVector solve_slot(const SlotProblem& problem);

/// Euclidean projection onto {0 <= q <= 1, sum_j q_j B <= S_cv}.
std::vector<double> project_feasible(std::span<const double> q,
                                     double fragment_size_bits,
                                     double capacity_bits);

using QFunction = std::function<double(std::span<const double>)>;

/// Feasible set of the static fractional problem.
class QSpace {
 public:
  virtual ~QSpace() = default;
  virtual std::vector<double> initial() const = 0;
  virtual std::vector<double> minimize(const QFunction& objective) const = 0;
};

/// A finite list of candidate vectors, searched exhaustively.
class DiscreteSpace : public QSpace {
 public:
  explicit DiscreteSpace(std::vector<std::vector<double>> points);
  std::vector<double> initial() const override;
  std::vector<double> minimize(const QFunction& objective) const override;

 private:
  std::vector<std::vector<double>> points_;
};

/// The capacity polytope. `minimize` assumes an affine objective, reads its
/// coefficients off the unit vectors and fills greedily.
class KnapsackSpace : public QSpace {
 public:
  KnapsackSpace(std::size_t n, double fragment_size_bits, double capacity_bits,
                std::vector<double> start = {});
  std::vector<double> initial() const override;
  std::vector<double> minimize(const QFunction& objective) const override;

 private:
  std::size_t n_;
  double fragment_size_bits_;
  double capacity_bits_;
  std::vector<double> start_;
};

struct DinkelbachResult {
  std::vector<double> q;
  double eta = 0.0;
  double energy = 0.0;
  double throughput = 0.0;
  std::vector<double> eta_history;
  int iterations = 0;
};

/// Minimizes energy(q) / throughput(q) by the parametric iteration
/// eta <- P(q_k)/R(q_k), q_k = argmin P - eta R. Stops when
/// |P - eta R| < tol * R; NonConvergence after max_iterations.
DinkelbachResult dinkelbach_solve_static(const QFunction& energy,
                                         const QFunction& throughput,
                                         const QSpace& space, double tol,
                                         int max_iterations = 100);

/// Gap term b / (v * r_star) of the drift-plus-penalty efficiency bound.
double diagnostics_bound(double b_estimate, double v, double r_star_estimate);

}  // namespace vcache

#endif  // VCACHE_OPTIMIZER_HPP
