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

#include "vcache/interaction.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>

#include "vcache/error.hpp"

namespace vcache {

namespace {

double denominator(const InteractionRates& r) {
  return r.nu * r.omega + r.nu * r.xi - r.lambda * r.omega;
}

void require_stable(const InteractionRates& r) {
  r.validate();
  if (!r.stable()) {
    std::ostringstream os;
    os << "unstable rates: lambda=" << r.lambda << " nu=" << r.nu
       << " xi=" << r.xi << " omega=" << r.omega
       << " (need lambda < nu and nu*omega + nu*xi - lambda*omega > 0)";
    fail(ErrorCode::kStabilityViolation, os.str());
  }
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void InteractionRates::validate() const {
  if (!positive_finite(lambda) || !positive_finite(nu) ||
      !positive_finite(omega) || !std::isfinite(xi) || xi < 0.0) {
    std::ostringstream os;
    os << "invalid interaction rates: lambda=" << lambda << " nu=" << nu
       << " xi=" << xi << " omega=" << omega;
    fail(ErrorCode::kDomainError, os.str());
  }
}

bool InteractionRates::stable() const noexcept {
  return denominator(*this) > 0.0 && lambda < nu;
}

QueueLengths expected_queue_lengths(const InteractionRates& rates) {
  require_stable(rates);
  const double d = denominator(rates);
  return {(rates.lambda * rates.nu - rates.lambda * rates.lambda) / d,
          rates.xi * rates.lambda / d};
}

ServiceSplit service_split(const InteractionRates& rates) {
  const QueueLengths l = expected_queue_lengths(rates);
  ServiceSplit s;
  s.e_l0 = l.e_l0;
  s.e_l1 = l.e_l1;
  const double total = l.e_l0 + l.e_l1;
  s.kappa1 = total > 0.0 ? l.e_l1 / total : 0.0;
  s.kappa0 = 1.0 - s.kappa1;
  return s;
}

double served_count_pmf(std::size_t n_users, double kappa, std::size_t n) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    fail(ErrorCode::kDomainError, "kappa outside [0,1]");
  }
  if (n > n_users) {
    fail(ErrorCode::kDomainError, "served count exceeds number of users");
  }
  if (kappa == 0.0) return n == 0 ? 1.0 : 0.0;
  if (kappa == 1.0) return n == n_users ? 1.0 : 0.0;
  const double nu = static_cast<double>(n_users);
  const double k = static_cast<double>(n);
  const double log_choose =
      std::lgamma(nu + 1.0) - std::lgamma(k + 1.0) - std::lgamma(nu - k + 1.0);
  return std::exp(log_choose + k * std::log(kappa) +
                  (nu - k) * std::log1p(-kappa));
}

double TruncatedChain::mean_queue_k0() const {
  double s = 0.0;
  for (std::size_t j = 0; j < p0.size(); ++j) s += static_cast<double>(j) * p0[j];
  return s;
}

double TruncatedChain::mass_k1() const {
  double s = 0.0;
  for (double v : p1) s += v;
  return s;
}

double TruncatedChain::mean_queue_k1() const {
  double s = 0.0;
  for (std::size_t j = 0; j < p1.size(); ++j) s += static_cast<double>(j) * p1[j];
  return s;
}

double TruncatedChain::tail_mass() const {
  return p0.empty() ? 0.0 : p0.back() + p1.back();
}

double TruncatedChain::total_mass() const {
  double s = 0.0;
  for (double v : p0) s += v;
  return s + mass_k1();
}

double TruncatedChain::max_interior_residual(const InteractionRates& r) const {
  const double lam = r.lambda, nu = r.nu, xi = r.xi, om = r.omega;
  double worst = 0.0;
  auto track = [&worst](double v) { worst = std::max(worst, std::abs(v)); };
  // K = 1
  track((lam + nu) * p1[1] - (nu * p1[2] + xi * p0[1]));
  for (std::size_t n = 2; n < j_max; ++n) {
    track((lam + nu) * p1[n] -
          (lam * p1[n - 1] + nu * p1[n + 1] + xi * p0[n]));
  }
  // K = 0
  track(lam * p0[0] - (nu * p1[1] + om * p0[1]));
  for (std::size_t n = 1; n < j_max; ++n) {
    const double dn = static_cast<double>(n);
    track((lam + dn * om + xi) * p0[n] -
          (lam * p0[n - 1] + (dn + 1.0) * om * p0[n + 1]));
  }
  return worst;
}

TruncatedChain solve_truncated_chain(const InteractionRates& rates,
                                     std::size_t j_max) {
  require_stable(rates);
  if (j_max < 10) {
    fail(ErrorCode::kDomainError, "j_max must be at least 10");
  }
  const std::size_t jm = j_max;
  // (0, j) -> j for j in [0, jm]; (1, j) -> jm + j for j in [1, jm].
  const auto n_states = static_cast<Eigen::Index>(2 * jm + 1);
  auto s0 = [](std::size_t j) { return static_cast<Eigen::Index>(j); };
  auto s1 = [jm](std::size_t j) { return static_cast<Eigen::Index>(jm + j); };

  // Transposed generator: row = destination, column = source.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(8 * jm + 8);
  std::vector<double> out_rate(static_cast<std::size_t>(n_states), 0.0);
  auto add = [&](Eigen::Index from, Eigen::Index to, double rate) {
    if (rate == 0.0) return;
    trips.emplace_back(to, from, rate);
    out_rate[static_cast<std::size_t>(from)] += rate;
  };
  for (std::size_t j = 0; j <= jm; ++j) {
    if (j < jm) add(s0(j), s0(j + 1), rates.lambda);
    if (j >= 1) {
      add(s0(j), s0(j - 1), static_cast<double>(j) * rates.omega);
      add(s0(j), s1(j), rates.xi);
    }
  }
  for (std::size_t j = 1; j <= jm; ++j) {
    if (j < jm) add(s1(j), s1(j + 1), rates.lambda);
    add(s1(j), j >= 2 ? s1(j - 1) : s0(0), rates.nu);
  }
  for (Eigen::Index i = 0; i < n_states; ++i) {
    trips.emplace_back(i, i, -out_rate[static_cast<std::size_t>(i)]);
  }
  // Replace the last balance equation with the normalization row.
  const Eigen::Index last = n_states - 1;
  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(trips.size() + static_cast<std::size_t>(n_states));
  for (const auto& t : trips) {
    if (t.row() != last) kept.push_back(t);
  }
  for (Eigen::Index i = 0; i < n_states; ++i) kept.emplace_back(last, i, 1.0);

  Eigen::SparseMatrix<double> a(n_states, n_states);
  a.setFromTriplets(kept.begin(), kept.end());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n_states);
  b(last) = 1.0;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    fail(ErrorCode::kSingularSystem, "truncated generator factorization failed");
  }
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    fail(ErrorCode::kSingularSystem, "truncated generator solve failed");
  }

  TruncatedChain chain;
  chain.j_max = jm;
  chain.p0.assign(jm + 1, 0.0);
  chain.p1.assign(jm + 1, 0.0);
  for (std::size_t j = 0; j <= jm; ++j) chain.p0[j] = std::max(0.0, x(s0(j)));
  for (std::size_t j = 1; j <= jm; ++j) chain.p1[j] = std::max(0.0, x(s1(j)));
  const double total = chain.total_mass();
  for (double& v : chain.p0) v /= total;
  for (double& v : chain.p1) v /= total;

  if (chain.tail_mass() >= 1e-8) {
    std::ostringstream os;
    os << "tail mass " << chain.tail_mass() << " at j_max=" << jm;
    fail(ErrorCode::kTruncationInsufficient, os.str());
  }
  return chain;
}

TruncatedChain solve_chain_auto(const InteractionRates& rates,
                                std::size_t j_start, std::size_t j_limit) {
  std::size_t j = std::max<std::size_t>(j_start, 10);
  for (;;) {
    try {
      return solve_truncated_chain(rates, j);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTruncationInsufficient || j >= j_limit) throw;
    }
    j *= 2;
  }
}

double effective_meeting_rate(double xi_base, std::span<const double> q,
                              std::span<const double> popularity,
                              double cache_proportion) {
  if (q.size() != popularity.size()) {
    fail(ErrorCode::kDimensionMismatch,
         "cache vector and popularity have different lengths");
  }
  if (!(cache_proportion >= 0.0 && cache_proportion <= 1.0)) {
    fail(ErrorCode::kDomainError, "cache proportion outside [0,1]");
  }
  double mass = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) mass += popularity[j] * q[j];
  return xi_base * cache_proportion * mass;
}

double vehicle_request_fraction(const InteractionRates& rates) {
  const QueueLengths l = expected_queue_lengths(rates);
  return 1.0 - rates.omega * l.e_l0 / rates.lambda;
}

double expected_delay(const InteractionRates& rates) {
  const QueueLengths l = expected_queue_lengths(rates);
  return (l.e_l0 + l.e_l1) / rates.lambda;
}

double expected_delay_slope_xi(const InteractionRates& rates) {
  require_stable(rates);
  const double d = denominator(rates);
  return (rates.nu - rates.lambda) * (rates.omega - rates.nu) / (d * d);
}

}  // namespace vcache
