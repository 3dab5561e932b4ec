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

#include "vcache/error.hpp"
#include "vcache/interaction.hpp"

using namespace vcache;

namespace {

// Dense stationary solve of the truncated chain, written independently of
// the library: states (0,0..J) then (1,1..J), Gaussian elimination with
// partial pivoting on pi Q = 0, sum pi = 1.
struct Stationary {
  std::vector<double> p0;
  std::vector<double> p1;  // p1[0] unused
};

Stationary dense_oracle(const InteractionRates& r, int J) {
  const int n = 2 * J + 1;
  auto s0 = [](int j) { return j; };
  auto s1 = [J](int j) { return J + j; };
  std::vector<double> Q(static_cast<std::size_t>(n) * n, 0.0);
  auto add = [&](int a, int b, double rate) {
    Q[a * n + b] += rate;
    Q[a * n + a] -= rate;
  };
  for (int j = 0; j <= J; ++j) {
    if (j < J) add(s0(j), s0(j + 1), r.lambda);
    if (j > 0) add(s0(j), s0(j - 1), j * r.omega);
    if (j > 0 && r.xi > 0.0) add(s0(j), s1(j), r.xi);
  }
  for (int j = 1; j <= J; ++j) {
    if (j < J) add(s1(j), s1(j + 1), r.lambda);
    add(s1(j), j >= 2 ? s1(j - 1) : s0(0), r.nu);
  }
  // Transposed system A x = b, last equation replaced by normalization.
  std::vector<double> A(static_cast<std::size_t>(n) * n);
  std::vector<double> b(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) A[i * n + k] = Q[k * n + i];
  for (int k = 0; k < n; ++k) A[(n - 1) * n + k] = 1.0;
  b[n - 1] = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int i = c + 1; i < n; ++i)
      if (std::abs(A[i * n + c]) > std::abs(A[piv * n + c])) piv = i;
    for (int k = 0; k < n; ++k) std::swap(A[c * n + k], A[piv * n + k]);
    std::swap(b[c], b[piv]);
    for (int i = c + 1; i < n; ++i) {
      const double f = A[i * n + c] / A[c * n + c];
      if (f == 0.0) continue;
      for (int k = c; k < n; ++k) A[i * n + k] -= f * A[c * n + k];
      b[i] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int k = i + 1; k < n; ++k) s -= A[i * n + k] * x[k];
    x[i] = s / A[i * n + i];
  }
  Stationary st;
  st.p0.assign(x.begin(), x.begin() + J + 1);
  st.p1.assign(J + 1, 0.0);
  for (int j = 1; j <= J; ++j) st.p1[j] = x[J + j];
  return st;
}

double mean_k0(const Stationary& s) {
  double m = 0.0;
  for (std::size_t j = 0; j < s.p0.size(); ++j) m += static_cast<double>(j) * s.p0[j];
  return m;
}

double mass_k1(const Stationary& s) {
  double m = 0.0;
  for (double p : s.p1) m += p;
  return m;
}

InteractionRates random_rates(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  InteractionRates r;
  r.lambda = 0.2 + 1.8 * u(rng);
  r.nu = r.lambda * (1.3 + 1.7 * u(rng));
  r.xi = 0.05 + 5.0 * u(rng);
  r.omega = 0.2 + 2.8 * u(rng);
  return r;
}

// Exponential-clock simulation of one user's chain. Returns the occupancy
// estimate T1 / (A0 + T1) after n_requests arrivals.
double simulate_kappa1(const InteractionRates& r, long n_requests, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int k = 0;
  long j = 0;
  long arrivals = 0;
  double t1 = 0.0;
  double a0 = 0.0;
  while (arrivals < n_requests) {
    const double out0 = k == 0 ? j * r.omega + (j > 0 ? r.xi : 0.0) : r.nu;
    const double total = r.lambda + out0;
    const double dt = expo(rng) / total;
    if (k == 1) t1 += dt; else a0 += static_cast<double>(j) * dt;
    double x = u(rng) * total;
    if (x < r.lambda) {
      ++j;
      ++arrivals;
    } else if (k == 1) {
      if (--j == 0) k = 0;
    } else {
      x -= r.lambda;
      if (x < j * r.omega) --j; else k = 1;
    }
  }
  return t1 / (a0 + t1);
}

}  // namespace

TEST_CASE("expected_queue_lengths hand-evaluated cases") {
  const QueueLengths a = expected_queue_lengths({1, 2, 1, 1});
  CHECK(a.e_l0 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(a.e_l1 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const QueueLengths b = expected_queue_lengths({1, 4, 1, 2});
  CHECK(b.e_l0 == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(b.e_l1 == doctest::Approx(0.1).epsilon(1e-12));
  const QueueLengths c = expected_queue_lengths({1, 2, 1e-12, 1});
  CHECK(c.e_l1 < 1e-11);
  CHECK(expected_queue_lengths({1, 2, 0, 1}).e_l1 == 0.0);
}

TEST_CASE("unstable or invalid rates are rejected") {
  auto code_of = [](const InteractionRates& r) {
    try {
      (void)expected_queue_lengths(r);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kOk;
  };
  CHECK(code_of({3, 2, 1, 1}) == ErrorCode::kStabilityViolation);
  CHECK(code_of({2, 2, 1, 1}) == ErrorCode::kStabilityViolation);
  CHECK(code_of({0, 2, 1, 1}) == ErrorCode::kDomainError);
  CHECK(code_of({1, 2, -1, 1}) == ErrorCode::kDomainError);
  CHECK(code_of({1, 2, 1, std::nan("")}) == ErrorCode::kDomainError);
  CHECK_FALSE(InteractionRates{3, 2, 1, 1}.stable());
  CHECK(InteractionRates{1, 2, 1, 1}.stable());
}

TEST_CASE("service_split hand-evaluated cases") {
  CHECK(service_split({1, 2, 1, 1}).kappa1 == doctest::Approx(0.5).epsilon(1e-12));
  for (double w : {0.3, 2.0, 7.0}) {
    CHECK(service_split({1, 4, 1, w}).kappa1 == doctest::Approx(0.25).epsilon(1e-12));
  }
  const ServiceSplit s = service_split({1, 2, 1e-12, 1});
  CHECK(s.kappa1 < 1e-11);
  CHECK(s.kappa0 == doctest::Approx(1.0));
}

TEST_CASE("served_count_pmf hand-evaluated cases") {
  CHECK(served_count_pmf(2, 0.5, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(served_count_pmf(10, 0.0, 0) == 1.0);
  CHECK(served_count_pmf(3, 1.0, 3) == 1.0);
  CHECK(served_count_pmf(3, 1.0, 2) == 0.0);
}

TEST_CASE("truncated chain cases") {
  const TruncatedChain a = solve_truncated_chain({1, 2, 1, 1}, 200);
  CHECK(a.mean_queue_k0() == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(a.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(a.p1[0] == 0.0);
  for (double p : a.p0) CHECK((p >= 0.0 && p <= 1.0));
  for (double p : a.p1) CHECK((p >= 0.0 && p <= 1.0));

  const InteractionRates r{0.1, 5, 2, 1};
  const TruncatedChain b = solve_truncated_chain(r, 50);
  const double kappa = b.mass_k1() / (b.mean_queue_k0() + b.mass_k1());
  CHECK(kappa == doctest::Approx(2.0 / 6.9).epsilon(1e-6));
}

TEST_CASE("closed forms agree with an independent dense stationary solve") {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 100; ++i) {
    const InteractionRates r = random_rates(rng);
    const Stationary st = dense_oracle(r, 150);
    const QueueLengths l = expected_queue_lengths(r);
    CAPTURE(r.lambda);
    CAPTURE(r.nu);
    CAPTURE(r.xi);
    CAPTURE(r.omega);
    CHECK(std::abs(l.e_l0 - mean_k0(st)) <= 1e-6 * l.e_l0);
    CHECK(std::abs(l.e_l1 - mass_k1(st)) <= 1e-6 * l.e_l1);
    const TruncatedChain c = solve_chain_auto(r);
    CHECK(c.mean_queue_k0() == doctest::Approx(mean_k0(st)).epsilon(1e-6));
    CHECK(c.mass_k1() == doctest::Approx(mass_k1(st)).epsilon(1e-6));
  }
}

TEST_CASE("split is independent of omega and monotone in xi and nu") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int i = 0; i < 200; ++i) {
    InteractionRates r = random_rates(rng);
    const double k1 = service_split(r).kappa1;
    InteractionRates w = r;
    w.omega = u(rng);
    CHECK(std::abs(service_split(w).kappa1 - k1) <= 1e-12);
    InteractionRates x = r;
    x.xi *= 1.1;
    CHECK(service_split(x).kappa1 > k1);
    InteractionRates n = r;
    n.nu *= 1.1;
    CHECK(service_split(n).kappa1 < k1);
    CHECK(service_split(r).kappa0 + k1 == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("served_count_pmf sums to one") {
  for (std::size_t n_users : {0u, 1u, 7u, 60u}) {
    for (double kappa : {0.0, 0.13, 0.5, 0.91, 1.0}) {
      double s = 0.0;
      for (std::size_t n = 0; n <= n_users; ++n) s += served_count_pmf(n_users, kappa, n);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("simulated occupancy matches kappa1 at 1e6 requests") {
  const InteractionRates sets[] = {{1, 2, 1, 1}, {0.5, 3, 2, 0.4}, {2, 3, 0.7, 1.5}};
  std::uint64_t seed = 1;
  for (const InteractionRates& r : sets) {
    const double expect = r.xi / (r.xi + r.nu - r.lambda);
    CHECK(std::abs(simulate_kappa1(r, 1000000, seed++) - expect) <= 0.02);
  }
}

TEST_CASE("effective_meeting_rate cases") {
  const std::vector<double> p{0.5, 0.5};
  CHECK(effective_meeting_rate(2.0, std::vector<double>{1, 0}, p, 0.5) ==
        doctest::Approx(0.5));
  CHECK(effective_meeting_rate(3.0, std::vector<double>{1, 1}, p, 1.0) ==
        doctest::Approx(3.0));
  CHECK(effective_meeting_rate(3.0, std::vector<double>{0, 0}, p, 1.0) == 0.0);
  CHECK_THROWS_AS(effective_meeting_rate(1.0, std::vector<double>{1}, p, 0.5), Error);
}

TEST_CASE("expected delay and its xi slope") {
  const InteractionRates r{1, 3, 2, 0.5};
  const QueueLengths l = expected_queue_lengths(r);
  CHECK(expected_delay(r) == doctest::Approx((l.e_l0 + l.e_l1) / r.lambda).epsilon(1e-12));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    InteractionRates a = random_rates(rng);
    const double h = 1e-6 * (1.0 + a.xi);
    InteractionRates lo = a;
    InteractionRates hi = a;
    lo.xi -= h;
    hi.xi += h;
    const double fd = (expected_delay(hi) - expected_delay(lo)) / (2.0 * h);
    CHECK(expected_delay_slope_xi(a) == doctest::Approx(fd).epsilon(1e-5));
  }
}
