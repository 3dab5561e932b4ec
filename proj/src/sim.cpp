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

#include "vcache/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "vcache/error.hpp"

namespace vcache {

const char* to_string(Policy p) noexcept {
  switch (p) {
    case Policy::kOnline: return "online";
    case Policy::kOffline: return "offline";
    case Policy::kNone: return "none";
  }
  return "?";
}

std::optional<Policy> parse_policy(const std::string& s) {
  if (s == "online") return Policy::kOnline;
  if (s == "offline") return Policy::kOffline;
  if (s == "none") return Policy::kNone;
  return std::nullopt;
}

double ScenarioConfig::capacity_bits() const {
  return normalized_capacity * static_cast<double>(n_fragments) * fragment_size_bits;
}

double ScenarioConfig::delay_budget() const { return 1.0 / rates.omega; }

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  fail(ErrorCode::kValidationError, field + ": " + why);
}

void check_nonneg(const std::string& field, double v) {
  if (!std::isfinite(v) || v < 0.0) invalid(field, "must be finite and nonnegative");
}

void check_pos(const std::string& field, double v) {
  if (!std::isfinite(v) || v <= 0.0) invalid(field, "must be finite and positive");
}

}  // namespace

void ScenarioConfig::validate() const {
  check_nonneg("user_intensity", user_intensity);
  check_nonneg("vehicle_count_mean", vehicle_count_mean);
  if (!(cache_proportion >= 0.0 && cache_proportion <= 1.0)) {
    invalid("cache_proportion", "must lie in [0, 1]");
  }
  if (!(normalized_capacity > 0.0 && normalized_capacity <= 1.0)) {
    invalid("normalized_capacity", "must lie in (0, 1]");
  }
  check_pos("rates.lambda", rates.lambda);
  check_pos("rates.nu", rates.nu);
  check_pos("rates.omega", rates.omega);
  check_nonneg("rates.xi", rates.xi);
  if (fixed_xi_eff) check_nonneg("fixed_xi_eff", *fixed_xi_eff);
  if (n_fragments == 0) invalid("catalog.n_fragments", "must be at least 1");
  check_pos("catalog.fragment_size_bits", fragment_size_bits);
  check_nonneg("catalog.zipf_exponent", zipf_exponent);
  if (drift.interval_slots > 0 && drift.hot_ranks == 0) {
    invalid("drift.hot_ranks", "must be at least 1 when drift is enabled");
  }
  check_pos("radio.p_mbs_tx_w", radio.p_mbs_tx_w);
  check_pos("radio.p_veh_tx_w", radio.p_veh_tx_w);
  check_pos("radio.noise_power_w", radio.noise_power_w);
  check_pos("radio.bandwidth_hz", radio.bandwidth_hz);
  if (!(radio.pathloss_exponent >= 2.0) || !std::isfinite(radio.pathloss_exponent)) {
    invalid("radio.pathloss_exponent", "must be at least 2");
  }
  check_pos("radio.reference_gain", radio.reference_gain);
  check_pos("radio.d2d_range_m", radio.d2d_range_m);
  check_pos("radio.cell_radius_m", radio.cell_radius_m);
  check_pos("radio.min_distance_m", radio.min_distance_m);
  if (road_lanes == 0) invalid("road.lanes", "must be at least 1");
  check_nonneg("road.lane_spacing_m", lane_spacing_m);
  if (lane_spacing_m * 0.5 * static_cast<double>(road_lanes) >= radio.cell_radius_m) {
    invalid("road.lane_spacing_m", "road does not fit inside the cell");
  }
  check_pos("energy.mbs_rate_energy", energy.mbs_rate_energy);
  check_pos("energy.cache_rate_energy", energy.cache_rate_energy);
  check_pos("energy.amplifier_factor", energy.amplifier_factor);
  check_pos("energy.slot_seconds", energy.slot_seconds);
  check_pos("energy.backhaul_amortization_slots", backhaul_amortization_slots);
  if (offline_update_interval_slots == 0) {
    invalid("offline_update_interval_slots", "must be at least 1");
  }
  check_nonneg("v_param", v_param);
  if (n_slots == 0) invalid("n_slots", "must be at least 1");
}

std::vector<Point> place_users(std::size_t count, double radius, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts(count);
  for (Point& p : pts) {
    const double r = radius * std::sqrt(u(rng));
    const double a = 2.0 * std::numbers::pi * u(rng);
    p = {r * std::cos(a), r * std::sin(a)};
  }
  return pts;
}

std::vector<Point> spawn_users(double intensity, double radius, Rng& rng) {
  if (!(intensity >= 0.0)) fail(ErrorCode::kDomainError, "negative user intensity");
  std::size_t n = 0;
  if (intensity > 0.0) n = std::poisson_distribution<std::size_t>(intensity)(rng);
  return place_users(n, radius, rng);
}

void place_vehicles(std::vector<Vehicle>& fleet, double radius, std::size_t lanes,
                    double lane_spacing_m, Rng& rng) {
  if (lanes == 0) return;
  std::uniform_int_distribution<std::size_t> lane(0, lanes - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Vehicle& v : fleet) {
    // lanes centred on the x axis, e.g. y = -7.5, -2.5, 2.5, 7.5 for four
    const double y = (static_cast<double>(lane(rng)) -
                      0.5 * static_cast<double>(lanes - 1)) * lane_spacing_m;
    const double half = std::sqrt(std::max(radius * radius - y * y, 0.0));
    v.pos = {half * u(rng), y};
  }
}

std::vector<Vehicle> spawn_vehicles(double mean_count, double cache_proportion,
                                    double radius, std::size_t lanes,
                                    double lane_spacing_m, Rng& rng) {
  if (!(mean_count >= 0.0)) fail(ErrorCode::kDomainError, "negative vehicle mean");
  if (!(cache_proportion >= 0.0 && cache_proportion <= 1.0)) {
    fail(ErrorCode::kDomainError, "cache proportion outside [0,1]");
  }
  std::size_t n = 0;
  if (mean_count > 0.0) n = std::poisson_distribution<std::size_t>(mean_count)(rng);
  std::vector<Vehicle> fleet(n);
  std::bernoulli_distribution flag(cache_proportion);
  for (Vehicle& v : fleet) v.caching = flag(rng);
  place_vehicles(fleet, radius, lanes, lane_spacing_m, rng);
  return fleet;
}

double top_fill_mass(std::span<const double> popularity, double capacity_fragments) {
  std::vector<double> p(popularity.begin(), popularity.end());
  std::sort(p.begin(), p.end(), std::greater<>());
  double room = capacity_fragments;
  double mass = 0.0;
  for (double x : p) {
    if (room <= 0.0) break;
    const double take = std::min(1.0, room);
    mass += take * x;
    room -= take;
  }
  return mass;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t master, std::uint64_t replicate) {
  std::uint64_t s = master;
  s = splitmix64(s) ^ (replicate * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
  return splitmix64(s);
}

namespace {

struct Request {
  std::uint32_t fragment;
  double arrival;
};

struct UserChain {
  bool vehicle_mode = false;
  std::size_t vehicle = 0;  // index into the caching vehicles
  std::deque<Request> queue;
};

// Copies of fragments held by each caching vehicle. Vehicle caches are drawn
// from q by systematic sampling with a fixed per-vehicle offset, so every
// fragment j sits in a vehicle with probability q_j and small changes of q
// move few copies.
class FleetCache {
 public:
  FleetCache(std::size_t n_vehicles, std::size_t n_fragments, Rng& rng)
      : n_f_(n_fragments), offset_(n_vehicles),
        held_(n_vehicles * n_fragments, 0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& o : offset_) o = u(rng);
  }

  std::size_t vehicles() const { return offset_.size(); }
  bool holds(std::size_t v, std::size_t j) const { return held_[v * n_f_ + j] != 0; }
  const std::uint8_t* row(std::size_t v) const { return held_.data() + v * n_f_; }
  bool empty() const { return copies_ == 0; }

  /// Realizes q and returns the number of newly placed copies.
  std::size_t realize(std::span<const double> q) {
    std::size_t added = 0;
    copies_ = 0;
    for (std::size_t v = 0; v < offset_.size(); ++v) {
      const double u = offset_[v];
      double cum = 0.0;
      std::uint8_t* h = held_.data() + v * n_f_;
      for (std::size_t j = 0; j < n_f_; ++j) {
        const double lo = cum;
        cum += q[j];
        const bool in = std::floor(cum - u) > std::floor(lo - u);
        if (in && !h[j]) ++added;
        h[j] = in ? 1 : 0;
        copies_ += in ? 1 : 0;
      }
    }
    return added;
  }

 private:
  std::size_t n_f_;
  std::vector<double> offset_;
  std::vector<std::uint8_t> held_;
  std::size_t copies_ = 0;
};

// Cache utilization over sliding windows of `window` slots: for every window
// [t - L, t) lying inside the episode, count the copies held at some point of
// the window and those that served a hit in it. Tracked per copy from its
// holding interval and access times, so all windows are covered exactly.
class UtilizationMeter {
 public:
  UtilizationMeter(std::size_t n_vehicles, std::size_t n_fragments,
                   std::int64_t window, std::int64_t n_slots)
      : n_f_(n_fragments), L_(window), K_(n_slots),
        hold_start_(n_vehicles * n_fragments, -1),
        last_access_(n_vehicles * n_fragments, -1) {}

  /// Copies present in slot `slot` after the cache decision.
  void update_holdings(const FleetCache& cache, std::int64_t slot) {
    const std::uint8_t* held = cache.row(0);
    for (std::size_t i = 0; i < hold_start_.size(); ++i) {
      if (held[i] && hold_start_[i] < 0) {
        hold_start_[i] = slot;
        last_access_[i] = -1;
      } else if (!held[i] && hold_start_[i] >= 0) {
        release(i, slot - 1);
      }
    }
  }

  void access(std::size_t v, std::size_t j, std::int64_t slot) {
    const std::size_t i = v * n_f_ + j;
    const std::int64_t prev = last_access_[i];
    if (prev == slot) return;
    // windows ending at t in [slot+1, slot+L], minus those already credited
    std::int64_t lo = slot + 1;
    if (prev >= 0) lo = std::max(lo, prev + L_ + 1);
    used_ += clipped(lo, slot + L_);
    last_access_[i] = slot;
  }

  void finish() {
    for (std::size_t i = 0; i < hold_start_.size(); ++i) {
      if (hold_start_[i] >= 0) release(i, K_ - 1);
    }
  }

  double value() const { return held_ > 0.0 ? used_ / held_ : 0.0; }

 private:
  // Number of window ends t in [lo, hi] with L <= t <= K.
  double clipped(std::int64_t lo, std::int64_t hi) const {
    lo = std::max(lo, L_);
    hi = std::min(hi, K_);
    return hi >= lo ? static_cast<double>(hi - lo + 1) : 0.0;
  }

  void release(std::size_t i, std::int64_t last_slot) {
    held_ += clipped(hold_start_[i] + 1, last_slot + L_);
    hold_start_[i] = -1;
  }

  std::size_t n_f_;
  std::int64_t L_;
  std::int64_t K_;
  std::vector<std::int64_t> hold_start_;
  std::vector<std::int64_t> last_access_;
  double held_ = 0.0;
  double used_ = 0.0;
};

class Popularity {
 public:
  Popularity(std::size_t n, double phi)
      : zipf_(zipf_popularity(n, phi)), rank_frag_(n), p_(zipf_) {
    std::iota(rank_frag_.begin(), rank_frag_.end(), std::uint32_t{0});
    rebuild();
  }

  const std::vector<double>& p() const { return p_; }

  void drift(const DriftParams& d, Rng& rng) {
    const std::size_t n = rank_frag_.size();
    std::uniform_int_distribution<std::size_t> hot(0, std::min(d.hot_ranks, n) - 1);
    std::uniform_int_distribution<std::size_t> any(0, n - 1);
    for (std::size_t s = 0; s < d.swaps; ++s) {
      const std::size_t a = hot(rng);
      const std::size_t b = any(rng);
      std::swap(rank_frag_[a], rank_frag_[b]);
      p_[rank_frag_[a]] = zipf_[a];
      p_[rank_frag_[b]] = zipf_[b];
    }
    rebuild();
  }

  std::uint32_t sample(Rng& rng) { return static_cast<std::uint32_t>(sampler_(rng)); }

 private:
  void rebuild() { sampler_ = std::discrete_distribution<std::size_t>(p_.begin(), p_.end()); }

  std::vector<double> zipf_;
  std::vector<std::uint32_t> rank_frag_;
  std::vector<double> p_;
  std::discrete_distribution<std::size_t> sampler_;
};

double cached_mass(std::span<const double> q, std::span<const double> p) {
  double m = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) m += q[j] * p[j];
  return m;
}

class Episode {
 public:
  // Independent streams for the population, the popularity churn and the
  // slot dynamics, so paired seeds see the same fleet and the same popularity
  // path whatever the policy or swept parameter.
  explicit Episode(const ScenarioConfig& cfg)
      : cfg_(cfg), pop_(cfg.n_fragments, cfg.zipf_exponent) {
    std::uint64_t s = cfg.rng_seed;
    population_rng_.seed(splitmix64(s));
    drift_rng_.seed(splitmix64(s));
    rng_.seed(splitmix64(s));
  }

  EpisodeMetrics run();

 private:
  void draw_geometry();
  double base_xi(double mass) const;
  ServiceSplit reference_split() const;
  SlotSnapshot snapshot(const std::vector<double>& q_now) const;
  void decide(std::size_t slot);
  void simulate_users(std::size_t slot);
  void account(std::size_t slot);

  const ScenarioConfig& cfg_;
  Rng population_rng_;
  Rng drift_rng_;
  Rng rng_;
  Popularity pop_;
  EpisodeMetrics m_;

  std::vector<UserChain> users_;
  std::vector<Vehicle> fleet_;
  std::vector<std::size_t> caching_;  // fleet indices of caching vehicles
  double caching_share_ = 0.0;
  std::vector<Point> user_pos_;

  LinkState link_;
  std::vector<std::size_t> reuse_pairs_;
  std::vector<SinrPair> sinrs_;
  std::vector<double> novc_log_;

  std::vector<double> q_;
  std::optional<FleetCache> cache_;
  std::optional<UtilizationMeter> util_;
  double slot_backhaul_bits_ = 0.0;
  bool holdings_changed_ = false;
  double slot_objective_ = 0.0;

  VirtualQueues queues_;
  EfficiencyTracker tracker_;
  double xi_eff_ = 0.0;

  // per-slot counters
  std::uint64_t slot_resolved_ = 0;
  std::uint64_t slot_hits_ = 0;
  std::vector<double> sojourn_sum_;
  std::vector<std::uint32_t> sojourn_n_;

  double t1_ = 0.0;
  double a0_ = 0.0;
  double sojourn_total_ = 0.0;
  double delay_sum_ = 0.0;
  double b_sum_ = 0.0;
  double mass_sum_ = 0.0;
};

double Episode::base_xi(double mass) const {
  if (cfg_.fixed_xi_eff) return *cfg_.fixed_xi_eff;
  if (caching_.empty()) return 0.0;
  return cfg_.rates.xi * caching_share_ * mass;
}

ServiceSplit Episode::reference_split() const {
  // Linearization point: the mass a full cache of the currently most popular
  // fragments would reach. At q = 0 the exact slope of kappa1(q) * Q is zero
  // and would never let a cache start filling.
  const double cap = cfg_.capacity_bits() / cfg_.fragment_size_bits;
  InteractionRates r = cfg_.rates;
  r.xi = base_xi(top_fill_mass(pop_.p(), cap));
  return service_split(r);
}

void Episode::draw_geometry() {
  const RadioParams& radio = cfg_.radio;
  user_pos_ = place_users(users_.size(), radio.cell_radius_m, rng_);
  place_vehicles(fleet_, radio.cell_radius_m, cfg_.road_lanes, cfg_.lane_spacing_m, rng_);

  for (std::size_t i : reuse_pairs_) {
    link_.reuse[i] = 0;
    link_.gain_veh_to_user[i] = 0.0;
    link_.veh_user_distance_m[i] = 0.0;
  }
  reuse_pairs_.clear();
  const std::size_t nu = users_.size();
  for (std::size_t k = 0; k < nu; ++k) {
    link_.gain_mbs_to_user[k] = channel_gain(std::hypot(user_pos_[k].x, user_pos_[k].y), radio);
  }
  const bool active = cfg_.policy != Policy::kNone && nu > 0;
  if (active) {
    // every caching vehicle reuses one random downlink channel
    std::uniform_int_distribution<std::size_t> pick(0, nu - 1);
    for (std::size_t v : caching_) {
      const std::size_t k = pick(rng_);
      const std::size_t i = link_.pair(v, k);
      const double d = distance(fleet_[v].pos, user_pos_[k]);
      link_.reuse[i] = 1;
      link_.gain_veh_to_user[i] = channel_gain(d, radio);
      link_.veh_user_distance_m[i] = d;
      reuse_pairs_.push_back(i);
    }
  }

  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t k = 0; k < nu; ++k) {
    const double clean = radio.p_mbs_tx_w * link_.gain_mbs_to_user[k] / radio.noise_power_w;
    novc_log_[k] = std::log2(1.0 + clean);
    if (!active) {
      sinrs_[k] = {clean, 0.0};
      continue;
    }
    // the serving vehicle is somewhere inside the user's D2D disk
    const double r = std::max(radio.d2d_range_m * std::sqrt(u(rng_)), radio.min_distance_m);
    const double sig = radio.p_veh_tx_w * channel_gain(r, radio);
    sinrs_[k] = {sinr_mbs_user(k, link_, radio), sinr_d2d_signal(sig, k, link_, radio)};
  }
}

SlotSnapshot Episode::snapshot(const std::vector<double>& q_now) const {
  SlotSnapshot s;
  s.popularity = pop_.p();
  s.fragment_size_bits = cfg_.fragment_size_bits;
  s.capacity_bits = cfg_.capacity_bits();
  s.sinrs = sinrs_;
  s.split = reference_split();
  s.throughput_model = cfg_.throughput_model;
  s.bandwidth_hz = cfg_.radio.bandwidth_hz;
  InteractionRates r = cfg_.rates;
  r.xi = base_xi(cached_mass(q_now, pop_.p()));
  s.rates = r;
  s.xi_gain = cfg_.fixed_xi_eff || caching_.empty() ? 0.0 : cfg_.rates.xi * caching_share_;
  s.energy = cfg_.energy;
  s.queues = &queues_;
  s.eta = tracker_.eta;
  s.v_param = cfg_.v_param;
  s.q_current = q_now;
  s.n_caching_vehicles = static_cast<double>(caching_.size());
  s.backhaul_amortization_slots = cfg_.backhaul_amortization_slots;
  return s;
}

void Episode::decide(std::size_t slot) {
  slot_backhaul_bits_ = 0.0;
  slot_objective_ = 0.0;
  if (cfg_.policy == Policy::kNone || caching_.empty() || users_.empty()) return;

  std::vector<double> next;
  if (cfg_.policy == Policy::kOnline) {
    const SlotProblem prob = build_slot_problem(snapshot(q_));
    next = solve_slot(prob).q;
    slot_objective_ = prob.objective(next);
  } else {
    if (slot % cfg_.offline_update_interval_slots != 0) return;
    SlotSnapshot snap = snapshot(q_);
    const LinearThroughput tp = snapshot_throughput(snap);
    const EnergyParams& en = cfg_.energy;
    const std::vector<double> p = pop_.p();
    const double tx = en.amplifier_factor * cfg_.radio.p_veh_tx_w * en.slot_seconds;
    const double refill = en.mbs_rate_energy * cfg_.fragment_size_bits *
                          static_cast<double>(caching_.size()) /
                          static_cast<double>(cfg_.offline_update_interval_slots);
    auto energy = [&](std::span<const double> q) {
      const double mass = cached_mass(q, p);
      double e = en.mbs_rate_energy * tp.mbs(mass) + en.cache_rate_energy * tp.veh(mass) + tx;
      if (en.backhaul_per_served_bit) e += en.mbs_rate_energy * tp.veh(mass);
      else e += refill * std::accumulate(q.begin(), q.end(), 0.0);
      return e;
    };
    auto bits = [&](std::span<const double> q) { return tp.total(cached_mass(q, p)); };
    if (!(bits(q_) > 0.0)) return;
    KnapsackSpace space(p.size(), cfg_.fragment_size_bits, cfg_.capacity_bits(), q_);
    DinkelbachResult res = dinkelbach_solve_static(energy, bits, space, 1e-12);
    next = std::move(res.q);
    slot_objective_ = res.eta;
  }
  if (next != q_) {
    q_ = std::move(next);
    const std::size_t added = cache_->realize(q_);
    slot_backhaul_bits_ = static_cast<double>(added) * cfg_.fragment_size_bits;
    holdings_changed_ = true;
  }
}

void Episode::simulate_users(std::size_t slot) {
  const InteractionRates& r = cfg_.rates;
  const double T = cfg_.energy.slot_seconds;
  const double start = static_cast<double>(slot) * T;
  xi_eff_ = base_xi(cached_mass(q_, pop_.p()));
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n_cache = caching_.size();

  slot_resolved_ = 0;
  slot_hits_ = 0;
  for (std::size_t n = 0; n < users_.size(); ++n) {
    UserChain& uc = users_[n];
    sojourn_sum_[n] = 0.0;
    sojourn_n_[n] = 0;
    double t = 0.0;
    for (;;) {
      const double j = static_cast<double>(uc.queue.size());
      const double contact = (!uc.vehicle_mode && j > 0.0) ? xi_eff_ : 0.0;
      const double expiry = uc.vehicle_mode ? 0.0 : j * r.omega;
      const double service = uc.vehicle_mode ? r.nu : 0.0;
      const double total = r.lambda + contact + expiry + service;
      const double dt = expo(rng_) / total;
      const double span = std::min(dt, T - t);
      if (uc.vehicle_mode) t1_ += span; else a0_ += j * span;
      if (t + dt >= T) break;
      t += dt;
      const double now = start + t;
      double x = u(rng_) * total;
      if (x < r.lambda) {
        uc.queue.push_back({pop_.sample(rng_), now});
        continue;
      }
      x -= r.lambda;
      if (x < contact) {
        uc.vehicle_mode = true;
        uc.vehicle = n_cache > 0 ? std::min<std::size_t>(
                                       static_cast<std::size_t>(u(rng_) * n_cache), n_cache - 1)
                                 : 0;
        continue;
      }
      x -= contact;
      Request done;
      if (x < expiry) {
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u(rng_) * j),
                                                    uc.queue.size() - 1);
        done = uc.queue[i];
        uc.queue.erase(uc.queue.begin() + static_cast<std::ptrdiff_t>(i));
        ++m_.expiries;
      } else {
        done = uc.queue.front();
        uc.queue.pop_front();
        ++m_.vehicle_services;
        if (n_cache > 0 && cache_ && cache_->holds(uc.vehicle, done.fragment)) {
          ++slot_hits_;
          if (util_) util_->access(uc.vehicle, done.fragment, static_cast<std::int64_t>(slot));
        }
        if (uc.queue.empty()) uc.vehicle_mode = false;
      }
      ++slot_resolved_;
      sojourn_sum_[n] += now - done.arrival;
      ++sojourn_n_[n];
    }
  }
}

void Episode::account(std::size_t slot) {
  const EnergyParams& en = cfg_.energy;
  const double W = cfg_.radio.bandwidth_hz;
  const double T = en.slot_seconds;
  const std::size_t nu = users_.size();

  double novc = 0.0;
  for (std::size_t k = 0; k < nu; ++k) novc += W * T * novc_log_[k];

  double r_m = novc;
  double r_v = 0.0;
  if (cfg_.policy != Policy::kNone && nu > 0) {
    if (cfg_.throughput_model == ThroughputModel::kBinomial) {
      InteractionRates rr = cfg_.rates;
      rr.xi = xi_eff_;
      CacheVector cv{q_, cfg_.capacity_bits()};
      Catalog cat;
      cat.n_fragments = cfg_.n_fragments;
      cat.fragment_size_bits = cfg_.fragment_size_bits;
      cat.zipf_exponent = cfg_.zipf_exponent;
      cat.popularity = pop_.p();
      const SlotThroughput st =
          slot_throughput(cv, cat, service_split(rr), nu, sinrs_, W, T);
      r_m = st.r_mbs;
      r_v = st.r_veh;
    } else {
      const double share = slot_resolved_ > 0
                               ? static_cast<double>(slot_hits_) / static_cast<double>(slot_resolved_)
                               : 0.0;
      double lm = 0.0, lv = 0.0;
      for (const SinrPair& s : sinrs_) {
        lm += std::log2(1.0 + s.mbs);
        lv += std::log2(1.0 + s.veh);
      }
      r_m = W * T * (1.0 - share) * lm;
      r_v = W * T * share * lv;
    }
  }

  const double p_m = mbs_energy(r_m, en);
  VehicleEnergy ve;
  if (cfg_.policy != Policy::kNone) {
    ve = vehicle_energy(r_v, slot_backhaul_bits_, r_v > 0.0 ? cfg_.radio.p_veh_tx_w : 0.0, en);
  }
  const EnergyLedger led = total_energy(p_m, ve);
  tracker_ = update_eta(tracker_, led.p_total, r_m + r_v);

  m_.bits_mbs += r_m;
  m_.bits_veh += r_v;
  m_.bits_novc += novc;
  m_.energy_mbs += led.p_mbs;
  m_.energy_veh_tx += led.p_veh_tx;
  m_.energy_cache += led.p_cache;
  m_.energy_backhaul += led.p_backhaul;
  m_.backhauled_bits += slot_backhaul_bits_;
  m_.requests += slot_resolved_;
  m_.vehicle_hits += slot_hits_;

  // delays and virtual queues
  const double d_av = queues_.d_av;
  std::vector<double> delays(nu, d_av);
  double slot_delay = d_av;
  if (cfg_.delay_model == DelayModel::kAnalytic) {
    InteractionRates rr = cfg_.rates;
    rr.xi = xi_eff_;
    slot_delay = expected_delay(rr);
    std::fill(delays.begin(), delays.end(), slot_delay);
  } else {
    double s = 0.0;
    std::uint64_t c = 0;
    for (std::size_t n = 0; n < nu; ++n) {
      if (sojourn_n_[n] > 0) delays[n] = sojourn_sum_[n] / sojourn_n_[n];
      s += sojourn_sum_[n];
      c += sojourn_n_[n];
    }
    if (c > 0) slot_delay = s / static_cast<double>(c);
  }
  for (std::size_t n = 0; n < nu; ++n) sojourn_total_ += sojourn_sum_[n];
  delay_sum_ += slot_delay;
  b_sum_ += update_virtual_queues(queues_, delays);
  const double mass = cached_mass(q_, pop_.p());
  mass_sum_ += mass;

  if (cfg_.emit_traces) {
    SlotTrace tr;
    tr.slot = slot;
    tr.eta = tracker_.eta;
    tr.r_mbs = r_m;
    tr.r_veh = r_v;
    tr.r_novc = novc;
    tr.energy = led.p_total;
    tr.cached_mass = mass;
    tr.xi_eff = xi_eff_;
    tr.max_backlog = queues_.max_backlog();
    tr.objective = slot_objective_;
    tr.requests = slot_resolved_;
    tr.hits = slot_hits_;
    m_.traces.push_back(tr);
  }
}

EpisodeMetrics Episode::run() {
  cfg_.validate();
  cfg_.rates.validate();
  const RadioParams& radio = cfg_.radio;

  const std::size_t nu = cfg_.user_intensity > 0.0
      ? std::poisson_distribution<std::size_t>(cfg_.user_intensity)(population_rng_) : 0;
  users_.assign(nu, UserChain{});
  fleet_ = spawn_vehicles(cfg_.vehicle_count_mean, cfg_.cache_proportion,
                          radio.cell_radius_m, cfg_.road_lanes, cfg_.lane_spacing_m, population_rng_);
  for (std::size_t v = 0; v < fleet_.size(); ++v) {
    if (fleet_[v].caching) caching_.push_back(v);
  }
  caching_share_ = fleet_.empty() ? 0.0
      : static_cast<double>(caching_.size()) / static_cast<double>(fleet_.size());
  // caching vehicles are addressed by their rank among caching vehicles in
  // the cache and meter, by fleet index in the link state
  link_ = LinkState(nu, fleet_.size());
  sinrs_.assign(nu, {});
  novc_log_.assign(nu, 0.0);
  sojourn_sum_.assign(nu, 0.0);
  sojourn_n_.assign(nu, 0);
  q_.assign(cfg_.n_fragments, 0.0);
  if (cfg_.policy != Policy::kNone) {
    cache_.emplace(caching_.size(), cfg_.n_fragments, population_rng_);
    const std::size_t window = std::min(cfg_.offline_update_interval_slots, cfg_.n_slots);
    util_.emplace(caching_.size(), cfg_.n_fragments, static_cast<std::int64_t>(window),
                  static_cast<std::int64_t>(cfg_.n_slots));
  }
  queues_.d_av = cfg_.delay_budget();
  queues_.h.assign(nu, 0.0);

  // Fail early on unstable rates rather than mid-episode.
  {
    InteractionRates r0 = cfg_.rates;
    r0.xi = 0.0;
    (void)expected_queue_lengths(r0);
  }

  for (std::size_t slot = 0; slot < cfg_.n_slots; ++slot) {
    if (cfg_.drift.interval_slots > 0 && slot > 0 && slot % cfg_.drift.interval_slots == 0) {
      pop_.drift(cfg_.drift, drift_rng_);
    }
    draw_geometry();
    decide(slot);
    if (util_ && holdings_changed_) {
      util_->update_holdings(*cache_, static_cast<std::int64_t>(slot));
      holdings_changed_ = false;
    }
    simulate_users(slot);
    account(slot);
  }

  if (util_) util_->finish();
  const double K = static_cast<double>(cfg_.n_slots);
  m_.bits_total = m_.bits_mbs + m_.bits_veh;
  m_.energy_total = m_.energy_mbs + m_.energy_veh_tx + m_.energy_cache + m_.energy_backhaul;
  m_.eta_ee = m_.bits_total > 0.0 ? m_.energy_total / m_.bits_total : 0.0;
  m_.hit_ratio = m_.requests > 0
      ? static_cast<double>(m_.vehicle_hits) / static_cast<double>(m_.requests) : 0.0;
  m_.cache_utilization = util_ ? util_->value() : 0.0;
  m_.system_gain = m_.bits_novc > 0.0 ? (m_.bits_total - m_.bits_novc) / m_.bits_novc : 0.0;
  m_.kappa1_occupancy = (t1_ + a0_) > 0.0 ? t1_ / (t1_ + a0_) : 0.0;
  m_.vehicle_request_fraction = m_.requests > 0
      ? static_cast<double>(m_.vehicle_services) / static_cast<double>(m_.requests) : 0.0;
  m_.mean_delay = delay_sum_ / K;
  m_.mean_sojourn = m_.requests > 0 ? sojourn_total_ / static_cast<double>(m_.requests) : 0.0;
  m_.delay_budget = queues_.d_av;
  m_.max_backlog = queues_.max_backlog();
  m_.backlog_per_slot = m_.max_backlog / K;
  m_.b_estimate = b_sum_ / K;
  const double r_star = m_.bits_total / K;
  m_.bound_gap = (cfg_.v_param > 0.0 && r_star > 0.0)
      ? diagnostics_bound(m_.b_estimate, cfg_.v_param, r_star) : 0.0;
  m_.mean_cached_mass = mass_sum_ / K;
  m_.n_users = nu;
  m_.n_vehicles = fleet_.size();
  m_.n_caching = caching_.size();
  m_.n_slots = cfg_.n_slots;
  return std::move(m_);
}

}  // namespace

EpisodeMetrics run_episode(const ScenarioConfig& config) {
  Episode ep(config);
  return ep.run();
}

std::vector<SweepRow> sweep(const std::vector<ScenarioConfig>& configs, unsigned threads) {
  std::vector<SweepRow> rows(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        rows[i].metrics = run_episode(configs[i]);
      } catch (const Error& e) {
        rows[i].error = std::string(to_string(e.code())) + ": " + e.what();
      } catch (const std::exception& e) {
        rows[i].error = std::string("internal: ") + e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
  if (n <= 1) {
    worker();
    return rows;
  }
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return rows;
}

}  // namespace vcache
