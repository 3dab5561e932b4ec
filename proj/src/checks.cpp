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

#include "vcache/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "vcache/error.hpp"
#include "vcache/interaction.hpp"
#include "vcache/optimizer.hpp"

namespace vcache {

namespace {

using Rng = std::mt19937_64;

struct Verdict {
  bool pass = false;
  std::string measured;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string series(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s + "]";
}

template <typename T>
T param(const Json& p, const char* key, T fallback) {
  if (!p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(ErrorCode::kParseError, std::string("check parameter '") + key + "' has the wrong type");
  }
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

InteractionRates random_rates(Rng& rng) {
  InteractionRates r;
  r.lambda = uniform(rng, 0.2, 3.0);
  r.nu = r.lambda * uniform(rng, 1.2, 3.0);
  r.xi = uniform(rng, 0.0, 5.0);
  r.omega = uniform(rng, 0.2, 3.0);
  return r;
}

InteractionRates rates_from(const Json& t) {
  if (!t.is_array() || t.size() != 4) {
    fail(ErrorCode::kParseError, "rate tuples are [lambda, nu, xi, omega]");
  }
  return {t[0].get<double>(), t[1].get<double>(), t[2].get<double>(), t[3].get<double>()};
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// ---- interaction oracles ----

Verdict closed_form_ctmc(const CheckRequest& req) {
  Rng rng(param<std::uint64_t>(req.params, "seed", 11));
  const int n = param<int>(req.params, "tuples", 100);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const InteractionRates r = random_rates(rng);
    const QueueLengths l = expected_queue_lengths(r);
    const TruncatedChain c = solve_chain_auto(r);
    worst = std::max(worst, rel_err(l.e_l0, c.mean_queue_k0()));
    if (l.e_l1 > 0.0) worst = std::max(worst, rel_err(l.e_l1, c.mass_k1()));
    else worst = std::max(worst, c.mass_k1());
  }
  return {worst <= req.tolerance, "max relative error " + num(worst) + " over " +
                                      std::to_string(n) + " tuples"};
}

Verdict kappa_oracle(const CheckRequest& req) {
  const InteractionRates r = rates_from(param<Json>(req.params, "rates", Json{1, 2, 1, 1}));
  const double expect = r.xi / (r.xi + r.nu - r.lambda);
  const TruncatedChain c = solve_chain_auto(r);
  const double chain = c.mass_k1() / (c.mean_queue_k0() + c.mass_k1());
  const double model = service_split(r).kappa1;
  const double err = std::max(std::abs(chain - expect), std::abs(model - expect));
  return {err <= req.tolerance, "kappa1 " + num(model) + ", chain " + num(chain) +
                                    ", closed form " + num(expect) + ", error " + num(err)};
}

// ---- slot solver oracles ----

struct Instance {
  SlotProblem problem;
  double capacity_units = 0.0;  // capacity in fragments
};

// Exact LP optimum of a slot problem through its Lagrangian dual. The dual
// function is concave and piecewise linear in the capacity multiplier mu,
// so its maximum sits at mu = 0 or at one of the breakpoints -slope.
double lp_dual_optimum(const SlotProblem& p, double capacity_units) {
  struct Piece {
    double slope;
    double length;
  };
  std::vector<Piece> pieces;
  for (std::size_t j = 0; j < p.linear_coeffs.size(); ++j) {
    const double c = p.linear_coeffs[j];
    if (p.anchor.empty()) {
      pieces.push_back({c, 1.0});
    } else {
      const double a = std::clamp(p.anchor[j], 0.0, 1.0);
      pieces.push_back({c, a});
      pieces.push_back({c + p.raise_cost[j], 1.0 - a});
    }
  }
  auto dual = [&](double mu) {
    double g = -mu * capacity_units;
    for (const Piece& pc : pieces) g += std::min(0.0, (pc.slope + mu) * pc.length);
    return g;
  };
  double best = dual(0.0);
  for (const Piece& pc : pieces) {
    if (pc.slope < 0.0) best = std::max(best, dual(-pc.slope));
  }
  return best;
}

double used_units(const CacheVector& cv) {
  double s = 0.0;
  for (double q : cv.q) s += q;
  return s;
}

bool box_feasible(const CacheVector& cv, double capacity_units) {
  for (double q : cv.q) {
    if (q < -1e-12 || q > 1.0 + 1e-12) return false;
  }
  return used_units(cv) <= capacity_units * (1.0 + 1e-12) + 1e-12;
}

Instance random_instance(Rng& rng, std::size_t n, bool on_grid) {
  Instance in;
  const double bits = on_grid ? 1.0 : 1.0e7;
  in.problem.fragment_size_bits = bits;
  in.problem.v_param = 1.0;
  in.problem.linear_coeffs.resize(n);
  for (double& c : in.problem.linear_coeffs) c = uniform(rng, -1.0, 1.0);
  if (on_grid) {
    const int k = std::uniform_int_distribution<int>(1, static_cast<int>(10 * n))(rng);
    in.capacity_units = 0.1 * k;
  } else {
    in.capacity_units = uniform(rng, 0.2, 0.8 * static_cast<double>(n));
  }
  in.problem.capacity_bits = in.capacity_units * bits;
  if (std::bernoulli_distribution(0.5)(rng)) {
    in.problem.anchor.resize(n);
    in.problem.raise_cost.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      in.problem.anchor[j] = on_grid ? 0.1 * std::uniform_int_distribution<int>(0, 10)(rng)
                                     : uniform(rng, 0.0, 1.0);
      in.problem.raise_cost[j] = uniform(rng, 0.0, 1.0);
    }
  }
  return in;
}

double grid_optimum(const SlotProblem& p, double capacity_units) {
  const std::size_t n = p.linear_coeffs.size();
  std::vector<int> k(n, 0);
  std::vector<double> q(n, 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    double used = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      q[j] = 0.1 * k[j];
      used += q[j];
    }
    if (used <= capacity_units + 1e-9) best = std::min(best, p.objective(q));
    std::size_t j = 0;
    while (j < n && ++k[j] > 10) k[j++] = 0;
    if (j == n) break;
  }
  return best;
}

Verdict slot_grid(const CheckRequest& req) {
  Rng rng(param<std::uint64_t>(req.params, "seed", 13));
  const int n_inst = param<int>(req.params, "instances", 200);
  const std::size_t max_n = param<std::size_t>(req.params, "max_fragments", 4);
  double worst = 0.0;
  int infeasible = 0;
  for (int i = 0; i < n_inst; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i) % max_n;
    const Instance in = random_instance(rng, n, true);
    const CacheVector cv = solve_slot(in.problem);
    if (!box_feasible(cv, in.capacity_units)) ++infeasible;
    const double grid = grid_optimum(in.problem, in.capacity_units);
    worst = std::max(worst, std::abs(in.problem.objective(cv.q) - grid) / (1.0 + std::abs(grid)));
  }
  return {infeasible == 0 && worst <= req.tolerance,
          "max gap to grid optimum " + num(worst) + ", infeasible " + std::to_string(infeasible) +
              " of " + std::to_string(n_inst)};
}

Verdict slot_lp(const CheckRequest& req) {
  Rng rng(param<std::uint64_t>(req.params, "seed", 17));
  const int n_inst = param<int>(req.params, "instances", 200);
  const std::size_t max_n = param<std::size_t>(req.params, "max_fragments", 50);
  double worst = 0.0;
  int infeasible = 0;
  for (int i = 0; i < n_inst; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
    const Instance in = random_instance(rng, n, false);
    const CacheVector cv = solve_slot(in.problem);
    if (!box_feasible(cv, in.capacity_units)) ++infeasible;
    double scale = 1.0;
    for (double c : in.problem.linear_coeffs) scale += std::abs(c);
    const double lp = lp_dual_optimum(in.problem, in.capacity_units);
    worst = std::max(worst, std::abs(in.problem.objective(cv.q) - lp) / scale);
  }
  return {infeasible == 0 && worst <= req.tolerance,
          "max gap to LP optimum " + num(worst) + ", infeasible " + std::to_string(infeasible) +
              " of " + std::to_string(n_inst)};
}

// ---- fractional programming ----

struct Affine {
  double c0 = 0.0;
  std::vector<double> c;
  double operator()(std::span<const double> q) const {
    double v = c0;
    for (std::size_t j = 0; j < c.size(); ++j) v += c[j] * q[j];
    return v;
  }
};

Verdict dinkelbach_contract(const CheckRequest& req) {
  Rng rng(param<std::uint64_t>(req.params, "seed", 19));
  const int n_inst = param<int>(req.params, "instances", 50);
  double worst_residual = 0.0;
  double worst_root = 0.0;
  int non_monotone = 0;
  int max_iter = 0;
  for (int i = 0; i < n_inst; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 30)(rng);
    const double bits = 1.0e7;
    const double cap_units = uniform(rng, 0.5, 0.5 * static_cast<double>(n));
    Affine p{uniform(rng, 1.0, 10.0), std::vector<double>(n)};
    Affine r{uniform(rng, 1.0, 10.0), std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
      p.c[j] = uniform(rng, -0.5, 1.0) * p.c0 / static_cast<double>(n);
      r.c[j] = uniform(rng, 0.0, 2.0) * r.c0 / static_cast<double>(n);
    }
    KnapsackSpace space(n, bits, cap_units * bits);
    const DinkelbachResult res = dinkelbach_solve_static(p, r, space, 1e-12);
    for (std::size_t k = 1; k < res.eta_history.size(); ++k) {
      if (res.eta_history[k] > res.eta_history[k - 1]) ++non_monotone;
    }
    max_iter = std::max(max_iter, res.iterations);
    worst_residual = std::max(worst_residual,
                              std::abs(p(res.q) - res.eta * r(res.q)) / r(res.q));
    // min_q P(q) - eta R(q) from the independent LP oracle; zero at the optimum.
    SlotProblem lin;
    lin.linear_coeffs.resize(n);
    for (std::size_t j = 0; j < n; ++j) lin.linear_coeffs[j] = p.c[j] - res.eta * r.c[j];
    const double f = p.c0 - res.eta * r.c0 + lp_dual_optimum(lin, cap_units);
    worst_root = std::max(worst_root, std::abs(f) / r(res.q));
  }
  const double worst = std::max(worst_residual, worst_root);
  return {non_monotone == 0 && worst < req.tolerance,
          "non-monotone steps " + std::to_string(non_monotone) + ", max |P-eta R|/R " +
              num(worst_residual) + ", max |min F(eta)|/R " + num(worst_root) +
              ", max iterations " + std::to_string(max_iter)};
}

Verdict argmin_equivalence(const CheckRequest& req) {
  Rng rng(param<std::uint64_t>(req.params, "seed", 23));
  const int n_spaces = param<int>(req.params, "spaces", 50);
  int mismatched = 0;
  double worst_root = 0.0;
  for (int s = 0; s < n_spaces; ++s) {
    const std::size_t n_points = std::uniform_int_distribution<std::size_t>(2, 40)(rng);
    std::vector<std::vector<double>> pts(n_points, std::vector<double>(3));
    std::vector<double> pv(n_points);
    std::vector<double> rv(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
      for (double& x : pts[i]) x = std::round(uniform(rng, 0.0, 1.0) * 10.0) / 10.0;
      pts[i][0] = static_cast<double>(i);  // keeps points distinct
      pv[i] = uniform(rng, 0.1, 5.0);
      rv[i] = uniform(rng, 0.1, 5.0);
    }
    // Occasionally duplicate a ratio to exercise ties.
    if (n_points > 2 && s % 5 == 0) {
      pv[1] = pv[0] * 2.0;
      rv[1] = rv[0] * 2.0;
    }
    auto index_of = [&](std::span<const double> q) {
      return static_cast<std::size_t>(std::llround(q[0]));
    };
    const QFunction energy = [&](std::span<const double> q) { return pv[index_of(q)]; };
    const QFunction bits = [&](std::span<const double> q) { return rv[index_of(q)]; };

    double eta_star = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_points; ++i) eta_star = std::min(eta_star, pv[i] / rv[i]);
    std::set<std::size_t> ratio_argmin;
    std::set<std::size_t> param_argmin;
    double fmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_points; ++i) fmin = std::min(fmin, pv[i] - eta_star * rv[i]);
    for (std::size_t i = 0; i < n_points; ++i) {
      if (pv[i] / rv[i] <= eta_star * (1.0 + 1e-12)) ratio_argmin.insert(i);
      if (pv[i] - eta_star * rv[i] <= fmin + 1e-12) param_argmin.insert(i);
    }
    worst_root = std::max(worst_root, std::abs(fmin));
    const DinkelbachResult res =
        dinkelbach_solve_static(energy, bits, DiscreteSpace(pts), 1e-12);
    if (ratio_argmin != param_argmin || !ratio_argmin.count(index_of(res.q)) ||
        rel_err(res.eta, eta_star) > 1e-12) {
      ++mismatched;
    }
  }
  return {mismatched == 0 && worst_root <= req.tolerance,
          "argmin mismatches " + std::to_string(mismatched) + " of " +
              std::to_string(n_spaces) + ", max |min F(eta*)| " + num(worst_root)};
}

// ---- simulation helpers ----

void set_path(Json& scen, const std::string& path, const Json& v) {
  const auto dot = path.find('.');
  if (dot == std::string::npos) scen[path] = v;
  else scen[path.substr(0, dot)][path.substr(dot + 1)] = v;
}

double mean_of(const ExperimentResult& res, std::size_t point,
               const std::function<double(const EpisodeMetrics&)>& get) {
  const std::size_t ns = res.seeds.size();
  double s = 0.0;
  for (std::size_t r = 0; r < ns; ++r) {
    const SweepRow& row = res.rows[point * ns + r];
    if (!row.metrics) fail(ErrorCode::kInternal, "episode failed: " + row.error);
    s += get(*row.metrics);
  }
  return s / static_cast<double>(ns);
}

std::size_t find_point(const ExperimentResult& res,
                       const std::vector<std::pair<std::string, Json>>& want) {
  for (const SweepPoint& p : res.points) {
    bool ok = true;
    for (const auto& [k, v] : want) {
      bool found = false;
      for (const auto& [pk, pv] : p.overrides) {
        if (pk == k && pv == v) found = true;
      }
      ok = ok && found;
    }
    if (ok) return p.index;
  }
  fail(ErrorCode::kInternal, "sweep point not found");
}

std::vector<double> curve(const ExperimentResult& res, const std::string& path,
                          const std::vector<Json>& values, const char* policy,
                          const std::function<double(const EpisodeMetrics&)>& get) {
  std::vector<double> out;
  for (const Json& v : values) out.push_back(mean_of(res, find_point(res, {{path, v}, {"policy", policy}}), get));
  return out;
}

std::vector<Json> values_param(const Json& p, const char* key, std::vector<double> fallback) {
  std::vector<Json> out;
  if (p.contains(key)) {
    for (const Json& v : p.at(key)) out.push_back(v);
  } else {
    for (double v : fallback) out.push_back(v);
  }
  return out;
}

double eta_of(const EpisodeMetrics& m) { return m.eta_ee; }

}  // namespace

std::vector<std::string> check_names() {
  return {"closed_form_ctmc", "kappa_oracle",  "kappa_monte_carlo", "slot_grid",
          "slot_lp",          "dinkelbach",    "argmin_equivalence", "stability",
          "eta_monotone_v",   "fig3_shape",    "fig4_shape",        "fig5_shape",
          "fig6_shape",       "determinism"};
}

std::vector<CheckRequest> parse_expectations(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kParseError, "expectations must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "checks") fail(ErrorCode::kParseError, "unknown field '" + it.key() + "'");
  }
  if (!j.contains("checks") || !j["checks"].is_array()) {
    fail(ErrorCode::kParseError, "field 'checks': expected an array");
  }
  static const std::set<std::string> keys = {"check", "label", "criterion", "informational",
                                             "tolerance", "params"};
  const std::vector<std::string> names = check_names();
  std::vector<CheckRequest> out;
  for (std::size_t i = 0; i < j["checks"].size(); ++i) {
    const Json& c = j["checks"][i];
    const std::string where = "checks[" + std::to_string(i) + "]";
    if (!c.is_object()) fail(ErrorCode::kParseError, "field '" + where + "': expected an object");
    for (auto it = c.begin(); it != c.end(); ++it) {
      if (!keys.count(it.key())) {
        fail(ErrorCode::kParseError, "unknown field '" + where + "." + it.key() + "'");
      }
    }
    CheckRequest r;
    try {
      r.name = c.at("check").get<std::string>();
      r.label = c.value("label", r.name);
      r.criterion = c.value("criterion", 0);
      r.informational = c.value("informational", false);
      r.tolerance = c.at("tolerance").get<double>();
      r.params = c.value("params", Json::object());
    } catch (const Json::exception& e) {
      fail(ErrorCode::kParseError, where + ": " + e.what());
    }
    if (std::find(names.begin(), names.end(), r.name) == names.end()) {
      fail(ErrorCode::kParseError, "field '" + where + ".check': unknown check '" + r.name + "'");
    }
    if (!(r.tolerance >= 0.0)) {
      fail(ErrorCode::kValidationError, where + ".tolerance: must be nonnegative");
    }
    if (!r.params.is_object()) {
      fail(ErrorCode::kParseError, "field '" + where + ".params': expected an object");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CheckRequest> load_expectations(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open expectations '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_expectations(Json::parse(ss.str()));
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::kParseError, path + ": malformed JSON: " + e.what());
  }
}

CheckRunner::CheckRunner(ExperimentSpec base, unsigned threads)
    : base_(std::move(base)), threads_(threads) {}

const ExperimentResult& CheckRunner::sweep(const Json& overrides,
                                           const std::vector<SweepAxis>& axes,
                                           std::size_t replicates) {
  ExperimentSpec spec = base_;
  spec.seeds.clear();
  spec.replicates = replicates;
  spec.emit_traces = false;
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    set_path(spec.base, it.key(), *it);
  }
  spec.axes = axes;
  Json key = {{"base", spec.base}, {"replicates", replicates}, {"seed", spec.master_seed}};
  for (const SweepAxis& a : axes) key["axes"].push_back({a.path, a.values});
  const std::string k = key.dump();
  auto it = memo_.find(k);
  if (it == memo_.end()) it = memo_.emplace(k, execute(spec, threads_)).first;
  if (it->second.failed > 0) {
    for (const SweepRow& r : it->second.rows) {
      if (!r.metrics) fail(ErrorCode::kInternal, "episode failed: " + r.error);
    }
  }
  return it->second;
}

CheckOutcome CheckRunner::run(const CheckRequest& req) {
  CheckOutcome out;
  out.label = req.label.empty() ? req.name : req.label;
  out.criterion = req.criterion;
  out.informational = req.informational;
  out.tolerance = req.tolerance;
  const auto t0 = std::chrono::steady_clock::now();
  const Json& P = req.params;
  const Json ov = param<Json>(P, "overrides", Json::object());
  const std::size_t reps = param<std::size_t>(P, "replicates", 5);
  Verdict v;
  try {
    if (req.name == "closed_form_ctmc") {
      v = closed_form_ctmc(req);
    } else if (req.name == "kappa_oracle") {
      v = kappa_oracle(req);
    } else if (req.name == "slot_grid") {
      v = slot_grid(req);
    } else if (req.name == "slot_lp") {
      v = slot_lp(req);
    } else if (req.name == "dinkelbach") {
      v = dinkelbach_contract(req);
    } else if (req.name == "argmin_equivalence") {
      v = argmin_equivalence(req);
    } else if (req.name == "kappa_monte_carlo") {
      const Json sets = param<Json>(P, "sets", Json::array({{1, 2, 1, 1}}));
      const double min_requests = param<double>(P, "min_requests", 1.0e6);
      double worst = 0.0;
      std::uint64_t fewest = std::numeric_limits<std::uint64_t>::max();
      std::string detail;
      std::vector<ScenarioConfig> configs;
      for (const Json& s : sets) {
        Json scen = base_.base;
        for (auto it = ov.begin(); it != ov.end(); ++it) set_path(scen, it.key(), *it);
        const InteractionRates r = rates_from(s);
        scen["rates"] = {{"lambda", r.lambda}, {"nu", r.nu}, {"xi", r.xi}, {"omega", r.omega}};
        scen["fixed_xi_eff"] = r.xi;
        scen["policy"] = "none";
        const double per_slot = scen["user_intensity"].get<double>() * r.lambda *
                                scen["energy"]["slot_seconds"].get<double>();
        scen["n_slots"] = static_cast<std::size_t>(std::ceil(1.25 * min_requests / per_slot));
        ScenarioConfig c = scenario_from_json(scen);
        c.rng_seed = episode_seed(base_.master_seed, 0);
        configs.push_back(c);
      }
      const std::vector<SweepRow> rows = vcache::sweep(configs, threads_);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].metrics) fail(ErrorCode::kInternal, "episode failed: " + rows[i].error);
        const InteractionRates& r = configs[i].rates;
        const double expect = r.xi / (r.xi + r.nu - r.lambda);
        const double got = rows[i].metrics->kappa1_occupancy;
        worst = std::max(worst, std::abs(got - expect));
        fewest = std::min(fewest, rows[i].metrics->requests);
        detail += " " + num(got) + "/" + num(expect);
      }
      v.pass = worst <= req.tolerance && static_cast<double>(fewest) >= min_requests;
      v.measured = "max |kappa1_hat - kappa1| " + num(worst) + ", fewest requests " +
                   std::to_string(fewest) + ", measured/expected" + detail;
    } else if (req.name == "stability") {
      Json o = ov;
      if (!o.contains("n_slots")) o["n_slots"] = param<std::size_t>(P, "slots", 10000);
      const ExperimentResult& res = sweep(o, {}, param<std::size_t>(P, "replicates", 1));
      const ScenarioConfig& c = res.points[0].config;
      const double d_av = c.delay_budget();
      const double k = static_cast<double>(c.n_slots);
      const double h = mean_of(res, 0, [](const EpisodeMetrics& m) { return m.max_backlog; });
      double h_worst = 0.0;
      double d_worst = 0.0;
      for (const SweepRow& r : res.rows) {
        h_worst = std::max(h_worst, r.metrics->max_backlog);
        d_worst = std::max(d_worst, r.metrics->mean_delay);
      }
      const double factor = param<double>(P, "delay_factor", 1.05);
      v.pass = h_worst / k < req.tolerance * d_av && d_worst <= factor * d_av;
      v.measured = "max_n H_n(K)/K " + num(h_worst / k) + " (limit " + num(req.tolerance * d_av) +
                   "), mean delay " + num(d_worst) + " (limit " + num(factor * d_av) +
                   "), mean H " + num(h) + ", K " + num(k);
    } else if (req.name == "eta_monotone_v") {
      const std::vector<Json> vs = values_param(P, "v_values", {5, 10, 50, 100, 500});
      Json o = ov;
      if (!o.contains("policy")) o["policy"] = "online";
      const ExperimentResult& res = sweep(o, {{"v_param", vs}}, param<std::size_t>(P, "replicates", 3));
      std::vector<double> eta;
      std::vector<double> h;
      for (std::size_t i = 0; i < vs.size(); ++i) {
        eta.push_back(mean_of(res, i, eta_of));
        h.push_back(mean_of(res, i, [](const EpisodeMetrics& m) { return m.max_backlog; }));
      }
      int eta_up = 0;
      int h_down = 0;
      for (std::size_t i = 1; i < eta.size(); ++i) {
        if (eta[i] > eta[i - 1] * (1.0 + req.tolerance)) ++eta_up;
        if (h[i] < h[i - 1] * (1.0 - req.tolerance)) ++h_down;
      }
      v.pass = eta_up == 0 && h_down == 0;
      v.measured = "eta " + series(eta) + " (increases " + std::to_string(eta_up) +
                   "), max backlog " + series(h) + " (decreases " + std::to_string(h_down) + ")";
    } else if (req.name == "fig3_shape") {
      const std::vector<Json> lambdas = values_param(P, "lambdas", {0.5, 0.75, 1.0, 1.25, 1.5});
      const Json ref = param<Json>(P, "reference_lambda", Json(1.0));
      const double flat_tol = param<double>(P, "flat_tolerance", 0.03);
      const ExperimentResult& res =
          sweep(ov, {{"rates.lambda", lambdas}, {"policy", {"none", "offline", "online"}}}, reps);
      const std::vector<double> none = curve(res, "rates.lambda", lambdas, "none", eta_of);
      const std::vector<double> off = curve(res, "rates.lambda", lambdas, "offline", eta_of);
      const std::vector<double> on = curve(res, "rates.lambda", lambdas, "online", eta_of);
      const std::size_t r = std::find(lambdas.begin(), lambdas.end(), ref) - lambdas.begin();
      if (r == lambdas.size()) fail(ErrorCode::kValidationError, "reference_lambda not swept");
      const double gain = (none[r] - on[r]) / none[r];
      const auto [lo, hi] = std::minmax_element(none.begin(), none.end());
      const double flat = (*hi - *lo) / *lo;
      v.pass = on[r] < off[r] && off[r] < none[r] && gain >= req.tolerance && flat <= flat_tol;
      if (param<bool>(P, "online_trend", false)) {
        // Online curve nondecreasing in the request rate.
        int drops = 0;
        for (std::size_t i = 1; i < on.size(); ++i) drops += on[i] < on[i - 1] ? 1 : 0;
        v.pass = drops == 0;
        v.measured = "online eta " + series(on) + ", decreasing steps " + std::to_string(drops);
      } else {
        v.measured = "at lambda=" + ref.dump() + ": online " + num(on[r]) + " < offline " +
                     num(off[r]) + " < none " + num(none[r]) + ", improvement " + num(gain) +
                     ", none spread " + num(flat) + "; online " + series(on) + " offline " +
                     series(off) + " none " + series(none);
      }
    } else if (req.name == "fig4_shape") {
      const std::vector<Json> caps =
          values_param(P, "capacities", {0.001, 0.003, 0.01, 0.03, 0.1});
      const ExperimentResult& res =
          sweep(ov, {{"normalized_capacity", caps}, {"policy", {"offline", "online"}}}, reps);
      const std::vector<double> off = curve(res, "normalized_capacity", caps, "offline", eta_of);
      const std::vector<double> on = curve(res, "normalized_capacity", caps, "online", eta_of);
      std::vector<double> gap(caps.size());
      for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = off[i] - on[i];
      const std::size_t k = std::max_element(gap.begin(), gap.end()) - gap.begin();
      bool shape = k > 0;
      for (std::size_t i = 1; i <= k; ++i) shape = shape && gap[i] >= gap[i - 1];
      for (std::size_t i = k + 1; i < gap.size(); ++i) shape = shape && gap[i] <= gap[i - 1];
      if (shape && k + 1 == gap.size() && gap.size() > 2) {
        // Peak at the last point only counts as saturation.
        shape = gap[k] - gap[k - 1] <= 0.5 * (gap[1] - gap[0]);
      }
      v.pass = shape;
      v.measured = "offline - online eta gap " + series(gap) + ", peak at index " +
                   std::to_string(k);
    } else if (req.name == "fig5_shape" || req.name == "fig6_shape") {
      const std::vector<Json> props =
          values_param(P, "proportions", {0.1, 0.3, 0.5, 0.7, 0.9});
      const ExperimentResult& res =
          sweep(ov, {{"cache_proportion", props}, {"policy", {"offline", "online"}}}, reps);
      auto get = [&](const char* pol, double EpisodeMetrics::*field) {
        return curve(res, "cache_proportion", props, pol,
                     [field](const EpisodeMetrics& m) { return m.*field; });
      };
      if (req.name == "fig5_shape") {
        const auto hit_on = get("online", &EpisodeMetrics::hit_ratio);
        const auto hit_off = get("offline", &EpisodeMetrics::hit_ratio);
        const auto util_on = get("online", &EpisodeMetrics::cache_utilization);
        const auto util_off = get("offline", &EpisodeMetrics::cache_utilization);
        bool hits = true;
        for (std::size_t i = 0; i < props.size(); ++i) hits = hits && hit_on[i] >= hit_off[i];
        const auto [lo, hi] = std::minmax_element(util_on.begin(), util_on.end());
        const double spread = *hi - *lo;
        const std::size_t k = std::max_element(util_off.begin(), util_off.end()) - util_off.begin();
        bool decreasing = k + 1 < util_off.size();
        for (std::size_t i = k + 1; i < util_off.size(); ++i) {
          decreasing = decreasing && util_off[i] < util_off[i - 1];
        }
        v.pass = hits && spread <= req.tolerance && decreasing;
        v.measured = "hit online " + series(hit_on) + " offline " + series(hit_off) +
                     "; utilization online " + series(util_on) + " (spread " + num(spread) +
                     ") offline " + series(util_off) + " (peak index " + std::to_string(k) + ")";
      } else {
        const auto g_on = get("online", &EpisodeMetrics::system_gain);
        const auto g_off = get("offline", &EpisodeMetrics::system_gain);
        const double ratio = param<double>(P, "saturation_ratio", 0.5);
        auto saturates = [&](const std::vector<double>& g) {
          const std::size_t n = g.size();
          if (n < 3) return false;
          const double first = (g[1] - g[0]) / (props[1].get<double>() - props[0].get<double>());
          const double last = (g[n - 1] - g[n - 2]) /
                              (props[n - 1].get<double>() - props[n - 2].get<double>());
          return first > 0.0 && last <= ratio * first;
        };
        bool above = true;
        for (std::size_t i = 0; i < props.size(); ++i) {
          above = above && g_on[i] >= g_off[i] * (1.0 - req.tolerance);
        }
        v.pass = saturates(g_on) && saturates(g_off) && above;
        v.measured = "system gain online " + series(g_on) + " offline " + series(g_off);
      }
    } else if (req.name == "determinism") {
      ExperimentSpec spec = base_;
      spec.seeds.clear();
      spec.replicates = param<std::size_t>(P, "replicates", 2);
      for (auto it = ov.begin(); it != ov.end(); ++it) set_path(spec.base, it.key(), *it);
      if (!ov.contains("n_slots")) spec.base["n_slots"] = param<std::size_t>(P, "slots", 300);
      spec.axes = {{"cache_proportion", {0.3, 0.7}}, {"policy", {"none", "offline", "online"}}};
      std::vector<std::string> outputs;
      for (unsigned t : {1u, 8u, 1u, 8u}) outputs.push_back(metrics_csv(spec, execute(spec, t)));
      const ExperimentResult first = execute(spec, 1);
      const ExperimentSpec again = parse_config_text(manifest_json(spec, first));
      const std::string replay = metrics_csv(again, execute(again, 8));
      int differ = 0;
      for (const std::string& s : outputs) differ += s != outputs[0];
      v.pass = differ == 0 && replay == outputs[0];
      v.measured = std::to_string(outputs.size()) + " runs over threads {1, 8}: " +
                   std::to_string(differ) + " differ; manifest replay " +
                   (replay == outputs[0] ? "identical" : "differs") + " (" +
                   std::to_string(outputs[0].size()) + " bytes)";
    } else {
      fail(ErrorCode::kParseError, "unknown check '" + req.name + "'");
    }
  } catch (const std::exception& e) {
    v.pass = false;
    v.measured = std::string("error: ") + e.what();
  }
  out.pass = v.pass;
  out.measured = v.measured;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string format_outcome(const CheckOutcome& o) {
  char head[160];
  std::snprintf(head, sizeof head, "%s %s (tol %g, %.1fs)", o.pass ? "PASS" : "FAIL",
                o.label.c_str(), o.tolerance, o.seconds);
  std::string s = head;
  if (o.informational) s += " [informational]";
  return s + ": " + o.measured;
}

}  // namespace vcache
