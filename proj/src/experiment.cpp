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

#include "vcache/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "vcache/error.hpp"

namespace vcache {

const char* version_string() noexcept { return "0.1.0"; }

namespace {

using FieldRef = std::variant<double*, std::size_t*, bool*, std::optional<double>*,
                              Policy*, ThroughputModel*, DelayModel*>;

struct Field {
  std::string path;
  FieldRef ref;
};

std::vector<Field> fields_of(ScenarioConfig& c) {
  return {
      {"user_intensity", &c.user_intensity},
      {"vehicle_count_mean", &c.vehicle_count_mean},
      {"cache_proportion", &c.cache_proportion},
      {"normalized_capacity", &c.normalized_capacity},
      {"rates.lambda", &c.rates.lambda},
      {"rates.nu", &c.rates.nu},
      {"rates.xi", &c.rates.xi},
      {"rates.omega", &c.rates.omega},
      {"fixed_xi_eff", &c.fixed_xi_eff},
      {"catalog.n_fragments", &c.n_fragments},
      {"catalog.fragment_size_bits", &c.fragment_size_bits},
      {"catalog.zipf_exponent", &c.zipf_exponent},
      {"drift.interval_slots", &c.drift.interval_slots},
      {"drift.hot_ranks", &c.drift.hot_ranks},
      {"drift.swaps", &c.drift.swaps},
      {"radio.p_mbs_tx_w", &c.radio.p_mbs_tx_w},
      {"radio.p_veh_tx_w", &c.radio.p_veh_tx_w},
      {"radio.noise_power_w", &c.radio.noise_power_w},
      {"radio.bandwidth_hz", &c.radio.bandwidth_hz},
      {"radio.pathloss_exponent", &c.radio.pathloss_exponent},
      {"radio.reference_gain", &c.radio.reference_gain},
      {"radio.d2d_range_m", &c.radio.d2d_range_m},
      {"radio.cell_radius_m", &c.radio.cell_radius_m},
      {"radio.min_distance_m", &c.radio.min_distance_m},
      {"radio.d2d_mbs_interference", &c.radio.d2d_mbs_interference},
      {"road.lanes", &c.road_lanes},
      {"road.lane_spacing_m", &c.lane_spacing_m},
      {"energy.mbs_rate_energy", &c.energy.mbs_rate_energy},
      {"energy.cache_rate_energy", &c.energy.cache_rate_energy},
      {"energy.amplifier_factor", &c.energy.amplifier_factor},
      {"energy.slot_seconds", &c.energy.slot_seconds},
      {"energy.backhaul_per_served_bit", &c.energy.backhaul_per_served_bit},
      {"energy.backhaul_amortization_slots", &c.backhaul_amortization_slots},
      {"policy", &c.policy},
      {"offline_update_interval_slots", &c.offline_update_interval_slots},
      {"v_param", &c.v_param},
      {"throughput_model", &c.throughput_model},
      {"delay_model", &c.delay_model},
      {"n_slots", &c.n_slots},
  };
}

[[noreturn]] void parse_fail(const std::string& msg) { fail(ErrorCode::kParseError, msg); }
[[noreturn]] void value_fail(const std::string& msg) { fail(ErrorCode::kValidationError, msg); }

const char* model_name(ThroughputModel m) {
  return m == ThroughputModel::kBinomial ? "binomial" : "routed";
}
const char* model_name(DelayModel m) {
  return m == DelayModel::kEmpirical ? "empirical" : "analytic";
}

void assign(const Field& f, const Json& v) {
  const std::string& path = f.path;
  std::visit(
      [&](auto* ptr) {
        using T = std::remove_pointer_t<decltype(ptr)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!v.is_number()) parse_fail("field '" + path + "': expected a number");
          *ptr = v.get<double>();
        } else if constexpr (std::is_same_v<T, std::size_t>) {
          if (!v.is_number()) parse_fail("field '" + path + "': expected an integer");
          const double d = v.get<double>();
          if (!(d >= 0.0) || std::floor(d) != d || d > 9.0e15) {
            value_fail(path + ": must be a nonnegative integer");
          }
          *ptr = v.is_number_unsigned() ? v.get<std::size_t>() : static_cast<std::size_t>(d);
        } else if constexpr (std::is_same_v<T, bool>) {
          if (!v.is_boolean()) parse_fail("field '" + path + "': expected true or false");
          *ptr = v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::optional<double>>) {
          if (v.is_null()) {
            ptr->reset();
          } else {
            if (!v.is_number()) parse_fail("field '" + path + "': expected a number or null");
            *ptr = v.get<double>();
          }
        } else {
          if (!v.is_string()) parse_fail("field '" + path + "': expected a string");
          const std::string s = v.get<std::string>();
          if constexpr (std::is_same_v<T, Policy>) {
            auto p = parse_policy(s);
            if (!p) value_fail(path + ": unknown policy '" + s + "' (online, offline, none)");
            *ptr = *p;
          } else if constexpr (std::is_same_v<T, ThroughputModel>) {
            if (s == "routed") *ptr = ThroughputModel::kRouted;
            else if (s == "binomial") *ptr = ThroughputModel::kBinomial;
            else value_fail(path + ": unknown model '" + s + "' (routed, binomial)");
          } else {
            if (s == "analytic") *ptr = DelayModel::kAnalytic;
            else if (s == "empirical") *ptr = DelayModel::kEmpirical;
            else value_fail(path + ": unknown model '" + s + "' (analytic, empirical)");
          }
        }
      },
      f.ref);
}

Json read(const Field& f) {
  return std::visit(
      [](auto* ptr) -> Json {
        using T = std::remove_pointer_t<decltype(ptr)>;
        if constexpr (std::is_same_v<T, std::optional<double>>) {
          return *ptr ? Json(**ptr) : Json(nullptr);
        } else if constexpr (std::is_same_v<T, Policy>) {
          return to_string(*ptr);
        } else if constexpr (std::is_same_v<T, ThroughputModel> || std::is_same_v<T, DelayModel>) {
          return model_name(*ptr);
        } else {
          return *ptr;
        }
      },
      f.ref);
}

std::set<std::string> group_names() {
  std::set<std::string> g;
  ScenarioConfig c;
  for (const Field& f : fields_of(c)) {
    const auto dot = f.path.find('.');
    if (dot != std::string::npos) g.insert(f.path.substr(0, dot));
  }
  return g;
}

void flatten(const Json& j, const std::string& prefix, const std::set<std::string>& groups,
             std::map<std::string, Json>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (prefix.empty() && groups.count(it.key())) {
      if (!it->is_object()) parse_fail("field 'scenario." + path + "': expected an object");
      flatten(*it, path, groups, out);
    } else {
      out[path] = *it;
    }
  }
}

const Field* find_field(const std::vector<Field>& fields, const std::string& path) {
  for (const Field& f : fields) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "null";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) return fmt(v.get<double>());
  return v.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

struct MetricColumn {
  const char* name;
  double (*get)(const EpisodeMetrics&);
};

const std::vector<MetricColumn>& metric_columns() {
  static const std::vector<MetricColumn> cols = {
      {"eta_ee", [](const EpisodeMetrics& m) { return m.eta_ee; }},
      {"hit_ratio", [](const EpisodeMetrics& m) { return m.hit_ratio; }},
      {"cache_utilization", [](const EpisodeMetrics& m) { return m.cache_utilization; }},
      {"system_gain", [](const EpisodeMetrics& m) { return m.system_gain; }},
      {"kappa1_occupancy", [](const EpisodeMetrics& m) { return m.kappa1_occupancy; }},
      {"vehicle_request_fraction", [](const EpisodeMetrics& m) { return m.vehicle_request_fraction; }},
      {"mean_delay", [](const EpisodeMetrics& m) { return m.mean_delay; }},
      {"mean_sojourn", [](const EpisodeMetrics& m) { return m.mean_sojourn; }},
      {"delay_budget", [](const EpisodeMetrics& m) { return m.delay_budget; }},
      {"max_backlog", [](const EpisodeMetrics& m) { return m.max_backlog; }},
      {"backlog_per_slot", [](const EpisodeMetrics& m) { return m.backlog_per_slot; }},
      {"b_estimate", [](const EpisodeMetrics& m) { return m.b_estimate; }},
      {"bound_gap", [](const EpisodeMetrics& m) { return m.bound_gap; }},
      {"mean_cached_mass", [](const EpisodeMetrics& m) { return m.mean_cached_mass; }},
      {"bits_total", [](const EpisodeMetrics& m) { return m.bits_total; }},
      {"bits_mbs", [](const EpisodeMetrics& m) { return m.bits_mbs; }},
      {"bits_veh", [](const EpisodeMetrics& m) { return m.bits_veh; }},
      {"bits_novc", [](const EpisodeMetrics& m) { return m.bits_novc; }},
      {"energy_total", [](const EpisodeMetrics& m) { return m.energy_total; }},
      {"energy_mbs", [](const EpisodeMetrics& m) { return m.energy_mbs; }},
      {"energy_veh_tx", [](const EpisodeMetrics& m) { return m.energy_veh_tx; }},
      {"energy_cache", [](const EpisodeMetrics& m) { return m.energy_cache; }},
      {"energy_backhaul", [](const EpisodeMetrics& m) { return m.energy_backhaul; }},
      {"backhauled_bits", [](const EpisodeMetrics& m) { return m.backhauled_bits; }},
      {"requests", [](const EpisodeMetrics& m) { return static_cast<double>(m.requests); }},
      {"vehicle_hits", [](const EpisodeMetrics& m) { return static_cast<double>(m.vehicle_hits); }},
      {"n_users", [](const EpisodeMetrics& m) { return static_cast<double>(m.n_users); }},
      {"n_vehicles", [](const EpisodeMetrics& m) { return static_cast<double>(m.n_vehicles); }},
      {"n_caching", [](const EpisodeMetrics& m) { return static_cast<double>(m.n_caching); }},
  };
  return cols;
}

// Columns averaged in summary.csv.
const std::vector<std::string>& summary_metrics() {
  static const std::vector<std::string> names = {
      "eta_ee", "hit_ratio", "cache_utilization", "system_gain", "kappa1_occupancy",
      "mean_delay", "mean_sojourn", "max_backlog", "bound_gap", "mean_cached_mass"};
  return names;
}

// Swept paths other than "policy" (which always has its own column).
std::vector<std::string> axis_columns(const ExperimentSpec& spec) {
  std::vector<std::string> cols;
  for (const SweepAxis& a : spec.axes) {
    if (a.path != "policy") cols.push_back(a.path);
  }
  return cols;
}

Json override_value(const SweepPoint& p, const std::string& path) {
  for (const auto& [k, v] : p.overrides) {
    if (k == path) return v;
  }
  return nullptr;
}

}  // namespace

std::vector<std::string> scenario_fields() {
  ScenarioConfig c;
  std::vector<std::string> out;
  for (const Field& f : fields_of(c)) out.push_back(f.path);
  return out;
}

ScenarioConfig scenario_from_json(const Json& j) {
  if (!j.is_object()) parse_fail("'scenario' must be an object");
  ScenarioConfig c;
  const std::vector<Field> fields = fields_of(c);
  std::map<std::string, Json> flat;
  flatten(j, "", group_names(), flat);
  for (const auto& [path, value] : flat) {
    const Field* f = find_field(fields, path);
    if (!f) parse_fail("unknown field 'scenario." + path + "'");
    assign(*f, value);
  }
  c.validate();
  return c;
}

Json scenario_to_json(const ScenarioConfig& config) {
  ScenarioConfig c = config;
  Json out = Json::object();
  for (const Field& f : fields_of(c)) {
    const auto dot = f.path.find('.');
    if (dot == std::string::npos) {
      out[f.path] = read(f);
    } else {
      out[f.path.substr(0, dot)][f.path.substr(dot + 1)] = read(f);
    }
  }
  return out;
}

std::vector<std::uint64_t> ExperimentSpec::episode_seeds() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out(replicates);
  for (std::size_t r = 0; r < replicates; ++r) out[r] = episode_seed(master_seed, r);
  return out;
}

std::vector<SweepPoint> ExperimentSpec::points() const {
  std::size_t total = 1;
  for (const SweepAxis& a : axes) total *= a.values.size();
  std::vector<SweepPoint> pts;
  pts.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    SweepPoint p;
    p.index = i;
    Json scen = base;
    std::size_t rem = i;
    std::vector<std::size_t> digits(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      digits[a] = rem % axes[a].values.size();
      rem /= axes[a].values.size();
    }
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const Json& v = axes[a].values[digits[a]];
      p.overrides.emplace_back(axes[a].path, v);
      const auto dot = axes[a].path.find('.');
      if (dot == std::string::npos) scen[axes[a].path] = v;
      else scen[axes[a].path.substr(0, dot)][axes[a].path.substr(dot + 1)] = v;
    }
    try {
      p.config = scenario_from_json(scen);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "sweep point " << i << ": " << e.what();
      fail(e.code(), os.str());
    }
    p.config.emit_traces = emit_traces;
    pts.push_back(std::move(p));
  }
  return pts;
}

ExperimentSpec parse_config(const Json& j) {
  if (!j.is_object()) parse_fail("configuration must be a JSON object");
  static const std::set<std::string> top = {"name", "scenario", "sweep", "seed", "replicates",
                                            "seeds", "emit_traces", "out_dir", "manifest"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!top.count(it.key())) parse_fail("unknown field '" + it.key() + "'");
  }
  ExperimentSpec spec;
  if (j.contains("name")) {
    if (!j["name"].is_string()) parse_fail("field 'name': expected a string");
    spec.name = j["name"].get<std::string>();
  }
  const Json scen = j.contains("scenario") ? j["scenario"] : Json::object();
  spec.base = scenario_to_json(scenario_from_json(scen));

  if (j.contains("sweep")) {
    const Json& sw = j["sweep"];
    if (!sw.is_array()) parse_fail("field 'sweep': expected an array of axes");
    const std::vector<std::string> names = scenario_fields();
    std::set<std::string> seen;
    for (std::size_t i = 0; i < sw.size(); ++i) {
      const Json& ax = sw[i];
      const std::string where = "sweep[" + std::to_string(i) + "]";
      if (!ax.is_object()) parse_fail("field '" + where + "': expected an object");
      for (auto it = ax.begin(); it != ax.end(); ++it) {
        if (it.key() != "path" && it.key() != "values") {
          parse_fail("unknown field '" + where + "." + it.key() + "'");
        }
      }
      if (!ax.contains("path") || !ax["path"].is_string()) {
        parse_fail("field '" + where + ".path': expected a string");
      }
      if (!ax.contains("values") || !ax["values"].is_array()) {
        parse_fail("field '" + where + ".values': expected an array");
      }
      SweepAxis a;
      a.path = ax["path"].get<std::string>();
      if (std::find(names.begin(), names.end(), a.path) == names.end()) {
        parse_fail("field '" + where + ".path': unknown scenario path '" + a.path + "'");
      }
      if (!seen.insert(a.path).second) value_fail(where + ".path: '" + a.path + "' swept twice");
      if (ax["values"].empty()) continue;  // an empty axis sweeps nothing
      for (const Json& v : ax["values"]) a.values.push_back(v);
      spec.axes.push_back(std::move(a));
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
      parse_fail("field 'seed': expected a nonnegative integer");
    }
    spec.master_seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("replicates")) {
    if (!j["replicates"].is_number_integer()) parse_fail("field 'replicates': expected an integer");
    const long long r = j["replicates"].get<long long>();
    if (r < 1) value_fail("replicates: must be at least 1");
    spec.replicates = static_cast<std::size_t>(r);
  }
  if (j.contains("seeds")) {
    if (!j["seeds"].is_array()) parse_fail("field 'seeds': expected an array");
    for (const Json& s : j["seeds"]) {
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
        parse_fail("field 'seeds': expected nonnegative integers");
      }
      spec.seeds.push_back(s.get<std::uint64_t>());
    }
    if (spec.seeds.empty()) value_fail("seeds: list must not be empty");
    spec.replicates = spec.seeds.size();
  }
  if (j.contains("emit_traces")) {
    if (!j["emit_traces"].is_boolean()) parse_fail("field 'emit_traces': expected true or false");
    spec.emit_traces = j["emit_traces"].get<bool>();
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) parse_fail("field 'out_dir': expected a string");
    spec.out_dir = j["out_dir"].get<std::string>();
  }
  (void)spec.points();  // every sweep point must resolve to a valid scenario
  return spec;
}

ExperimentSpec parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    parse_fail(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open configuration '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

ExperimentResult execute(const ExperimentSpec& spec, unsigned threads) {
  ExperimentResult res;
  res.points = spec.points();
  res.seeds = spec.episode_seeds();
  std::vector<ScenarioConfig> configs;
  configs.reserve(res.points.size() * res.seeds.size());
  for (const SweepPoint& p : res.points) {
    for (std::uint64_t s : res.seeds) {
      ScenarioConfig c = p.config;
      c.rng_seed = s;
      configs.push_back(std::move(c));
    }
  }
  res.rows = sweep(configs, threads);
  for (const SweepRow& r : res.rows) {
    if (!r.metrics) ++res.failed;
  }
  return res;
}

std::string metrics_csv(const ExperimentSpec& spec, const ExperimentResult& res) {
  const std::vector<std::string> axes = axis_columns(spec);
  std::ostringstream os;
  os << "point,replicate,seed";
  for (const std::string& a : axes) os << ',' << a;
  os << ",policy";
  for (const MetricColumn& c : metric_columns()) os << ',' << c.name;
  os << ",error\n";
  const std::size_t n_seeds = res.seeds.size();
  for (std::size_t p = 0; p < res.points.size(); ++p) {
    const SweepPoint& pt = res.points[p];
    for (std::size_t r = 0; r < n_seeds; ++r) {
      const SweepRow& row = res.rows[p * n_seeds + r];
      os << p << ',' << r << ',' << res.seeds[r];
      for (const std::string& a : axes) os << ',' << csv_escape(cell(override_value(pt, a)));
      os << ',' << to_string(pt.config.policy);
      for (const MetricColumn& c : metric_columns()) {
        os << ',';
        if (row.metrics) os << fmt(c.get(*row.metrics));
      }
      os << ',' << csv_escape(row.error) << '\n';
    }
  }
  return os.str();
}

std::string summary_csv(const ExperimentSpec& spec, const ExperimentResult& res) {
  const std::vector<std::string> axes = axis_columns(spec);
  std::ostringstream os;
  os << "point";
  for (const std::string& a : axes) os << ',' << a;
  os << ",policy,n_ok,n_failed";
  for (const std::string& m : summary_metrics()) os << ',' << m << "_mean," << m << "_stderr";
  os << '\n';
  const std::size_t n_seeds = res.seeds.size();
  for (std::size_t p = 0; p < res.points.size(); ++p) {
    const SweepPoint& pt = res.points[p];
    std::vector<const EpisodeMetrics*> ok;
    for (std::size_t r = 0; r < n_seeds; ++r) {
      const SweepRow& row = res.rows[p * n_seeds + r];
      if (row.metrics) ok.push_back(&*row.metrics);
    }
    os << p;
    for (const std::string& a : axes) os << ',' << csv_escape(cell(override_value(pt, a)));
    os << ',' << to_string(pt.config.policy) << ',' << ok.size() << ',' << (n_seeds - ok.size());
    for (const std::string& name : summary_metrics()) {
      const MetricColumn* col = nullptr;
      for (const MetricColumn& c : metric_columns()) {
        if (name == c.name) col = &c;
      }
      if (ok.empty()) {
        os << ",,";
        continue;
      }
      double mean = 0.0;
      for (const EpisodeMetrics* m : ok) mean += col->get(*m);
      mean /= static_cast<double>(ok.size());
      double se = 0.0;
      if (ok.size() > 1) {
        double ss = 0.0;
        for (const EpisodeMetrics* m : ok) ss += (col->get(*m) - mean) * (col->get(*m) - mean);
        se = std::sqrt(ss / static_cast<double>(ok.size() - 1) / static_cast<double>(ok.size()));
      }
      os << ',' << fmt(mean) << ',' << fmt(se);
    }
    os << '\n';
  }
  return os.str();
}

std::string manifest_json(const ExperimentSpec& spec, const ExperimentResult& res) {
  Json j;
  j["name"] = spec.name;
  j["scenario"] = spec.base;
  Json sweep = Json::array();
  for (const SweepAxis& a : spec.axes) sweep.push_back({{"path", a.path}, {"values", a.values}});
  j["sweep"] = sweep;
  j["seeds"] = res.seeds;
  j["emit_traces"] = spec.emit_traces;
  Json man;
  man["version"] = version_string();
  man["master_seed"] = spec.master_seed;
  man["replicates"] = res.seeds.size();
  man["rows"] = res.rows.size();
  man["failed_rows"] = res.failed;
  Json pts = Json::array();
  for (const SweepPoint& p : res.points) {
    Json o = Json::object();
    for (const auto& [k, v] : p.overrides) o[k] = v;
    pts.push_back({{"point", p.index}, {"overrides", o}});
  }
  man["points"] = pts;
  j["manifest"] = man;
  return j.dump(2) + "\n";
}

std::string traces_csv(const EpisodeMetrics& m) {
  std::ostringstream os;
  os << "slot,eta,r_mbs,r_veh,r_novc,energy,cached_mass,xi_eff,max_backlog,objective,requests,hits\n";
  for (const SlotTrace& t : m.traces) {
    os << t.slot << ',' << fmt(t.eta) << ',' << fmt(t.r_mbs) << ',' << fmt(t.r_veh) << ','
       << fmt(t.r_novc) << ',' << fmt(t.energy) << ',' << fmt(t.cached_mass) << ','
       << fmt(t.xi_eff) << ',' << fmt(t.max_backlog) << ',' << fmt(t.objective) << ','
       << t.requests << ',' << t.hits << '\n';
  }
  return os.str();
}

std::string sweep_listing(const ExperimentSpec& spec) {
  const std::vector<SweepPoint> pts = spec.points();
  const std::vector<std::uint64_t> seeds = spec.episode_seeds();
  std::ostringstream os;
  os << "# " << spec.name << ": " << pts.size() << " point(s) x " << seeds.size()
     << " seed(s) = " << pts.size() * seeds.size() << " episode(s)\n";
  os << "# seeds:";
  for (std::uint64_t s : seeds) os << ' ' << s;
  os << '\n';
  for (const SweepPoint& p : pts) {
    os << p.index;
    if (p.overrides.empty()) os << "  (base scenario)";
    for (const auto& [k, v] : p.overrides) os << "  " << k << '=' << cell(v);
    os << '\n';
  }
  return os.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::kIoError, "write failed for '" + path.string() + "'");
}

}  // namespace

std::size_t write_outputs(const ExperimentSpec& spec, const ExperimentResult& res) {
  namespace fs = std::filesystem;
  const fs::path dir(spec.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create '" + dir.string() + "': " + ec.message());
  write_file(dir / "metrics.csv", metrics_csv(spec, res));
  write_file(dir / "summary.csv", summary_csv(spec, res));
  write_file(dir / "manifest.json", manifest_json(spec, res));
  if (spec.emit_traces) {
    fs::create_directories(dir / "traces", ec);
    if (ec) fail(ErrorCode::kIoError, "cannot create traces directory: " + ec.message());
    const std::size_t n_seeds = res.seeds.size();
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      if (!res.rows[i].metrics) continue;
      const std::string name = "p" + std::to_string(i / n_seeds) + "_r" +
                               std::to_string(i % n_seeds) + ".csv";
      write_file(dir / "traces" / name, traces_csv(*res.rows[i].metrics));
    }
  }
  return res.failed;
}

}  // namespace vcache
