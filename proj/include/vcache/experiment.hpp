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

#ifndef VCACHE_EXPERIMENT_HPP
#define VCACHE_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vcache/sim.hpp"

namespace vcache {

using Json = nlohmann::json;

/// One swept parameter: a dotted scenario path (e.g. "rates.lambda") and the
/// values it takes.
struct SweepAxis {
  std::string path;
  std::vector<Json> values;
};

struct SweepPoint {
  std::size_t index = 0;
  std::vector<std::pair<std::string, Json>> overrides;
  ScenarioConfig config;
};

struct ExperimentSpec {
  std::string name = "experiment";
  Json base;  ///< fully resolved scenario object
  std::vector<SweepAxis> axes;
  std::uint64_t master_seed = 1;
  std::size_t replicates = 1;
  std::vector<std::uint64_t> seeds;  ///< explicit episode seeds, if given
  bool emit_traces = false;
  std::string out_dir = "out";

  /// Episode seed of every replicate (explicit seeds, or derived from the
  /// master seed).
  std::vector<std::uint64_t> episode_seeds() const;

  /// Cartesian product of the axes, first axis varying slowest. No axes
  /// gives the single base point.
  std::vector<SweepPoint> points() const;
};

/// Names of every scenario field, in schema order.
std::vector<std::string> scenario_fields();

/// Strict reader: unknown fields raise ParseError naming the field, wrong
/// JSON types raise ParseError, out-of-range values raise ValidationError.
ScenarioConfig scenario_from_json(const Json& j);
Json scenario_to_json(const ScenarioConfig& c);

ExperimentSpec parse_config(const Json& j);
ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec load_config(const std::string& path);

struct ExperimentResult {
  std::vector<SweepPoint> points;
  std::vector<std::uint64_t> seeds;
  /// Row of point p, replicate r at p * seeds.size() + r.
  std::vector<SweepRow> rows;
  std::size_t failed = 0;
};

ExperimentResult execute(const ExperimentSpec& spec, unsigned threads);

std::string metrics_csv(const ExperimentSpec& spec, const ExperimentResult& res);
std::string summary_csv(const ExperimentSpec& spec, const ExperimentResult& res);
/// The resolved configuration, loadable again by parse_config, plus run
/// metadata under "manifest".
std::string manifest_json(const ExperimentSpec& spec, const ExperimentResult& res);
std::string traces_csv(const EpisodeMetrics& m);
/// Human-readable listing of the resolved sweep grid.
std::string sweep_listing(const ExperimentSpec& spec);

/// Writes metrics.csv, summary.csv, manifest.json (and traces/ when
/// requested) into spec.out_dir. Returns the number of failed rows.
std::size_t write_outputs(const ExperimentSpec& spec, const ExperimentResult& res);

const char* version_string() noexcept;

}  // namespace vcache

#endif  // VCACHE_EXPERIMENT_HPP
