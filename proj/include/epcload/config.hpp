// Copyright 2026 The epcload Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "epcload/autoscaler.hpp"
#include "epcload/delay_model.hpp"
#include "epcload/epc_sim.hpp"
#include "epcload/traffic.hpp"

namespace epcload {

enum class SimulationMode { PerMessage, SingleJob };

struct PopulationConfig {
  std::int64_t n_groups = 200;
  std::int64_t group_size = 50;
  std::vector<double> offsets_s;  // empty: uniform offsets from offset_seed
  std::uint64_t offset_seed = 1;

  std::int64_t total_sources() const noexcept { return n_groups * group_size; }
  SourcePopulation build(double period_T) const;
};

struct SimulationConfig {
  SimulationMode mode = SimulationMode::PerMessage;
  double warmup_s = 2.0;
  double link_latency_s = 0.0;
  double mme_crypto_work = 0.0;
};

struct TraceConfig {
  double window_s = 3600.0;
  /// Capacity multiplier applied to every entity when replaying traces,
  /// whose request counts are far below the synthetic scenarios.
  double capacity_scale = 1.0;
};

struct ScaleConfig {
  std::vector<std::int64_t> q_series;  // sources per window
  double window_s = 30.0;
  double warmup_s = 2.0;
  std::int64_t group_size = 50;
};

struct Config {
  TrafficParams traffic;
  PopulationConfig population;
  double horizon_s = 60.0;
  EpcProfiles profiles;
  std::optional<std::vector<HopSpec>> procedure;
  Topology topology;
  SimulationConfig simulation;
  ScalingPolicy policy;
  TraceConfig trace;
  ScaleConfig scale;

  /// The procedure template: explicit hops when configured, else the
  /// default CIoT flow.
  ProcedureTemplate procedure_template() const;
  /// Every field, defaults filled in, as JSON text.
  std::string resolved_json() const;
};

/// Profiles from the per-entity operation counts and capacities of the
/// reference deployment: UE 3 @ 1e3, eNB 2 @ 1e3, MME 9 @ 1e4,
/// HSS 1 @ 1e4, S-GW 3 @ 1e4, P-GW 1 @ 1e4 (messages per bearer at
/// messages per second).
EpcProfiles default_profiles();

/// Parses JSON config text. Only traffic.period_T_s is required; every
/// other field has a default. Errors name the offending field.
Config parse_config(const std::string& text);
/// Throws IoError when the file cannot be read.
Config load_config(const std::filesystem::path& path);

}  // namespace epcload
