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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "epcload/delay_model.hpp"
#include "epcload/traffic.hpp"

namespace epcload {

/// One message of the bearer procedure processed at an entity.
struct MessageHop {
  Entity entity = Entity::MME;
  double work = 0.0;  // same units as the entity's capacity
  std::string tag;
  /// Dispatched when its predecessor completes, without holding up the
  /// rest of the chain (the RRC connection release toward the UE).
  bool out_of_band = false;
};

/// Hop description before work is assigned: O_X is split over the hops of
/// entity X in proportion to `weight`.
struct HopSpec {
  Entity entity = Entity::MME;
  std::string tag;
  double weight = 1.0;
  bool out_of_band = false;
};

/// The 19-message control-plane CIoT bearer flow: RRC early data,
/// S1-AP initial UE message, authentication with the HSS, identity check,
/// session creation through S-GW and P-GW, uplink data forwarding, bearer
/// release, and the out-of-band RRC release. Per-entity message counts:
/// UE 3, eNB 2, MME 9, HSS 1, S-GW 3, P-GW 1.
std::vector<HopSpec> ciot_hop_specs();

struct ProcedureTemplate {
  std::vector<MessageHop> hops;

  /// ciot_hop_specs() with each entity's O_X split equally over its
  /// hops. Throws ConfigError when a profile's messages_per_bearer
  /// disagrees with the flow's count for that entity.
  static ProcedureTemplate ciot_default(const EpcProfiles& profiles);

  /// Hops with work O_X * weight / (sum of weights at X).
  static ProcedureTemplate from_specs(const std::vector<HopSpec>& specs,
                                      const EpcProfiles& profiles);

  /// The whole bearer as one MME job of size O_MME.
  static ProcedureTemplate single_job(const EntityProfile& mme);

  double total_work(Entity e) const;

  /// Non-empty, every work > 0, at most 32 hops, and per-entity totals
  /// equal to O_X (relative 1e-9) for every entity that has hops.
  void validate(const EpcProfiles& profiles) const;
};

/// How sources map onto eNBs and eNBs onto S-GWs. MME, HSS and P-GW are
/// single instances; every UE processes its own messages.
struct Topology {
  std::int64_t sources_per_enb = 50;
  std::int64_t enbs_per_sgw = 10;
};

struct SimulationOptions {
  Topology topology;
  /// Utilization denominator; <= 0 means "time of the last completion".
  double horizon = 0.0;
  /// Constant latency added before each hop is delivered.
  double link_latency = 0.0;
  /// Extra MME work per request for payload decryption and integrity
  /// checks, added to the data-forwarding hop.
  double mme_crypto_work = 0.0;
};

struct DelaySample {
  std::uint64_t request_id = 0;
  double arrival = 0.0;
  double completion = 0.0;
  std::array<double, 6> breakdown{};  // time at each entity, by Entity index
  double transit = 0.0;               // link latency
  double constant_offset = 0.0;       // K in single-job mode

  double delay() const noexcept { return completion - arrival; }
};

struct EntityUsage {
  Entity entity = Entity::MME;
  std::int64_t instances = 0;
  double busy_time = 0.0;  // summed over instances
  double work_done = 0.0;
  double job_time_integral = 0.0;
  double utilization_mean = 0.0;
  double utilization_max = 0.0;
};

struct SimulationResult {
  std::vector<DelaySample> samples;  // in request order
  std::vector<EntityUsage> usage;    // entities with at least one hop
  double horizon = 0.0;

  std::vector<double> delays() const;
  const EntityUsage* usage_of(Entity e) const;
};

/// Discrete-event simulation of every request in `stream` walking the
/// template hop by hop through processor-sharing servers. Deterministic
/// for a fixed stream. Throws ConfigError on an empty template.
SimulationResult run_bearer_simulation(const EventStream& stream,
                                       const ProcedureTemplate& procedure,
                                       const EpcProfiles& profiles,
                                       const SimulationOptions& options = {});

/// M/D/1-PS counterpart of the analytic model: each request is one MME job
/// of size O_MME, plus the constant K.
std::vector<DelaySample> single_job_mode(const EventStream& stream, const EntityProfile& mme,
                                         double K);

/// Utilization report as structured text (JSON).
std::string usage_json_text(const SimulationResult& result);

}  // namespace epcload
