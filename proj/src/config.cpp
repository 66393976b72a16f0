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

#include "epcload/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "epcload/errors.hpp"

namespace epcload {

using nlohmann::json;

namespace {

const json* member(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

const json& section(const json& root, const char* key, const json& empty) {
  const json* s = member(root, key);
  if (!s) return empty;
  if (!s->is_object()) throw ConfigError(std::string(key) + ": expected an object");
  return *s;
}

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> known) {
  for (const auto& [k, v] : obj.items())
    if (!known.count(k)) throw ConfigError(where + k + ": unknown field");
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError(where + key + ": expected a number");
  return v->get<double>();
}

double required_number(const json& obj, const char* key, const std::string& where) {
  if (!member(obj, key)) throw ConfigError(where + key + ": required field is missing");
  return number(obj, key, where, 0.0);
}

std::int64_t integer(const json& obj, const char* key, const std::string& where,
                     std::int64_t fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError(where + key + ": expected an integer");
  return v->get<std::int64_t>();
}

bool boolean(const json& obj, const char* key, const std::string& where, bool fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(where + key + ": expected true or false");
  return v->get<bool>();
}

std::string text(const json& obj, const char* key, const std::string& where,
                 const std::string& fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError(where + key + ": expected a string");
  return v->get<std::string>();
}

template <class T>
std::vector<T> list(const json& obj, const char* key, const std::string& where) {
  const json* v = member(obj, key);
  if (!v) return {};
  if (!v->is_array()) throw ConfigError(where + key + ": expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const auto& e = (*v)[i];
    const bool ok = std::is_integral_v<T> ? e.is_number_integer() : e.is_number();
    if (!ok)
      throw ConfigError(where + key + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(e.get<T>());
  }
  return out;
}

Entity entity_field(const json& obj, const std::string& where) {
  const auto name = text(obj, "entity", where, "");
  if (name.empty()) throw ConfigError(where + "entity: required field is missing");
  const auto e = parse_entity(name);
  if (!e) throw ConfigError(where + "entity: unknown entity '" + name + "'");
  return *e;
}

std::string mode_name(SimulationMode m) {
  return m == SimulationMode::SingleJob ? "single-job" : "per-message";
}

}  // namespace

SourcePopulation PopulationConfig::build(double period_T) const {
  if (offsets_s.empty()) return SourcePopulation::uniform(n_groups, group_size, period_T, offset_seed);
  return SourcePopulation::fixed(offsets_s, group_size, period_T);
}

EpcProfiles default_profiles() {
  const EntityProfile p[] = {
      {Entity::UE, 3.0, 1e3, 3},  {Entity::eNB, 2.0, 1e3, 2}, {Entity::MME, 9.0, 1e4, 9},
      {Entity::HSS, 1.0, 1e4, 1}, {Entity::SGW, 3.0, 1e4, 3}, {Entity::PGW, 1.0, 1e4, 1},
  };
  return EpcProfiles(p);
}

ProcedureTemplate Config::procedure_template() const {
  if (procedure) return ProcedureTemplate::from_specs(*procedure, profiles);
  return ProcedureTemplate::ciot_default(profiles);
}

Config parse_config(const std::string& source) {
  json root;
  try {
    root = json::parse(source);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(root, "",
                 {"traffic", "population", "horizon_s", "entities", "procedure", "topology",
                  "simulation", "policy", "trace", "scale"});
  const json empty = json::object();
  Config c;

  const auto& tr = section(root, "traffic", empty);
  reject_unknown(tr, "traffic.",
                 {"period_T_s", "slot_delta_s", "alarm_rate_lambda_A", "regular_rate_epsilon",
                  "tx_probability"});
  const double T = required_number(tr, "period_T_s", "traffic.");
  c.traffic = TrafficParams::make(T, number(tr, "slot_delta_s", "traffic.", 1e-5),
                                  number(tr, "alarm_rate_lambda_A", "traffic.", 1.0),
                                  number(tr, "regular_rate_epsilon", "traffic.", 0.0),
                                  number(tr, "tx_probability", "traffic.", 0.0));

  const auto& po = section(root, "population", empty);
  reject_unknown(po, "population.", {"n_groups", "group_size", "offsets_s", "offset_seed"});
  c.population.group_size = integer(po, "group_size", "population.", c.population.group_size);
  c.population.offsets_s = list<double>(po, "offsets_s", "population.");
  c.population.n_groups =
      c.population.offsets_s.empty()
          ? integer(po, "n_groups", "population.", c.population.n_groups)
          : static_cast<std::int64_t>(c.population.offsets_s.size());
  if (member(po, "n_groups") && integer(po, "n_groups", "population.", 0) != c.population.n_groups)
    throw ConfigError("population.n_groups: does not match the number of offsets_s");
  c.population.offset_seed =
      static_cast<std::uint64_t>(integer(po, "offset_seed", "population.", 1));
  if (c.population.n_groups < 1) throw ConfigError("population.n_groups: must be >= 1");
  if (c.population.group_size < 1) throw ConfigError("population.group_size: must be >= 1");
  try {
    c.population.build(T).validate(T);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("population.offsets_s: ") + e.what());
  }

  c.horizon_s = number(root, "horizon_s", "", c.horizon_s);
  if (!(c.horizon_s >= T)) throw ConfigError("horizon_s: must be at least traffic.period_T_s");

  if (const json* ents = member(root, "entities")) {
    if (!ents->is_array() || ents->empty())
      throw ConfigError("entities: expected a non-empty array");
    for (std::size_t i = 0; i < ents->size(); ++i) {
      const auto& e = (*ents)[i];
      const auto where = "entities[" + std::to_string(i) + "].";
      if (!e.is_object()) throw ConfigError(where.substr(0, where.size() - 1) + ": expected an object");
      reject_unknown(e, where, {"entity", "ops_per_bearer", "capacity", "messages_per_bearer"});
      EntityProfile p;
      p.entity = entity_field(e, where);
      if (c.profiles.has(p.entity))
        throw ConfigError(where + "entity: duplicate entry for " + std::string(entity_name(p.entity)));
      p.ops_per_bearer = required_number(e, "ops_per_bearer", where);
      p.capacity = required_number(e, "capacity", where);
      p.messages_per_bearer = static_cast<int>(integer(e, "messages_per_bearer", where, 1));
      if (!(p.ops_per_bearer > 0.0)) throw ConfigError(where + "ops_per_bearer: must be positive");
      if (!(p.capacity > 0.0)) throw ConfigError(where + "capacity: must be positive");
      if (p.messages_per_bearer < 1) throw ConfigError(where + "messages_per_bearer: must be >= 1");
      c.profiles.set(p);
    }
    for (Entity e : kAllEntities)
      if (!c.profiles.has(e))
        throw ConfigError("entities: missing profile for " + std::string(entity_name(e)));
  } else {
    c.profiles = default_profiles();
  }

  if (const json* pr = member(root, "procedure")) {
    if (!pr->is_array()) throw ConfigError("procedure: expected an array of hops");
    if (pr->empty()) throw ConfigError("procedure: template has no hops");
    std::vector<HopSpec> specs;
    for (std::size_t i = 0; i < pr->size(); ++i) {
      const auto& h = (*pr)[i];
      const auto where = "procedure[" + std::to_string(i) + "].";
      if (!h.is_object()) throw ConfigError(where.substr(0, where.size() - 1) + ": expected an object");
      reject_unknown(h, where, {"entity", "tag", "weight", "out_of_band"});
      HopSpec s;
      s.entity = entity_field(h, where);
      s.tag = text(h, "tag", where, "hop" + std::to_string(i));
      s.weight = number(h, "weight", where, 1.0);
      s.out_of_band = boolean(h, "out_of_band", where, false);
      specs.push_back(s);
    }
    c.procedure = std::move(specs);
  }
  (void)c.procedure_template();

  const auto& to = section(root, "topology", empty);
  reject_unknown(to, "topology.", {"sources_per_enb", "enbs_per_sgw"});
  c.topology.sources_per_enb = integer(to, "sources_per_enb", "topology.", c.topology.sources_per_enb);
  c.topology.enbs_per_sgw = integer(to, "enbs_per_sgw", "topology.", c.topology.enbs_per_sgw);
  if (c.topology.sources_per_enb < 1) throw ConfigError("topology.sources_per_enb: must be >= 1");
  if (c.topology.enbs_per_sgw < 1) throw ConfigError("topology.enbs_per_sgw: must be >= 1");

  const auto& si = section(root, "simulation", empty);
  reject_unknown(si, "simulation.", {"mode", "warmup_s", "link_latency_s", "mme_crypto_work"});
  const auto mode = text(si, "mode", "simulation.", "per-message");
  if (mode == "per-message")
    c.simulation.mode = SimulationMode::PerMessage;
  else if (mode == "single-job")
    c.simulation.mode = SimulationMode::SingleJob;
  else
    throw ConfigError("simulation.mode: expected 'per-message' or 'single-job'");
  c.simulation.warmup_s = number(si, "warmup_s", "simulation.", c.simulation.warmup_s);
  c.simulation.link_latency_s = number(si, "link_latency_s", "simulation.", 0.0);
  c.simulation.mme_crypto_work = number(si, "mme_crypto_work", "simulation.", 0.0);
  if (!(c.simulation.warmup_s >= 0.0 && c.simulation.warmup_s < c.horizon_s))
    throw ConfigError("simulation.warmup_s: must lie in [0, horizon_s)");
  if (!(c.simulation.link_latency_s >= 0.0))
    throw ConfigError("simulation.link_latency_s: must be >= 0");
  if (!(c.simulation.mme_crypto_work >= 0.0))
    throw ConfigError("simulation.mme_crypto_work: must be >= 0");

  const auto& pl = section(root, "policy", empty);
  reject_unknown(pl, "policy.",
                 {"target_delay_s", "percentile", "multipliers", "scope", "hysteresis"});
  c.policy.target_delay = number(pl, "target_delay_s", "policy.", c.policy.target_delay);
  c.policy.percentile = number(pl, "percentile", "policy.", c.policy.percentile);
  if (member(pl, "multipliers")) c.policy.multipliers = list<double>(pl, "multipliers", "policy.");
  const auto scope = text(pl, "scope", "policy.", "all");
  if (scope == "all")
    c.policy.scope = ScalingScope::AllEntities;
  else if (scope == "mme")
    c.policy.scope = ScalingScope::MmeOnly;
  else
    throw ConfigError("policy.scope: expected 'all' or 'mme'");
  c.policy.hysteresis = number(pl, "hysteresis", "policy.", c.policy.hysteresis);
  c.policy.validate();

  const auto& tc = section(root, "trace", empty);
  reject_unknown(tc, "trace.", {"window_s", "capacity_scale"});
  c.trace.window_s = number(tc, "window_s", "trace.", c.trace.window_s);
  c.trace.capacity_scale = number(tc, "capacity_scale", "trace.", c.trace.capacity_scale);
  if (!(c.trace.window_s > 0.0)) throw ConfigError("trace.window_s: must be positive");
  if (!(c.trace.capacity_scale > 0.0)) throw ConfigError("trace.capacity_scale: must be positive");

  const auto& sc = section(root, "scale", empty);
  reject_unknown(sc, "scale.", {"q_series", "window_s", "warmup_s", "group_size"});
  c.scale.q_series = list<std::int64_t>(sc, "q_series", "scale.");
  c.scale.window_s = number(sc, "window_s", "scale.", c.scale.window_s);
  c.scale.warmup_s = number(sc, "warmup_s", "scale.", c.scale.warmup_s);
  c.scale.group_size = integer(sc, "group_size", "scale.", c.scale.group_size);
  if (!(c.scale.window_s > 0.0)) throw ConfigError("scale.window_s: must be positive");
  if (!(c.scale.warmup_s >= 0.0)) throw ConfigError("scale.warmup_s: must be >= 0");
  if (c.scale.group_size < 1) throw ConfigError("scale.group_size: must be >= 1");
  for (std::size_t i = 0; i < c.scale.q_series.size(); ++i) {
    const auto q = c.scale.q_series[i];
    if (q < 1 || q % c.scale.group_size != 0)
      throw ConfigError("scale.q_series[" + std::to_string(i) +
                        "]: must be a positive multiple of scale.group_size");
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("config: cannot read " + path.string());
  return parse_config(buf.str());
}

std::string Config::resolved_json() const {
  json j;
  j["traffic"] = {{"period_T_s", traffic.period_T},
                  {"slot_delta_s", traffic.slot_delta},
                  {"n_slots", traffic.n_slots},
                  {"alarm_rate_lambda_A", traffic.alarm_rate_lambda_A},
                  {"regular_rate_epsilon", traffic.regular_rate_epsilon},
                  {"tx_probability", traffic.tx_probability}};
  j["population"] = {{"n_groups", population.n_groups},
                     {"group_size", population.group_size},
                     {"offsets_s", population.offsets_s},
                     {"offset_seed", population.offset_seed}};
  j["horizon_s"] = horizon_s;
  json ents = json::array();
  for (Entity e : kAllEntities) {
    if (!profiles.has(e)) continue;
    const auto& p = profiles.at(e);
    ents.push_back({{"entity", std::string(entity_name(e))},
                    {"ops_per_bearer", p.ops_per_bearer},
                    {"capacity", p.capacity},
                    {"messages_per_bearer", p.messages_per_bearer}});
  }
  j["entities"] = ents;
  json hops = json::array();
  for (const auto& h : procedure_template().hops)
    hops.push_back({{"entity", std::string(entity_name(h.entity))},
                    {"tag", h.tag},
                    {"work", h.work},
                    {"out_of_band", h.out_of_band}});
  j["procedure"] = hops;
  j["topology"] = {{"sources_per_enb", topology.sources_per_enb},
                   {"enbs_per_sgw", topology.enbs_per_sgw}};
  j["simulation"] = {{"mode", mode_name(simulation.mode)},
                     {"warmup_s", simulation.warmup_s},
                     {"link_latency_s", simulation.link_latency_s},
                     {"mme_crypto_work", simulation.mme_crypto_work}};
  j["policy"] = {{"target_delay_s", policy.target_delay},
                 {"percentile", policy.percentile},
                 {"multipliers", policy.multipliers},
                 {"scope", policy.scope == ScalingScope::MmeOnly ? "mme" : "all"},
                 {"hysteresis", policy.hysteresis}};
  j["trace"] = {{"window_s", trace.window_s}, {"capacity_scale", trace.capacity_scale}};
  j["scale"] = {{"q_series", scale.q_series},
                {"window_s", scale.window_s},
                {"warmup_s", scale.warmup_s},
                {"group_size", scale.group_size}};
  return j.dump(2);
}

}  // namespace epcload
