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

#include "epcload/epc_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "epcload/errors.hpp"
#include "epcload/ps_server.hpp"

namespace epcload {

namespace {

constexpr std::size_t kMaxHops = 32;

int idx(Entity e) { return static_cast<int>(e); }

}  // namespace

std::vector<HopSpec> ciot_hop_specs() {
  return {
      {Entity::UE, "rrc_early_data_request"},
      {Entity::eNB, "s1ap_initial_ue_message"},
      {Entity::MME, "initial_ue_message"},
      {Entity::HSS, "authentication_info"},
      {Entity::MME, "authentication_request"},
      {Entity::UE, "authentication_response"},
      {Entity::MME, "authentication_check"},
      {Entity::MME, "identity_check"},
      {Entity::MME, "create_session_request"},
      {Entity::SGW, "create_session_request"},
      {Entity::PGW, "create_session"},
      {Entity::SGW, "create_session_response"},
      {Entity::MME, "bearer_established"},
      {Entity::MME, "data_forwarding"},
      {Entity::SGW, "uplink_data"},
      {Entity::MME, "release_access_bearers"},
      {Entity::MME, "ue_context_release_command"},
      {Entity::eNB, "ue_context_release"},
      {Entity::UE, "rrc_connection_release", 1.0, true},
  };
}

ProcedureTemplate ProcedureTemplate::from_specs(const std::vector<HopSpec>& specs,
                                                const EpcProfiles& profiles) {
  if (specs.empty()) throw ConfigError("procedure: template has no hops");
  std::array<double, 6> weight{};
  for (const auto& s : specs) {
    if (!(s.weight > 0.0) || !std::isfinite(s.weight))
      throw ConfigError("procedure: hop '" + s.tag + "' has a non-positive weight");
    weight[idx(s.entity)] += s.weight;
  }
  ProcedureTemplate t;
  for (const auto& s : specs) {
    const auto& p = profiles.at(s.entity);
    t.hops.push_back({s.entity, p.ops_per_bearer * s.weight / weight[idx(s.entity)], s.tag,
                      s.out_of_band});
  }
  t.validate(profiles);
  return t;
}

ProcedureTemplate ProcedureTemplate::ciot_default(const EpcProfiles& profiles) {
  const auto specs = ciot_hop_specs();
  std::array<int, 6> count{};
  for (const auto& s : specs) ++count[idx(s.entity)];
  for (Entity e : kAllEntities) {
    const auto& p = profiles.at(e);
    if (p.messages_per_bearer != count[idx(e)]) {
      std::ostringstream msg;
      msg << "procedure: " << entity_name(e) << " has messages_per_bearer "
          << p.messages_per_bearer << " but the default flow has " << count[idx(e)]
          << " messages there; supply an explicit procedure";
      throw ConfigError(msg.str());
    }
  }
  return from_specs(specs, profiles);
}

ProcedureTemplate ProcedureTemplate::single_job(const EntityProfile& mme) {
  if (mme.entity != Entity::MME) throw ConfigError("procedure: single job needs the MME profile");
  ProcedureTemplate t;
  t.hops.push_back({Entity::MME, mme.ops_per_bearer, "bearer", false});
  return t;
}

double ProcedureTemplate::total_work(Entity e) const {
  double s = 0.0;
  for (const auto& h : hops)
    if (h.entity == e) s += h.work;
  return s;
}

void ProcedureTemplate::validate(const EpcProfiles& profiles) const {
  if (hops.empty()) throw ConfigError("procedure: template has no hops");
  if (hops.size() > kMaxHops) throw ConfigError("procedure: at most 32 hops are supported");
  if (hops.front().out_of_band)
    throw ConfigError("procedure: the first hop cannot be out of band");
  for (const auto& h : hops) {
    if (!(h.work > 0.0) || !std::isfinite(h.work))
      throw ConfigError("procedure: hop '" + h.tag + "' has non-positive work");
  }
  for (Entity e : kAllEntities) {
    const double w = total_work(e);
    if (w == 0.0) continue;
    const double o = profiles.at(e).ops_per_bearer;
    if (std::abs(w - o) > 1e-9 * std::max(1.0, std::abs(o))) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "procedure: hops at " << entity_name(e) << " sum to " << w
          << " but ops_per_bearer is " << o;
      throw ConfigError(msg.str());
    }
  }
}

std::vector<double> SimulationResult::delays() const {
  std::vector<double> d;
  d.reserve(samples.size());
  for (const auto& s : samples) d.push_back(s.delay());
  return d;
}

const EntityUsage* SimulationResult::usage_of(Entity e) const {
  for (const auto& u : usage)
    if (u.entity == e) return &u;
  return nullptr;
}

namespace {

enum class Kind : std::uint8_t { ServerWake, HopDone, Deliver };

struct SimEvent {
  double time;
  std::uint64_t seq;
  Kind kind;
  std::uint32_t a;  // server index or request index
  std::uint32_t b;  // server version or hop index

  bool operator>(const SimEvent& o) const noexcept {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

struct RequestState {
  double arrival = 0.0;
  double chain_end = -1.0;
  double hop_start = 0.0;
  double last_oob_end = -1.0;
  Entity last_oob_entity = Entity::UE;
  int pending = 0;  // hops dispatched and not finished
  std::uint32_t instance_enb = 0;
  std::uint32_t instance_sgw = 0;
};

class Simulator {
 public:
  Simulator(const EventStream& stream, const ProcedureTemplate& procedure,
            const EpcProfiles& profiles, const SimulationOptions& options)
      : stream_(stream), proc_(procedure), options_(options) {
    procedure.validate(profiles);
    if (options.link_latency < 0.0) throw ConfigError("simulation: link_latency must be >= 0");
    if (options.mme_crypto_work < 0.0)
      throw ConfigError("simulation: mme_crypto_work must be >= 0");
    if (options.topology.sources_per_enb < 1 || options.topology.enbs_per_sgw < 1)
      throw ConfigError("topology: sources_per_enb and enbs_per_sgw must be >= 1");
    if (stream.size() >= std::numeric_limits<std::uint32_t>::max())
      throw ConfigError("simulation: too many requests for one run");

    if (options.mme_crypto_work > 0.0) add_crypto_work();

    for (const auto& h : proc_.hops) present_[idx(h.entity)] = true;
    for (Entity e : kAllEntities)
      if (present_[idx(e)]) capacity_[idx(e)] = profiles.at(e).capacity;

    // Instances: MME, HSS, P-GW single; eNB and S-GW from the topology.
    std::int64_t max_source = 0;
    for (std::size_t i = 0; i < stream.size(); ++i)
      max_source = std::max(max_source, source_of(i));
    const auto n_enb = max_source / options.topology.sources_per_enb + 1;
    const auto n_sgw = (n_enb - 1) / options.topology.enbs_per_sgw + 1;
    instances_ = {1, n_enb, 1, 1, n_sgw, 1};
    for (Entity e : {Entity::eNB, Entity::MME, Entity::HSS, Entity::SGW, Entity::PGW}) {
      base_[idx(e)] = servers_.size();
      if (!present_[idx(e)]) continue;
      for (std::int64_t k = 0; k < instances_[idx(e)]; ++k) {
        servers_.emplace_back(capacity_[idx(e)]);
        server_entity_.push_back(e);
      }
    }
    version_.assign(servers_.size(), 0);
  }

  SimulationResult run() {
    SimulationResult out;
    const std::size_t n = stream_.size();
    requests_.resize(n);
    out.samples.resize(n);
    samples_ = &out.samples;

    std::size_t next = 0;
    while (next < n || !heap_.empty()) {
      const bool take_arrival =
          next < n && (heap_.empty() || stream_[next].time <= heap_.top().time);
      if (take_arrival) {
        start_request(next);
        ++next;
        continue;
      }
      const SimEvent ev = heap_.top();
      heap_.pop();
      switch (ev.kind) {
        case Kind::ServerWake:
          if (ev.b == version_[ev.a]) collect(ev.a, ev.time);
          break;
        case Kind::HopDone:
          hop_done(ev.a, ev.b, ev.time);
          break;
        case Kind::Deliver:
          submit(ev.a, ev.b, ev.time);
          break;
      }
    }

    double last = 0.0;
    for (const auto& s : out.samples) last = std::max(last, s.completion);
    out.horizon = options_.horizon > 0.0 ? options_.horizon : last;

    for (Entity e : kAllEntities) {
      if (!present_[idx(e)]) continue;
      EntityUsage u;
      u.entity = e;
      if (e == Entity::UE) {
        u.instances = 0;
        u.busy_time = ue_busy_;
        u.work_done = ue_busy_ * capacity_[idx(e)];
        u.job_time_integral = ue_busy_;
        out.usage.push_back(u);
        continue;
      }
      u.instances = instances_[idx(e)];
      for (std::int64_t k = 0; k < u.instances; ++k) {
        auto& s = servers_[base_[idx(e)] + static_cast<std::size_t>(k)];
        s.advance(std::max(s.now(), out.horizon));
        u.busy_time += s.busy_time();
        u.work_done += s.work_done();
        u.job_time_integral += s.job_time_integral();
        const double util = out.horizon > 0.0 ? s.busy_time() / out.horizon : 0.0;
        u.utilization_max = std::max(u.utilization_max, util);
      }
      u.utilization_mean = out.horizon > 0.0
                               ? u.busy_time / (out.horizon * static_cast<double>(u.instances))
                               : 0.0;
      out.usage.push_back(u);
    }
    return out;
  }

 private:
  std::int64_t source_of(std::size_t i) const {
    const auto s = stream_[i].source_id;
    return s >= 0 ? s : static_cast<std::int64_t>(i);
  }

  void add_crypto_work() {
    auto it = std::find_if(proc_.hops.begin(), proc_.hops.end(), [](const MessageHop& h) {
      return h.entity == Entity::MME && h.tag == "data_forwarding";
    });
    if (it == proc_.hops.end()) {
      auto rit = std::find_if(proc_.hops.rbegin(), proc_.hops.rend(),
                              [](const MessageHop& h) { return h.entity == Entity::MME; });
      if (rit == proc_.hops.rend())
        throw ConfigError("simulation: mme_crypto_work needs an MME hop");
      it = std::prev(rit.base());
    }
    it->work += options_.mme_crypto_work;
  }

  void push(double t, Kind k, std::uint32_t a, std::uint32_t b) {
    heap_.push({t, seq_++, k, a, b});
  }

  void reschedule(std::size_t s) {
    ++version_[s];
    const double t = servers_[s].next_completion();
    if (std::isfinite(t)) push(t, Kind::ServerWake, static_cast<std::uint32_t>(s), version_[s]);
  }

  static std::uint64_t job_id(std::uint32_t req, std::uint32_t hop) {
    return (static_cast<std::uint64_t>(req) << 5) | hop;
  }

  void start_request(std::size_t i) {
    auto& r = requests_[i];
    r.arrival = stream_[i].time;
    const auto enb = source_of(i) / options_.topology.sources_per_enb;
    r.instance_enb = static_cast<std::uint32_t>(enb);
    r.instance_sgw = static_cast<std::uint32_t>(enb / options_.topology.enbs_per_sgw);
    auto& smp = (*samples_)[i];
    smp.request_id = i;
    smp.arrival = r.arrival;
    dispatch(static_cast<std::uint32_t>(i), 0, r.arrival);
  }

  void dispatch(std::uint32_t req, std::uint32_t hop, double t) {
    ++requests_[req].pending;
    if (options_.link_latency > 0.0) {
      if (!proc_.hops[hop].out_of_band) (*samples_)[req].transit += options_.link_latency;
      push(t + options_.link_latency, Kind::Deliver, req, hop);
    } else {
      submit(req, hop, t);
    }
  }

  std::size_t server_for(const RequestState& r, Entity e) const {
    switch (e) {
      case Entity::eNB: return base_[idx(e)] + r.instance_enb;
      case Entity::SGW: return base_[idx(e)] + r.instance_sgw;
      default: return base_[idx(e)];
    }
  }

  void submit(std::uint32_t req, std::uint32_t hop, double t) {
    auto& r = requests_[req];
    const auto& h = proc_.hops[hop];
    if (!h.out_of_band) r.hop_start = t;
    if (h.entity == Entity::UE) {
      const double dt = h.work / capacity_[idx(Entity::UE)];
      ue_busy_ += dt;
      push(t + dt, Kind::HopDone, req, hop);
      return;
    }
    const std::size_t s = server_for(r, h.entity);
    collect(s, t);
    servers_[s].arrive(t, job_id(req, hop), h.work);
    reschedule(s);
  }

  // Advances server s to t and finishes every hop that completes there.
  void collect(std::size_t s, double t) {
    auto done = servers_[s].advance(std::max(t, servers_[s].now()));
    reschedule(s);
    for (const auto& c : done)
      hop_done(static_cast<std::uint32_t>(c.job >> 5), static_cast<std::uint32_t>(c.job & 31),
               c.time);
  }

  void hop_done(std::uint32_t req, std::uint32_t hop, double t) {
    auto& r = requests_[req];
    auto& smp = (*samples_)[req];
    const auto& h = proc_.hops[hop];
    --r.pending;
    if (h.out_of_band) {
      if (t > r.last_oob_end) {
        r.last_oob_end = t;
        r.last_oob_entity = h.entity;
      }
    } else {
      smp.breakdown[idx(h.entity)] += t - r.hop_start;
      // Out-of-band successors go out together with the next chain hop.
      std::uint32_t k = hop + 1;
      while (k < proc_.hops.size() && proc_.hops[k].out_of_band) dispatch(req, k++, t);
      if (k < proc_.hops.size())
        dispatch(req, k, t);
      else
        r.chain_end = t;
    }
    if (r.pending == 0 && r.chain_end >= 0.0) {
      double end = r.chain_end;
      if (r.last_oob_end > end) {
        smp.breakdown[idx(r.last_oob_entity)] += r.last_oob_end - end;
        end = r.last_oob_end;
      }
      smp.completion = end;
    }
  }

  const EventStream& stream_;
  ProcedureTemplate proc_;
  SimulationOptions options_;
  std::array<bool, 6> present_{};
  std::array<double, 6> capacity_{};
  std::array<std::int64_t, 6> instances_{};
  std::array<std::size_t, 6> base_{};
  std::vector<PsServer> servers_;
  std::vector<Entity> server_entity_;
  std::vector<std::uint32_t> version_;
  std::vector<RequestState> requests_;
  std::vector<DelaySample>* samples_ = nullptr;
  std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> heap_;
  std::uint64_t seq_ = 0;
  double ue_busy_ = 0.0;
};

}  // namespace

SimulationResult run_bearer_simulation(const EventStream& stream,
                                       const ProcedureTemplate& procedure,
                                       const EpcProfiles& profiles,
                                       const SimulationOptions& options) {
  Simulator sim(stream, procedure, profiles, options);
  return sim.run();
}

std::vector<DelaySample> single_job_mode(const EventStream& stream, const EntityProfile& mme,
                                         double K) {
  if (!(K >= 0.0)) throw ConfigError("single-job mode: K must be >= 0");
  PsServer server(mme.capacity);
  std::vector<DelaySample> out(stream.size());
  auto finish = [&](const std::vector<PsServer::Completion>& done) {
    for (const auto& c : done) {
      auto& s = out[c.job];
      s.breakdown[idx(Entity::MME)] = c.time - s.arrival;
      s.completion = c.time + K;
    }
  };
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const double t = stream[i].time;
    finish(server.advance(t));
    out[i].request_id = i;
    out[i].arrival = t;
    out[i].constant_offset = K;
    server.arrive(t, i, mme.ops_per_bearer);
  }
  finish(server.advance(std::numeric_limits<double>::max()));
  return out;
}

std::string usage_json_text(const SimulationResult& result) {
  nlohmann::ordered_json j;
  j["horizon_s"] = result.horizon;
  j["requests"] = result.samples.size();
  auto& arr = j["entities"] = nlohmann::ordered_json::array();
  for (const auto& u : result.usage) {
    arr.push_back({{"entity", std::string(entity_name(u.entity))},
                   {"instances", u.instances},
                   {"busy_time_s", u.busy_time},
                   {"work_done", u.work_done},
                   {"utilization_mean", u.utilization_mean},
                   {"utilization_max", u.utilization_max},
                   {"mean_jobs", result.horizon > 0.0 ? u.job_time_integral / result.horizon
                                                      : 0.0}});
  }
  return j.dump(2);
}

}  // namespace epcload
