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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "epcload/arrival.hpp"
#include "epcload/config.hpp"
#include "epcload/epc_sim.hpp"
#include "epcload/errors.hpp"
#include "epcload/ps_server.hpp"
#include "epcload/stats.hpp"
#include "epcload/traffic.hpp"
#include "../support/oracles.hpp"

using namespace epcload;

namespace {

std::vector<PsServer::Completion> drain(PsServer& s) {
  return s.advance(std::numeric_limits<double>::max());
}

EventStream default_stream(std::int64_t q, double horizon, std::uint64_t seed) {
  const auto p = TrafficParams::make(10.0, 1e-5);
  const auto pop = SourcePopulation::uniform(q / 50, 50, 10.0, seed);
  return generate_requests(pop, p, horizon, seed + 1);
}

}  // namespace

TEST_CASE("PS server hand-computed schedules") {
  const double w = 3.0, C = 2.0;
  {
    PsServer s(C);
    s.arrive(0.0, 1, w);
    const auto d = drain(s);
    REQUIRE(d.size() == 1);
    CHECK(d[0].time == doctest::Approx(w / C));
  }
  {
    PsServer s(C);
    s.arrive(0.0, 1, w);
    s.arrive(0.0, 2, w);
    const auto d = drain(s);
    REQUIRE(d.size() == 2);
    CHECK(d[0].time == doctest::Approx(2 * w / C));
    CHECK(d[1].time == doctest::Approx(2 * w / C));
  }
  {
    PsServer s(C);
    s.arrive(0.0, 1, w);
    s.arrive(0.0, 2, 2 * w);
    const auto d = drain(s);
    REQUIRE(d.size() == 2);
    CHECK(d[0].job == 1);
    CHECK(d[0].time == doctest::Approx(2 * w / C));
    // The second job is alone for its last w of work.
    CHECK(d[1].time == doctest::Approx(3 * w / C));
    const auto ref = oracle::ps_schedule({0.0, 0.0}, {w, 2 * w}, C);
    CHECK(d[1].time == doctest::Approx(ref[1]));
  }
}

TEST_CASE("PS server preconditions") {
  CHECK_THROWS_AS(PsServer(0.0), DomainError);
  PsServer s(1.0);
  s.arrive(1.0, 1, 1.0);
  CHECK_THROWS_AS(s.arrive(0.5, 2, 1.0), DomainError);
  CHECK_THROWS_AS(s.arrive(3.0, 2, 1.0), DomainError);  // completion at 2.0 not collected
  CHECK_THROWS_AS(s.arrive(1.5, 2, 0.0), DomainError);
  CHECK_THROWS_AS(s.advance(0.5), DomainError);
  CHECK(s.next_completion() == doctest::Approx(2.0));
}

TEST_CASE("PS server agrees with residual-work bookkeeping") {
  std::mt19937_64 rng(7);
  std::exponential_distribution<double> gap(1.0);
  std::uniform_real_distribution<double> work(0.1, 2.0);
  std::vector<double> arr, wk;
  double t = 0.0;
  for (int i = 0; i < 400; ++i) {
    t += gap(rng);
    arr.push_back(t);
    wk.push_back(work(rng));
  }
  const auto expected = oracle::ps_schedule(arr, wk, 1.25);
  PsServer s(1.25);
  std::vector<double> got(arr.size(), -1.0);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    for (const auto& c : s.advance(arr[i])) got[c.job] = c.time;
    s.arrive(arr[i], i, wk[i]);
  }
  for (const auto& c : drain(s)) got[c.job] = c.time;
  for (std::size_t i = 0; i < arr.size(); ++i) CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-9));

  // Work conservation.
  double total = 0.0;
  for (double x : wk) total += x;
  CHECK(s.work_done() == doctest::Approx(total).epsilon(1e-9));
  CHECK(s.work_done() == doctest::Approx(1.25 * s.busy_time()).epsilon(1e-9));
  CHECK(s.completed() == arr.size());
}

TEST_CASE("PS fairness: co-resident jobs accrue identical service") {
  // Two jobs with equal work arriving together leave together no matter
  // what else passes through.
  PsServer s(1.0);
  s.arrive(0.0, 1, 5.0);
  s.arrive(0.0, 2, 5.0);
  std::vector<PsServer::Completion> all;
  for (int i = 0; i < 5; ++i) {
    const double at = 0.5 + i;
    for (const auto& c : s.advance(at)) all.push_back(c);
    s.arrive(at, 10 + i, 0.3);
  }
  for (const auto& c : drain(s)) all.push_back(c);
  double t1 = -1, t2 = -2;
  for (const auto& c : all) {
    if (c.job == 1) t1 = c.time;
    if (c.job == 2) t2 = c.time;
  }
  CHECK(t1 == t2);
}

TEST_CASE("default CIoT template") {
  const auto prof = default_profiles();
  const auto t = ProcedureTemplate::ciot_default(prof);
  CHECK(t.hops.size() == 19);
  int oob = 0;
  for (const auto& h : t.hops) oob += h.out_of_band;
  CHECK(oob == 1);
  CHECK(t.hops.back().out_of_band);
  for (Entity e : kAllEntities) CHECK(t.total_work(e) == doctest::Approx(prof.at(e).ops_per_bearer));
  ProcedureTemplate empty;
  CHECK_THROWS_AS(empty.validate(prof), ConfigError);
  CHECK_THROWS_AS(ProcedureTemplate::from_specs({}, prof), ConfigError);
  auto off = prof;
  off.set({Entity::MME, 9.0, 1e4, 4});
  CHECK_THROWS_AS(ProcedureTemplate::ciot_default(off), ConfigError);
  auto bad = t;
  bad.hops[2].work *= 2;
  CHECK_THROWS_AS(bad.validate(prof), ConfigError);
}

TEST_CASE("weighted hops keep the per-entity totals") {
  const auto prof = default_profiles();
  std::vector<HopSpec> specs = ciot_hop_specs();
  for (auto& s : specs)
    if (s.entity == Entity::MME && s.tag == "data_forwarding") s.weight = 4.0;
  const auto t = ProcedureTemplate::from_specs(specs, prof);
  CHECK(t.total_work(Entity::MME) == doctest::Approx(9.0));
  const auto it = std::find_if(t.hops.begin(), t.hops.end(),
                               [](const MessageHop& h) { return h.tag == "data_forwarding"; });
  CHECK(it->work == doctest::Approx(9.0 * 4 / 12));
}

TEST_CASE("single request in an idle system takes D + K") {
  const auto prof = default_profiles();
  const double t0[] = {1.5};
  const auto r = run_bearer_simulation(EventStream::from_times(t0),
                                       ProcedureTemplate::ciot_default(prof), prof);
  REQUIRE(r.samples.size() == 1);
  const auto& s = r.samples[0];
  const double expect = prof.at(Entity::MME).service_time() + constant_delay_K(prof);
  CHECK(s.delay() == doctest::Approx(expect).epsilon(1e-12));
  double sum = 0.0;
  for (double b : s.breakdown) sum += b;
  CHECK(sum + s.transit + s.constant_offset == doctest::Approx(s.delay()).epsilon(1e-12));
  for (Entity e : kAllEntities)
    CHECK(s.breakdown[static_cast<int>(e)] == doctest::Approx(prof.at(e).service_time()));
}

TEST_CASE("out-of-band hop runs beside the chain") {
  // A -> B(out of band, long) -> C: B starts with C when A completes.
  EpcProfiles prof;
  prof.set({Entity::MME, 2.0, 1.0, 2});
  prof.set({Entity::UE, 5.0, 1.0, 1});
  std::vector<HopSpec> specs{{Entity::MME, "a"}, {Entity::UE, "b", 1.0, true}, {Entity::MME, "c"}};
  const auto t = ProcedureTemplate::from_specs(specs, prof);
  const double t0[] = {0.0};
  const auto r = run_bearer_simulation(EventStream::from_times(t0), t, prof);
  const auto& s = r.samples[0];
  CHECK(s.completion == doctest::Approx(1.0 + 5.0));
  CHECK(s.breakdown[static_cast<int>(Entity::MME)] == doctest::Approx(2.0));
  CHECK(s.breakdown[static_cast<int>(Entity::UE)] == doctest::Approx(4.0));

  // Short out-of-band hop: the chain sets the completion.
  prof.set({Entity::UE, 0.5, 1.0, 1});
  const auto r2 = run_bearer_simulation(EventStream::from_times(t0),
                                        ProcedureTemplate::from_specs(specs, prof), prof);
  CHECK(r2.samples[0].completion == doctest::Approx(2.0));
}

TEST_CASE("link latency and crypto work") {
  const auto prof = default_profiles();
  const double t0[] = {0.0};
  const auto tpl = ProcedureTemplate::ciot_default(prof);
  SimulationOptions o;
  o.link_latency = 1e-3;
  const auto r = run_bearer_simulation(EventStream::from_times(t0), tpl, prof, o);
  const double base = prof.at(Entity::MME).service_time() + constant_delay_K(prof);
  CHECK(r.samples[0].delay() == doctest::Approx(base + 19e-3).epsilon(1e-12));
  CHECK(r.samples[0].transit == doctest::Approx(18e-3));

  SimulationOptions c;
  c.mme_crypto_work = 0.5;
  const auto r2 = run_bearer_simulation(EventStream::from_times(t0), tpl, prof, c);
  CHECK(r2.samples[0].delay() == doctest::Approx(base + 0.5 / 1e4).epsilon(1e-12));
  CHECK_THROWS_AS(run_bearer_simulation(EventStream::from_times(t0), tpl, prof,
                                        SimulationOptions{{}, 0.0, -1.0, 0.0}),
                  ConfigError);
}

TEST_CASE("bearer simulation invariants at Q = 10000") {
  const auto prof = default_profiles();
  const auto tpl = ProcedureTemplate::ciot_default(prof);
  const auto stream = default_stream(10000, 30.0, 3);
  const auto a = run_bearer_simulation(stream, tpl, prof);
  const auto b = run_bearer_simulation(stream, tpl, prof);
  REQUIRE(a.samples.size() == stream.size());
  bool same = true;
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    same = same && a.samples[i].completion == b.samples[i].completion &&
           a.samples[i].breakdown == b.samples[i].breakdown;
  CHECK(same);

  const double floor = prof.at(Entity::MME).service_time() + constant_delay_K(prof);
  bool sums = true, causal = true;
  for (const auto& s : a.samples) {
    double sum = s.transit + s.constant_offset;
    for (double x : s.breakdown) sum += x;
    sums = sums && std::abs(sum - s.delay()) <= 1e-9 * std::max(1.0, s.completion);
    causal = causal && s.delay() >= floor * (1 - 1e-9);
  }
  CHECK(sums);
  CHECK(causal);

  // Work conservation per entity and Little's law at the MME.
  for (const auto& u : a.usage) {
    if (u.entity == Entity::UE) continue;
    CHECK(u.work_done == doctest::Approx(prof.at(u.entity).capacity * u.busy_time).epsilon(1e-9));
    CHECK(u.work_done == doctest::Approx(tpl.total_work(u.entity) * static_cast<double>(stream.size())).epsilon(1e-9));
  }
  const auto* mme = a.usage_of(Entity::MME);
  REQUIRE(mme != nullptr);
  double mme_time = 0.0;
  for (const auto& s : a.samples) mme_time += s.breakdown[static_cast<int>(Entity::MME)];
  CHECK(mme->job_time_integral / a.horizon ==
        doctest::Approx(static_cast<double>(stream.size()) / a.horizon * mme_time / static_cast<double>(stream.size())).epsilon(0.02));
  CHECK(mme->utilization_mean == doctest::Approx(lambda_beta(10000, 10.0) * 0.0009).epsilon(0.03));
}

TEST_CASE("MME-only template is an M/D/1-PS queue") {
  const auto mme = default_profiles().at(Entity::MME);
  EpcProfiles prof;
  prof.set(mme);
  const double D = mme.service_time();
  const double lb = 0.5 / D;
  const auto arrivals = poisson_stream(lb, 0.0, 1e6 / lb, 5);
  const auto r = run_bearer_simulation(arrivals, ProcedureTemplate::single_job(mme), prof);
  CHECK(mean(r.delays()) == doctest::Approx(oracle::mg1ps_mean_sojourn(D, 0.5)).epsilon(0.02));

  // single_job_mode is the same queue plus K.
  const auto sj = single_job_mode(arrivals, mme, 0.004);
  REQUIRE(sj.size() == r.samples.size());
  bool match = true;
  for (std::size_t i = 0; i < sj.size(); i += 997)
    match = match && std::abs(sj[i].delay() - 0.004 - r.samples[i].delay()) <= 1e-12;
  CHECK(match);
}

TEST_CASE("single-job mode at vanishing load") {
  const auto mme = default_profiles().at(Entity::MME);
  const auto arrivals = poisson_stream(0.01, 0.0, 10000.0, 2);
  for (const auto& s : single_job_mode(arrivals, mme, 0.0055))
    CHECK(std::abs(s.delay() - (mme.service_time() + 0.0055)) <= 1e-9);
}

TEST_CASE("eNB and S-GW fan-out barely moves the delay percentile") {
  const auto prof = default_profiles();
  const auto tpl = ProcedureTemplate::ciot_default(prof);
  const auto stream = default_stream(15000, 30.0, 9);
  SimulationOptions a, b;
  a.topology = {50, 10};
  b.topology = {200, 2};
  const auto ra = run_bearer_simulation(stream, tpl, prof, a);
  const auto rb = run_bearer_simulation(stream, tpl, prof, b);
  CHECK(ra.usage_of(Entity::eNB)->instances == 300);
  CHECK(rb.usage_of(Entity::eNB)->instances == 75);
  CHECK(ra.usage_of(Entity::SGW)->instances == 30);
  CHECK(rb.usage_of(Entity::SGW)->instances == 38);
  const double pa = quantile(ra.delays(), 0.99), pb = quantile(rb.delays(), 0.99);
  CHECK(std::abs(pa - pb) / pa < 0.02);
}

TEST_CASE("usage report") {
  const auto prof = default_profiles();
  const auto stream = default_stream(1000, 10.0, 1);
  const auto r = run_bearer_simulation(stream, ProcedureTemplate::ciot_default(prof), prof);
  const auto j = usage_json_text(r);
  CHECK(j.find("\"MME\"") != std::string::npos);
  CHECK(j.find("utilization_mean") != std::string::npos);
}
