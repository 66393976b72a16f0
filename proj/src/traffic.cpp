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

#include "epcload/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "epcload/errors.hpp"

namespace epcload {
namespace {

constexpr std::int64_t kMaxAlarmWaitPeriods = 1000;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

EventStream merge_sources(std::vector<std::vector<Event>>& per_source) {
  std::size_t total = 0;
  for (const auto& v : per_source) total += v.size();
  std::vector<Event> all;
  all.reserve(total);
  for (auto& v : per_source) {
    all.insert(all.end(), v.begin(), v.end());
    std::vector<Event>().swap(v);
  }
  return EventStream(std::move(all));
}

void check_grid(const TrafficParams& params, const HazardGrid& grid, double horizon) {
  params.validate();
  if (grid.size() != params.n_slots) {
    throw ConfigError("hazard grid size does not match traffic.n_slots");
  }
  if (!(horizon >= params.period_T)) {
    std::ostringstream msg;
    msg << "horizon " << horizon << " s is shorter than the period T=" << params.period_T << " s";
    throw ConfigError(msg.str());
  }
}

}  // namespace

TrafficParams TrafficParams::make(double period_T, double slot_delta, double alarm_rate_lambda_A,
                                  double regular_rate_epsilon, double tx_probability) {
  require(period_T > 0.0, "traffic.period_T_s must be > 0");
  require(slot_delta > 0.0, "traffic.slot_delta_s must be > 0");
  TrafficParams p;
  p.period_T = period_T;
  p.slot_delta = slot_delta;
  p.n_slots = std::llround(period_T / slot_delta);
  p.alarm_rate_lambda_A = alarm_rate_lambda_A;
  p.regular_rate_epsilon = regular_rate_epsilon;
  p.tx_probability =
      tx_probability > 0.0 ? tx_probability : -std::expm1(-alarm_rate_lambda_A);
  p.validate();
  return p;
}

void TrafficParams::validate() const {
  require(period_T > 0.0, "traffic.period_T_s must be > 0");
  require(slot_delta > 0.0, "traffic.slot_delta_s must be > 0");
  const double ratio = period_T / slot_delta;
  require(std::abs(ratio - static_cast<double>(n_slots)) <= 1e-6 * std::max(1.0, ratio),
          "traffic.period_T_s must be an integer multiple of traffic.slot_delta_s");
  require(n_slots >= 100, "traffic: period must contain at least 100 slots");
  require(alarm_rate_lambda_A > 0.0, "traffic.alarm_rate_lambda_A must be > 0");
  require(regular_rate_epsilon >= 0.0, "traffic.regular_rate_epsilon must be >= 0");
  require(tx_probability > 0.0 && tx_probability <= 1.0,
          "traffic.tx_probability must lie in (0, 1]");
}

std::int64_t SourcePopulation::offset_slots(std::int64_t group, const TrafficParams& params) const {
  const double w = offsets.at(static_cast<std::size_t>(group));
  const auto n = params.n_slots;
  auto s = std::llround(w / params.period_T * static_cast<double>(n)) % n;
  return s < 0 ? s + n : s;
}

SourcePopulation SourcePopulation::uniform(std::int64_t n_groups, std::int64_t group_size,
                                           double period_T, std::uint64_t seed) {
  require(n_groups >= 1, "population.n_groups must be >= 1");
  require(group_size >= 1, "population.group_size must be >= 1");
  Rng rng(derive_seed(seed, 0x0ff5e7ULL));
  SourcePopulation pop;
  pop.group_size = group_size;
  pop.offsets.resize(static_cast<std::size_t>(n_groups));
  for (auto& w : pop.offsets) {
    w = std::min(uniform_open(rng) * period_T, std::nextafter(period_T, 0.0));
  }
  return pop;
}

SourcePopulation SourcePopulation::fixed(std::vector<double> offsets, std::int64_t group_size,
                                         double period_T) {
  SourcePopulation pop;
  pop.group_size = group_size;
  pop.offsets = std::move(offsets);
  pop.validate(period_T);
  return pop;
}

void SourcePopulation::validate(double period_T) const {
  require(group_size >= 1, "population.group_size must be >= 1");
  require(!offsets.empty(), "population needs at least one group");
  for (double w : offsets) {
    require(w >= 0.0 && w < period_T, "population offsets must lie in [0, T)");
  }
}

EventStream::EventStream(std::vector<Event> events) : events_(std::move(events)) {
  for (const auto& e : events_) {
    if (!std::isfinite(e.time)) throw DomainError("event timestamps must be finite");
  }
  std::stable_sort(events_.begin(), events_.end(),
                   [](const Event& a, const Event& b) { return a.time < b.time; });
}

EventStream EventStream::from_sorted(std::vector<Event> events) {
  const bool sorted = std::is_sorted(events.begin(), events.end(),
                                     [](const Event& a, const Event& b) { return a.time < b.time; });
  if (!sorted) throw DomainError("event stream is not sorted by time");
  EventStream s;
  s.events_ = std::move(events);
  return s;
}

EventStream EventStream::from_times(std::span<const double> times) {
  std::vector<Event> ev;
  ev.reserve(times.size());
  for (double t : times) ev.push_back({t, -1});
  return EventStream(std::move(ev));
}

std::vector<double> EventStream::times() const {
  std::vector<double> t;
  t.reserve(events_.size());
  for (const auto& e : events_) t.push_back(e.time);
  return t;
}

std::vector<double> EventStream::gaps() const {
  std::vector<double> g;
  if (events_.size() < 2) return g;
  g.reserve(events_.size() - 1);
  for (std::size_t i = 1; i < events_.size(); ++i) g.push_back(events_[i].time - events_[i - 1].time);
  return g;
}

EventStream EventStream::slice(double start, double end) const {
  auto lo = std::lower_bound(events_.begin(), events_.end(), start,
                             [](const Event& e, double t) { return e.time < t; });
  auto hi = std::lower_bound(lo, events_.end(), end,
                             [](const Event& e, double t) { return e.time < t; });
  EventStream s;
  s.events_.assign(lo, hi);
  return s;
}

std::int64_t sample_next_alarm(std::int64_t current_slot, std::int64_t offset_slots,
                               const HazardGrid& grid, Rng& rng) {
  const std::int64_t start = current_slot + offset_slots + 1;  // unwrapped local slot
  const double e = -std::log(uniform_open(rng));
  const double threshold = grid.cumulative_log_survival(start) - e;

  std::optional<std::int64_t> hit;
  if (auto v = grid.first_crossing(start, threshold, kMaxAlarmWaitPeriods)) hit = *v - 1;
  if (auto c = grid.next_certain(start)) hit = hit ? std::min(*hit, *c) : *c;
  if (!hit || *hit - start > kMaxAlarmWaitPeriods * grid.size()) {
    throw NumericalError("no Regular->Alarm transition within 1000 periods: degenerate hazard grid");
  }
  return current_slot + 1 + (*hit - start);
}

std::vector<Event> generate_source(std::int64_t source_id, std::int64_t offset_slots,
                                   const TrafficParams& params, const HazardGrid& grid,
                                   double horizon, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Event> out;
  std::int64_t slot = -1;
  for (;;) {
    const auto alarm = sample_next_alarm(slot, offset_slots, grid, rng);
    const double t = static_cast<double>(alarm) * params.slot_delta;
    if (t >= horizon) break;
    const double u = uniform_open(rng);
    if (u < params.tx_probability) out.push_back({t, source_id});
    slot = alarm + 1;  // Alarm lasts one slot; the next slot is Regular
  }
  if (params.regular_rate_epsilon > 0.0) {
    Rng keepalive(splitmix64(seed ^ 0x5eed5eedULL));
    const auto alarms = out.size();
    for (double t = exponential(keepalive, params.regular_rate_epsilon); t < horizon;
         t += exponential(keepalive, params.regular_rate_epsilon)) {
      out.push_back({t, source_id});
    }
    std::inplace_merge(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(alarms), out.end(),
                       [](const Event& a, const Event& b) { return a.time < b.time; });
  }
  return out;
}

EventStream generate_requests(const SourcePopulation& population, const TrafficParams& params,
                              double horizon, std::uint64_t seed) {
  const auto grid = HazardGrid::beta34(params.n_slots);
  return generate_requests(population, params, grid, horizon, seed);
}

EventStream generate_requests(const SourcePopulation& population, const TrafficParams& params,
                              const HazardGrid& grid, double horizon, std::uint64_t seed) {
  check_grid(params, grid, horizon);
  population.validate(params.period_T);
  const auto q = population.total_sources();
  std::vector<std::vector<Event>> per_source(static_cast<std::size_t>(q));
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t s = 0; s < q; ++s) {
    try {
      const auto off = population.offset_slots(population.group_of(s), params);
      per_source[static_cast<std::size_t>(s)] =
          generate_source(s, off, params, grid, horizon, derive_seed(seed, static_cast<std::uint64_t>(s)));
    } catch (...) {
#pragma omp critical(epcload_generate_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return merge_sources(per_source);
}

namespace reference {

EventStream generate_requests(const SourcePopulation& population, const TrafficParams& params,
                              const HazardGrid& grid, double horizon, std::uint64_t seed) {
  check_grid(params, grid, horizon);
  population.validate(params.period_T);
  const auto q = population.total_sources();
  std::vector<std::vector<Event>> per_source(static_cast<std::size_t>(q));
  for (std::int64_t s = 0; s < q; ++s) {
    const auto off = population.offset_slots(population.group_of(s), params);
    per_source[static_cast<std::size_t>(s)] =
        generate_source(s, off, params, grid, horizon, derive_seed(seed, static_cast<std::uint64_t>(s)));
  }
  return merge_sources(per_source);
}

}  // namespace reference

EventStream poisson_stream(double rate, double start, double end, std::uint64_t seed) {
  if (!(rate > 0.0)) throw DomainError("poisson_stream: rate must be positive");
  Rng rng(seed);
  std::vector<Event> ev;
  ev.reserve(static_cast<std::size_t>(std::max(0.0, (end - start) * rate * 1.1)) + 16);
  std::int64_t id = 0;
  for (double t = start + exponential(rng, rate); t < end; t += exponential(rng, rate)) {
    ev.push_back({t, id++});
  }
  return EventStream::from_sorted(std::move(ev));
}

}  // namespace epcload
