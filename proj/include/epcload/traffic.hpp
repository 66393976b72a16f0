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
#include <span>
#include <vector>

#include "epcload/hazard.hpp"
#include "epcload/rng.hpp"

namespace epcload {

/// Slot grid and per-source rates of the two-state (Regular/Alarm) source.
struct TrafficParams {
  double period_T = 10.0;         // seconds
  double slot_delta = 1e-5;       // seconds
  std::int64_t n_slots = 1000000; // round(T / delta)
  double alarm_rate_lambda_A = 1.0;   // packets per slot while in Alarm
  double regular_rate_epsilon = 0.0;  // packets per second while in Regular
  double tx_probability = 0.0;        // P(>= 1 packet per Alarm visit)

  /// Validated construction. `tx_probability` <= 0 means "derive from
  /// lambda_A", i.e. 1 - exp(-lambda_A). Throws ConfigError.
  static TrafficParams make(double period_T, double slot_delta,
                            double alarm_rate_lambda_A = 1.0,
                            double regular_rate_epsilon = 0.0,
                            double tx_probability = 0.0);

  /// Re-checks every invariant; throws ConfigError.
  void validate() const;
};

/// Groups of sources; all members of a group share one period offset.
struct SourcePopulation {
  std::int64_t group_size = 1;
  std::vector<double> offsets;  // seconds in [0, T), one per group

  std::int64_t n_groups() const noexcept { return static_cast<std::int64_t>(offsets.size()); }
  std::int64_t total_sources() const noexcept { return group_size * n_groups(); }
  std::int64_t group_of(std::int64_t source_id) const noexcept { return source_id / group_size; }

  /// Offset of group g rounded to the slot grid, in [0, N).
  std::int64_t offset_slots(std::int64_t group, const TrafficParams& params) const;

  /// i.i.d. Uniform[0, T) offsets drawn from `seed`.
  static SourcePopulation uniform(std::int64_t n_groups, std::int64_t group_size,
                                  double period_T, std::uint64_t seed);

  /// Fixed offsets (seconds); each must lie in [0, T).
  static SourcePopulation fixed(std::vector<double> offsets, std::int64_t group_size,
                                double period_T);

  void validate(double period_T) const;
};

enum class SourceMode { Regular, Alarm };

struct SourceState {
  SourceMode mode = SourceMode::Regular;
  std::int64_t group_id = 0;
};

struct Event {
  double time = 0.0;              // seconds
  std::int64_t source_id = -1;    // -1 when unknown

  friend bool operator==(const Event&, const Event&) = default;
};

/// Time-ordered bearer-request arrivals.
class EventStream {
 public:
  EventStream() = default;
  /// Sorts by (time, source_id); times must be finite.
  explicit EventStream(std::vector<Event> events);
  /// Takes already-sorted events; throws DomainError if they are not.
  static EventStream from_sorted(std::vector<Event> events);
  static EventStream from_times(std::span<const double> times);

  std::span<const Event> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  const Event& operator[](std::size_t i) const { return events_[i]; }

  std::vector<double> times() const;
  /// Consecutive differences t[i+1] - t[i].
  std::vector<double> gaps() const;
  /// Events with start <= t < end, still sorted.
  EventStream slice(double start, double end) const;

  friend bool operator==(const EventStream&, const EventStream&) = default;

 private:
  std::vector<Event> events_;
};

/// First slot m > current_slot (global slot index, may be -1 before the
/// first period) at which a source in Regular moves to Alarm. The source's
/// local slot of global slot g is (g + offset_slots) mod N.
///
/// Draws one Exp(1) variate and inverts the cumulative log-survival by
/// binary search. Throws NumericalError when no transition happens within
/// 1000 periods (degenerate hazard grid).
std::int64_t sample_next_alarm(std::int64_t current_slot, std::int64_t offset_slots,
                               const HazardGrid& grid, Rng& rng);

/// One source's request times over [0, horizon): alternates Regular/Alarm,
/// emitting a request on each Alarm visit with probability tx_probability,
/// plus an independent Poisson(epsilon) stream when epsilon > 0.
std::vector<Event> generate_source(std::int64_t source_id, std::int64_t offset_slots,
                                   const TrafficParams& params, const HazardGrid& grid,
                                   double horizon, std::uint64_t seed);

/// Merged request stream of the whole population over [0, horizon).
/// Each source draws from its own substream derive_seed(seed, source_id),
/// so the result does not depend on the thread count. OpenMP-parallel over
/// sources. Throws ConfigError if horizon < T.
EventStream generate_requests(const SourcePopulation& population, const TrafficParams& params,
                              double horizon, std::uint64_t seed);

/// Overload reusing a prebuilt hazard grid (must match params.n_slots).
EventStream generate_requests(const SourcePopulation& population, const TrafficParams& params,
                              const HazardGrid& grid, double horizon, std::uint64_t seed);

namespace reference {
/// Single-threaded generate_requests; kept to check the parallel kernel.
EventStream generate_requests(const SourcePopulation& population, const TrafficParams& params,
                              const HazardGrid& grid, double horizon, std::uint64_t seed);
}  // namespace reference

/// Homogeneous Poisson arrivals at `rate` over [start, end).
EventStream poisson_stream(double rate, double start, double end, std::uint64_t seed);

}  // namespace epcload
