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
#include <optional>
#include <vector>

namespace epcload {

struct TrafficParams;

/// Beta(3,4)-shaped Regular->Alarm transition probability for slot n of a
/// period with N = params.n_slots slots: 60 x^2 (1-x)^3 / N, x = n / N.
/// Throws DomainError unless 0 <= n <= N.
double beta_pmf(std::int64_t n, const TrafficParams& params);

/// Continuous Beta(3,4) density on [0, T], per second.
/// Throws DomainError unless 0 <= x <= T.
double beta_pdf(double x, double period_T);

/// Per-slot alarm hazard over one period, with prefix sums of
/// log(1 - h) for O(log N) first-success queries.
///
/// Slots are addressed either locally (0 <= slot < N) or "unwrapped"
/// (any u >= 0, meaning local slot u mod N in period u / N). Slots with
/// h == 1 are kept out of the prefix sums and tracked separately so a
/// certain transition never produces -inf arithmetic.
class HazardGrid {
 public:
  /// Sampled Beta(3,4) hazard on an N-slot grid (N >= 3 so no slot exceeds 1).
  static HazardGrid beta34(std::int64_t n_slots);

  /// Arbitrary hazard values; each must lie in [0, 1].
  explicit HazardGrid(std::vector<double> per_slot);

  std::int64_t size() const noexcept { return static_cast<std::int64_t>(hazard_.size()); }
  double at(std::int64_t slot) const { return hazard_[static_cast<std::size_t>(wrap(slot))]; }
  double max_value() const noexcept { return max_; }
  const std::vector<double>& values() const noexcept { return hazard_; }

  /// Sum of log(1 - h) over one full period, excluding certain slots.
  double period_log_survival() const noexcept { return prefix_.back(); }

  /// Sum of log(1 - h(u)) for unwrapped u in [0, v), excluding certain slots.
  double cumulative_log_survival(std::int64_t v) const;

  /// Sum of log(1 - h(u)) for unwrapped u in [from, to).
  double log_survival(std::int64_t from, std::int64_t to) const {
    return cumulative_log_survival(to) - cumulative_log_survival(from);
  }

  /// First unwrapped u >= from whose local slot has h == 1.
  std::optional<std::int64_t> next_certain(std::int64_t from) const;

  /// Smallest unwrapped v > from with cumulative_log_survival(v) <= threshold,
  /// i.e. the first slot u = v - 1 at which the accumulated log-survival
  /// since `from` crosses `threshold - cumulative_log_survival(from)`.
  /// Returns nullopt when the finite hazard is identically zero or the
  /// crossing is more than `max_periods` periods away.
  std::optional<std::int64_t> first_crossing(std::int64_t from, double threshold,
                                             std::int64_t max_periods) const;

  std::int64_t wrap(std::int64_t u) const noexcept {
    const auto n = size();
    const auto r = u % n;
    return r < 0 ? r + n : r;
  }

 private:
  std::vector<double> hazard_;
  std::vector<double> prefix_;  // size N + 1
  std::vector<std::int64_t> certain_;
  double max_ = 0.0;
};

}  // namespace epcload
