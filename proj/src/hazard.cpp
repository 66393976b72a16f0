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

#include "epcload/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epcload/errors.hpp"
#include "epcload/traffic.hpp"

namespace epcload {
namespace {

double beta34_shape(double x) { return 60.0 * x * x * std::pow(1.0 - x, 3); }

}  // namespace

double beta_pmf(std::int64_t n, const TrafficParams& params) {
  const auto slots = params.n_slots;
  if (n < 0 || n > slots) {
    std::ostringstream msg;
    msg << "beta_pmf: slot " << n << " outside [0, " << slots << "]";
    throw DomainError(msg.str());
  }
  const double inv_n = 1.0 / static_cast<double>(slots);
  return beta34_shape(static_cast<double>(n) * inv_n) * inv_n;
}

double beta_pdf(double x, double period_T) {
  if (!(period_T > 0.0)) throw DomainError("beta_pdf: period must be positive");
  if (!(x >= 0.0 && x <= period_T)) {
    std::ostringstream msg;
    msg << "beta_pdf: x=" << x << " outside [0, " << period_T << "]";
    throw DomainError(msg.str());
  }
  return beta34_shape(x / period_T) / period_T;
}

HazardGrid HazardGrid::beta34(std::int64_t n_slots) {
  if (n_slots < 3) throw ConfigError("beta hazard grid needs at least 3 slots");
  std::vector<double> h(static_cast<std::size_t>(n_slots));
  const double inv_n = 1.0 / static_cast<double>(n_slots);
  for (std::int64_t n = 0; n < n_slots; ++n) {
    h[static_cast<std::size_t>(n)] = beta34_shape(static_cast<double>(n) * inv_n) * inv_n;
  }
  return HazardGrid(std::move(h));
}

HazardGrid::HazardGrid(std::vector<double> per_slot) : hazard_(std::move(per_slot)) {
  if (hazard_.empty()) throw ConfigError("hazard grid must have at least one slot");
  prefix_.resize(hazard_.size() + 1);
  prefix_[0] = 0.0;
  for (std::size_t i = 0; i < hazard_.size(); ++i) {
    const double h = hazard_[i];
    if (!(h >= 0.0 && h <= 1.0)) {
      std::ostringstream msg;
      msg << "hazard value " << h << " at slot " << i << " outside [0, 1]";
      throw ConfigError(msg.str());
    }
    max_ = std::max(max_, h);
    if (h == 1.0) {
      certain_.push_back(static_cast<std::int64_t>(i));
      prefix_[i + 1] = prefix_[i];
    } else {
      prefix_[i + 1] = prefix_[i] + std::log1p(-h);
    }
  }
}

double HazardGrid::cumulative_log_survival(std::int64_t v) const {
  const auto n = size();
  const auto period = v / n;
  const auto r = v % n;
  return static_cast<double>(period) * prefix_.back() + prefix_[static_cast<std::size_t>(r)];
}

std::optional<std::int64_t> HazardGrid::next_certain(std::int64_t from) const {
  if (certain_.empty()) return std::nullopt;
  const auto n = size();
  const auto period = from / n;
  const auto r = from % n;
  const auto it = std::lower_bound(certain_.begin(), certain_.end(), r);
  if (it != certain_.end()) return period * n + *it;
  return (period + 1) * n + certain_.front();
}

std::optional<std::int64_t> HazardGrid::first_crossing(std::int64_t from, double threshold,
                                                       std::int64_t max_periods) const {
  const auto n = size();
  const double per_period = prefix_.back();
  const auto last = prefix_.begin() + n;  // local slots 0..N-1

  auto search = [&](std::int64_t period, std::int64_t r0) -> std::optional<std::int64_t> {
    const double local = threshold - static_cast<double>(period) * per_period;
    const auto it = std::partition_point(prefix_.begin() + r0, last,
                                         [local](double x) { return x > local; });
    if (it == last) return std::nullopt;
    return period * n + static_cast<std::int64_t>(it - prefix_.begin());
  };

  const auto start = from + 1;
  const auto first_period = start / n;
  if (auto v = search(first_period, start % n)) return v;
  if (per_period == 0.0) return std::nullopt;

  // Lowest value reachable inside period j is j * per_period + prefix[N-1].
  const double needed = (threshold - prefix_[static_cast<std::size_t>(n - 1)]) / per_period;
  if (needed - static_cast<double>(first_period) > static_cast<double>(max_periods) + 2.0) {
    return std::nullopt;
  }
  auto period = std::max(first_period + 1, static_cast<std::int64_t>(std::ceil(needed)) - 1);
  for (; period <= first_period + max_periods + 1; ++period) {
    if (auto v = search(period, 0)) return v;
  }
  return std::nullopt;
}

}  // namespace epcload
