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
#include <istream>
#include <ostream>
#include <utility>
#include <vector>

#include "epcload/ks.hpp"
#include "epcload/traffic.hpp"

namespace epcload {

struct ParsedTrace {
  EventStream stream;
  std::size_t duplicates = 0;  // events sharing a timestamp with their predecessor
  std::size_t malformed = 0;   // rejected rows
  std::size_t first_malformed_line = 0;  // 1-based, 0 when none
};

/// CSV with header `timestamp_s[,source_id]`. Rows may be out of order;
/// the result is stably sorted. Negative, non-finite or unparsable rows
/// are rejected and counted. Throws InputError when nothing valid remains
/// and IoError when the file cannot be opened.
ParsedTrace parse_trace(std::istream& in);
ParsedTrace parse_trace(const std::filesystem::path& path);

struct TraceWindow {
  double start = 0.0;
  double end = 0.0;
  std::size_t n_events = 0;
  bool has_fit = false;         // at least 2 events and a positive gap sum
  double lambda_hat = 0.0;      // (n-1) / sum of gaps, per second
  bool has_ks = false;          // at least 2 gaps
  KsReport ks;                  // gaps vs Exp(lambda_hat)
  bool low_confidence = true;   // fewer than kKsMinSamples events
};

/// Splits [origin, ...) into consecutive windows of `window_length` up to
/// the last event and fits each independently. Gaps never cross window
/// boundaries. origin defaults to floor(first / window_length) *
/// window_length. Throws DomainError for window_length <= 0.
std::vector<TraceWindow> window_and_fit(const EventStream& stream, double window_length);
std::vector<TraceWindow> window_and_fit(const EventStream& stream, double window_length,
                                        double origin);

struct RatePoint {
  double window_start = 0.0;
  double lambda_hat = 0.0;
  bool has_fit = false;
};

/// (window start, lambda_hat) pairs in window order.
std::vector<RatePoint> replay_rate_series(const std::vector<TraceWindow>& windows);

/// `window_start_s,n_events,lambda_hat,ks_stat,ks_pass_1pct`; windows
/// without a fit leave the last three fields empty.
void write_windows_csv(std::ostream& out, const std::vector<TraceWindow>& windows);

/// Piecewise-constant Poisson trace: window i has rate hourly_rates[i].
struct DiurnalProfile {
  double start = 5.0 * 3600.0;  // 5 AM
  double window_length = 3600.0;
  std::vector<double> rates;    // events per second, one per window

  /// Morning ramp over 8 one-hour windows, rising to `peak_rate`.
  static DiurnalProfile morning_ramp(double peak_rate);
};

EventStream diurnal_fixture(const DiurnalProfile& profile, std::uint64_t seed);

}  // namespace epcload
