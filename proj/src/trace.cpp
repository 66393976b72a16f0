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

#include "epcload/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>

#include "epcload/errors.hpp"
#include "epcload/event_io.hpp"
#include "epcload/rng.hpp"

namespace epcload {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto c = line.find(',', pos);
    out.push_back(trim(line.substr(pos, c == std::string_view::npos ? c : c - pos)));
    if (c == std::string_view::npos) break;
    pos = c + 1;
  }
  return out;
}

bool parse_number(std::string_view s, double& x) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_id(std::string_view s, std::int64_t& id) {
  if (s.empty()) {
    id = -1;
    return true;
  }
  const auto r = std::from_chars(s.data(), s.data() + s.size(), id);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && id >= 0;
}

}  // namespace

ParsedTrace parse_trace(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  bool with_id = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto cols = split(t);
    if (cols[0] != "timestamp_s" || cols.size() > 2 || (cols.size() == 2 && cols[1] != "source_id"))
      throw InputError("trace: line " + std::to_string(lineno) +
                       ": expected header 'timestamp_s[,source_id]'");
    with_id = cols.size() == 2;
    header = true;
    break;
  }
  if (!header) throw InputError("trace: empty input, no header");

  ParsedTrace out;
  std::vector<Event> events;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto cols = split(t);
    Event e;
    bool ok = cols.size() == (with_id ? 2u : 1u) && parse_number(cols[0], e.time) &&
              std::isfinite(e.time) && e.time >= 0.0;
    if (ok && with_id) ok = parse_id(cols[1], e.source_id);
    if (!ok) {
      if (out.malformed++ == 0) out.first_malformed_line = lineno;
      continue;
    }
    events.push_back(e);
  }
  if (events.empty()) throw InputError("trace: no valid rows");
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.time < b.time; });
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i].time == events[i - 1].time) ++out.duplicates;
  out.stream = EventStream::from_sorted(std::move(events));
  return out;
}

ParsedTrace parse_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("trace: cannot open " + path.string());
  return parse_trace(in);
}

std::vector<TraceWindow> window_and_fit(const EventStream& stream, double window_length) {
  if (!(window_length > 0.0) || !std::isfinite(window_length))
    throw DomainError("window_and_fit: window length must be positive");
  const double origin =
      stream.empty() ? 0.0 : std::floor(stream[0].time / window_length) * window_length;
  return window_and_fit(stream, window_length, origin);
}

std::vector<TraceWindow> window_and_fit(const EventStream& stream, double window_length,
                                        double origin) {
  if (!(window_length > 0.0) || !std::isfinite(window_length))
    throw DomainError("window_and_fit: window length must be positive");
  if (!stream.empty() && stream[0].time < origin)
    throw DomainError("window_and_fit: events before the window origin");
  std::vector<TraceWindow> windows;
  if (stream.empty()) return windows;

  const double last = stream[stream.size() - 1].time;
  const auto n_windows =
      static_cast<std::size_t>(std::floor((last - origin) / window_length)) + 1;
  std::vector<std::size_t> bounds(n_windows + 1);
  const auto ev = stream.events();
  windows.resize(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) {
    windows[w].start = origin + static_cast<double>(w) * window_length;
    windows[w].end = origin + static_cast<double>(w + 1) * window_length;
    bounds[w] = static_cast<std::size_t>(
        std::lower_bound(ev.begin(), ev.end(), windows[w].start,
                         [](const Event& e, double t) { return e.time < t; }) -
        ev.begin());
  }
  bounds[n_windows] = ev.size();

  const auto count = static_cast<std::int64_t>(n_windows);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t wi = 0; wi < count; ++wi) {
    const auto w = static_cast<std::size_t>(wi);
    auto& win = windows[w];
    win.n_events = bounds[w + 1] - bounds[w];
    win.low_confidence = win.n_events < kKsMinSamples;
    if (win.n_events < 2) continue;
    std::vector<double> gaps;
    gaps.reserve(win.n_events - 1);
    for (std::size_t i = bounds[w] + 1; i < bounds[w + 1]; ++i)
      gaps.push_back(ev[i].time - ev[i - 1].time);
    const double span = ev[bounds[w + 1] - 1].time - ev[bounds[w]].time;
    if (!(span > 0.0)) continue;
    win.lambda_hat = static_cast<double>(gaps.size()) / span;
    win.has_fit = true;
    if (gaps.size() < 2) continue;
    const double rate = win.lambda_hat;
    win.ks = ks_test(gaps, [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); });
    win.has_ks = true;
  }
  return windows;
}

std::vector<RatePoint> replay_rate_series(const std::vector<TraceWindow>& windows) {
  std::vector<RatePoint> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back({w.start, w.has_fit ? w.lambda_hat : 0.0, w.has_fit});
  return out;
}

void write_windows_csv(std::ostream& out, const std::vector<TraceWindow>& windows) {
  out << "window_start_s,n_events,lambda_hat,ks_stat,ks_pass_1pct\n";
  for (const auto& w : windows) {
    out << format_double(w.start) << ',' << w.n_events << ',';
    if (w.has_fit) out << format_double(w.lambda_hat);
    out << ',';
    if (w.has_ks)
      out << format_double(w.ks.statistic) << ',' << (w.ks.pass_1pct() ? "true" : "false");
    else
      out << ',';
    out << '\n';
  }
}

DiurnalProfile DiurnalProfile::morning_ramp(double peak_rate) {
  if (!(peak_rate > 0.0)) throw ConfigError("fixture: peak rate must be positive");
  DiurnalProfile p;
  for (double f : {0.05, 0.1, 0.2, 0.35, 0.55, 0.75, 0.9, 1.0}) p.rates.push_back(f * peak_rate);
  return p;
}

EventStream diurnal_fixture(const DiurnalProfile& profile, std::uint64_t seed) {
  if (!(profile.window_length > 0.0)) throw ConfigError("fixture: window length must be positive");
  if (profile.start < 0.0) throw ConfigError("fixture: start must be >= 0");
  std::vector<Event> all;
  for (std::size_t i = 0; i < profile.rates.size(); ++i) {
    if (profile.rates[i] < 0.0) throw ConfigError("fixture: rates must be >= 0");
    if (profile.rates[i] == 0.0) continue;
    const double a = profile.start + static_cast<double>(i) * profile.window_length;
    const auto part = poisson_stream(profile.rates[i], a, a + profile.window_length,
                                     derive_seed(seed, i));
    for (const auto& e : part.events()) all.push_back({e.time, -1});
  }
  return EventStream::from_sorted(std::move(all));
}

}  // namespace epcload
