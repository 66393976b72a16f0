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
#include <limits>
#include <queue>
#include <vector>

namespace epcload {

/// Egalitarian processor-sharing server with deterministic work per job.
///
/// Tracks the attained service per job ("virtual time") V; with k jobs
/// present V grows at capacity / k. A job that arrives when V = v0 with
/// work w leaves when V reaches v0 + w, so completions happen in order of
/// finish tags and the evolution is exact between events.
class PsServer {
 public:
  using JobId = std::uint64_t;

  struct Completion {
    JobId job = 0;
    double time = 0.0;
  };

  explicit PsServer(double capacity);

  double capacity() const noexcept { return capacity_; }
  double now() const noexcept { return clock_; }
  std::size_t active() const noexcept { return jobs_.size(); }
  bool idle() const noexcept { return jobs_.empty(); }

  /// Adds a job at time `at` (>= now()); completions before `at` must have
  /// been collected with advance() first.
  void arrive(double at, JobId job, double work);

  /// Time of the next completion, +inf when idle.
  double next_completion() const noexcept;

  /// Runs the server to `until` (>= now()) and returns every job that
  /// completes at or before it, in completion order.
  std::vector<Completion> advance(double until);

  /// Total time with at least one job present.
  double busy_time() const noexcept { return busy_; }
  /// Total work served (completed plus partial).
  double work_done() const noexcept { return work_done_; }
  /// Integral of the number of jobs present over time.
  double job_time_integral() const noexcept { return job_area_; }
  std::uint64_t completed() const noexcept { return completed_; }

 private:
  struct Tagged {
    double finish;  // virtual finish tag
    std::uint64_t seq;
    JobId job;
    bool operator>(const Tagged& o) const noexcept {
      return finish != o.finish ? finish > o.finish : seq > o.seq;
    }
  };

  void run_to(double t);

  double capacity_;
  double clock_ = 0.0;
  double virtual_ = 0.0;
  double busy_ = 0.0;
  double work_done_ = 0.0;
  double job_area_ = 0.0;
  std::uint64_t seq_ = 0;
  std::uint64_t completed_ = 0;
  std::priority_queue<Tagged, std::vector<Tagged>, std::greater<>> jobs_;
};

}  // namespace epcload
