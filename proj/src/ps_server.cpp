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

#include "epcload/ps_server.hpp"

#include <sstream>

#include "epcload/errors.hpp"

namespace epcload {

PsServer::PsServer(double capacity) : capacity_(capacity) {
  if (!(capacity > 0.0)) throw DomainError("PsServer: capacity must be positive");
}

void PsServer::run_to(double t) {
  const double dt = t - clock_;
  if (dt > 0.0 && !jobs_.empty()) {
    const auto k = static_cast<double>(jobs_.size());
    virtual_ += dt * capacity_ / k;
    busy_ += dt;
    work_done_ += dt * capacity_;
    job_area_ += dt * k;
  }
  clock_ = t;
}

void PsServer::arrive(double at, JobId job, double work) {
  if (!(work > 0.0)) throw DomainError("PsServer: job work must be positive");
  if (at < clock_) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "PsServer: arrival at " << at << " before server time " << clock_;
    throw DomainError(msg.str());
  }
  if (next_completion() < at) throw DomainError("PsServer: completions pending before arrival");
  run_to(at);
  if (jobs_.empty()) virtual_ = 0.0;  // keep tags small
  jobs_.push({virtual_ + work, seq_++, job});
}

double PsServer::next_completion() const noexcept {
  if (jobs_.empty()) return std::numeric_limits<double>::infinity();
  const auto k = static_cast<double>(jobs_.size());
  const double remaining = jobs_.top().finish - virtual_;
  return clock_ + (remaining > 0.0 ? remaining : 0.0) * k / capacity_;
}

std::vector<PsServer::Completion> PsServer::advance(double until) {
  if (until < clock_) throw DomainError("PsServer: cannot advance backwards");
  std::vector<Completion> done;
  while (!jobs_.empty()) {
    const double t = next_completion();
    if (t > until) break;
    const Tagged top = jobs_.top();
    const auto k = static_cast<double>(jobs_.size());
    const double dt = t - clock_;
    if (dt > 0.0) {
      busy_ += dt;
      job_area_ += dt * k;
    }
    // Exact virtual-time jump avoids accumulating dt * C / k rounding.
    work_done_ += (top.finish - virtual_) * k;
    virtual_ = top.finish;
    clock_ = t;
    jobs_.pop();
    ++completed_;
    done.push_back({top.job, t});
  }
  run_to(until);
  return done;
}

}  // namespace epcload
