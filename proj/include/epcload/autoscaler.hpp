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
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "epcload/delay_model.hpp"
#include "epcload/epc_sim.hpp"
#include "epcload/traffic.hpp"

namespace epcload {

enum class ScalingScope { AllEntities, MmeOnly };

struct ScalingPolicy {
  double target_delay = 0.1;  // seconds
  double percentile = 0.99;
  std::vector<double> multipliers{1.0, 2.0, 2.5};
  ScalingScope scope = ScalingScope::AllEntities;
  /// Scale-down band as a fraction of the target; 0 disables hysteresis.
  double hysteresis = 0.1;

  /// Throws ConfigError unless multipliers ascend strictly from 1.0,
  /// 0 < percentile < 1, target > 0 and 0 <= hysteresis < 1.
  void validate() const;
  /// Profiles with capacities scaled for `multiplier` under this scope.
  EpcProfiles apply(const EpcProfiles& base, double multiplier) const;
};

struct Prediction {
  double delay = 0.0;     // seconds; +inf when overloaded
  bool feasible = false;  // not overloaded
};

/// Analytic percentile delay at `multiplier`. Overload is reported through
/// `feasible`, never thrown. When the percentile falls below the model's
/// validity threshold the prediction is K.
Prediction predict_percentile(double lambda_beta, double multiplier, const EpcProfiles& profiles,
                              const ScalingPolicy& policy);

struct ScalingDecision {
  double lambda_beta = 0.0;
  double multiplier = 1.0;
  double predicted = 0.0;       // at the chosen multiplier
  double predicted_at_1 = 0.0;  // at multiplier 1.0
  bool feasible = false;        // predicted <= target
};

/// Smallest listed multiplier whose prediction meets the target, or the
/// largest one flagged infeasible.
ScalingDecision choose_multiplier(double lambda_beta, const EpcProfiles& profiles,
                                  const ScalingPolicy& policy);

/// choose_multiplier with memory: scaling up is immediate, scaling down
/// only happens once the lower multiplier meets target * (1 - hysteresis).
class ScalingController {
 public:
  ScalingController(EpcProfiles profiles, ScalingPolicy policy);

  ScalingDecision decide(double lambda_beta);
  double current() const noexcept { return current_; }

 private:
  EpcProfiles profiles_;
  ScalingPolicy policy_;
  double current_;
};

/// One window of the rate series driving the loop.
struct WindowSpec {
  double start = 0.0;
  double length = 0.0;
  double lambda_beta = 0.0;               // measured or derived rate
  std::optional<std::int64_t> sources;    // Q when the window is given by population
};

/// Arrivals on [0, warmup + length) in window-local time.
using ArrivalGenerator =
    std::function<EventStream(const WindowSpec& window, double warmup, std::uint64_t seed)>;

/// Poisson arrivals at the window's rate.
ArrivalGenerator poisson_generator();

/// Two-state source model with `window.sources` sources split into groups
/// of `group_size` at uniform random offsets.
ArrivalGenerator traffic_generator(TrafficParams params, std::int64_t group_size);

struct LoopOptions {
  double warmup = 2.0;  // seconds simulated before each window, not measured
  std::uint64_t seed = 1;
  SimulationOptions simulation;
  std::optional<ProcedureTemplate> procedure;  // default CIoT flow when empty
  /// Forces every window to this multiplier (baseline runs).
  std::optional<double> fixed_multiplier;
};

struct LoopRecord {
  double window_start = 0.0;
  ScalingDecision decision;
  double empirical = 0.0;  // simulated percentile delay, NaN without samples
  std::size_t requests = 0;
};

/// For each window in order: decide the multiplier from the model (with
/// hysteresis), simulate the window at that multiplier and record the
/// empirical percentile of requests arriving after the warm-up. Each
/// window runs on fresh servers, so a change takes effect at the window
/// boundary. Throws ConfigError for an empty series.
std::vector<LoopRecord> run_scaling_loop(const std::vector<WindowSpec>& series,
                                         const EpcProfiles& profiles,
                                         const ScalingPolicy& policy,
                                         const ArrivalGenerator& generator,
                                         const LoopOptions& options = {});

/// `window_start_s,lambda_hat,multiplier,predicted_p,empirical_p,feasible`.
void write_decisions_csv(std::ostream& out, const std::vector<LoopRecord>& records);

}  // namespace epcload
