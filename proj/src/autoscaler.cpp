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

#include "epcload/autoscaler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "epcload/arrival.hpp"
#include "epcload/errors.hpp"
#include "epcload/event_io.hpp"
#include "epcload/stats.hpp"

namespace epcload {

void ScalingPolicy::validate() const {
  if (!(target_delay > 0.0)) throw ConfigError("policy.target_delay_s: must be positive");
  if (!(percentile > 0.0 && percentile < 1.0))
    throw ConfigError("policy.percentile: must lie in (0, 1)");
  if (multipliers.empty() || multipliers.front() != 1.0)
    throw ConfigError("policy.multipliers: must start at 1.0");
  for (std::size_t i = 1; i < multipliers.size(); ++i)
    if (!(multipliers[i] > multipliers[i - 1]))
      throw ConfigError("policy.multipliers: must be strictly ascending");
  if (!(hysteresis >= 0.0 && hysteresis < 1.0))
    throw ConfigError("policy.hysteresis: must lie in [0, 1)");
}

EpcProfiles ScalingPolicy::apply(const EpcProfiles& base, double multiplier) const {
  if (scope == ScalingScope::MmeOnly) {
    const Entity mme[] = {Entity::MME};
    return base.scaled(multiplier, mme);
  }
  return base.scaled(multiplier);
}

Prediction predict_percentile(double lambda_beta, double multiplier, const EpcProfiles& profiles,
                              const ScalingPolicy& policy) {
  if (!(multiplier > 0.0)) throw DomainError("predict_percentile: multiplier must be positive");
  const auto scaled = policy.apply(profiles, multiplier);
  const auto& mme = scaled.at(Entity::MME);
  if (lambda_beta * mme.service_time() >= 1.0)
    return {std::numeric_limits<double>::infinity(), false};
  if (lambda_beta <= 0.0) return {constant_delay_K(scaled) + mme.service_time(), true};
  const auto model = build_delay_model(lambda_beta, scaled);
  if (1.0 - policy.percentile > model.psi) return {model.K, true};
  return {delay_percentile(policy.percentile, model), true};
}

ScalingDecision choose_multiplier(double lambda_beta, const EpcProfiles& profiles,
                                  const ScalingPolicy& policy) {
  policy.validate();
  ScalingDecision d;
  d.lambda_beta = lambda_beta;
  d.predicted_at_1 = predict_percentile(lambda_beta, 1.0, profiles, policy).delay;
  for (double m : policy.multipliers) {
    const auto p = predict_percentile(lambda_beta, m, profiles, policy);
    d.multiplier = m;
    d.predicted = p.delay;
    if (p.feasible && p.delay <= policy.target_delay) {
      d.feasible = true;
      return d;
    }
  }
  d.feasible = false;
  return d;
}

ScalingController::ScalingController(EpcProfiles profiles, ScalingPolicy policy)
    : profiles_(std::move(profiles)), policy_(std::move(policy)) {
  policy_.validate();
  current_ = policy_.multipliers.front();
}

ScalingDecision ScalingController::decide(double lambda_beta) {
  auto d = choose_multiplier(lambda_beta, profiles_, policy_);
  if (d.multiplier < current_) {
    // Step down only to a level that clears the band.
    const double band = policy_.target_delay * (1.0 - policy_.hysteresis);
    double chosen = current_;
    for (double m : policy_.multipliers) {
      if (m >= current_) break;
      const auto p = predict_percentile(lambda_beta, m, profiles_, policy_);
      if (p.feasible && p.delay <= band) {
        chosen = m;
        break;
      }
    }
    if (chosen != d.multiplier) {
      const auto p = predict_percentile(lambda_beta, chosen, profiles_, policy_);
      d.multiplier = chosen;
      d.predicted = p.delay;
      d.feasible = p.feasible && p.delay <= policy_.target_delay;
    }
  }
  current_ = d.multiplier;
  return d;
}

ArrivalGenerator poisson_generator() {
  return [](const WindowSpec& w, double warmup, std::uint64_t seed) {
    if (w.lambda_beta <= 0.0) return EventStream{};
    return poisson_stream(w.lambda_beta, 0.0, warmup + w.length, seed);
  };
}

ArrivalGenerator traffic_generator(TrafficParams params, std::int64_t group_size) {
  params.validate();
  if (group_size < 1) throw ConfigError("scale: group_size must be >= 1");
  auto grid = std::make_shared<HazardGrid>(HazardGrid::beta34(params.n_slots));
  return [params, group_size, grid](const WindowSpec& w, double warmup, std::uint64_t seed) {
    if (!w.sources) throw ConfigError("scale: traffic generator needs a source count per window");
    const auto q = *w.sources;
    if (q < 1) return EventStream{};
    const auto groups = std::max<std::int64_t>(1, q / group_size);
    if (groups * group_size != q)
      throw ConfigError("scale: source count " + std::to_string(q) +
                        " is not a multiple of group_size");
    const auto pop = SourcePopulation::uniform(groups, group_size, params.period_T,
                                               derive_seed(seed, 1));
    const double horizon = std::max(params.period_T, warmup + w.length);
    return generate_requests(pop, params, *grid, horizon, derive_seed(seed, 2)).slice(0.0, warmup + w.length);
  };
}

std::vector<LoopRecord> run_scaling_loop(const std::vector<WindowSpec>& series,
                                         const EpcProfiles& profiles,
                                         const ScalingPolicy& policy,
                                         const ArrivalGenerator& generator,
                                         const LoopOptions& options) {
  if (series.empty()) throw ConfigError("scale: empty rate series");
  if (options.warmup < 0.0) throw ConfigError("scale: warmup must be >= 0");
  policy.validate();
  const auto procedure =
      options.procedure ? *options.procedure : ProcedureTemplate::ciot_default(profiles);
  ScalingController controller(profiles, policy);

  std::vector<LoopRecord> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& w = series[i];
    if (!(w.length > 0.0)) throw ConfigError("scale: window length must be positive");
    LoopRecord rec;
    rec.window_start = w.start;
    if (options.fixed_multiplier) {
      const auto p = predict_percentile(w.lambda_beta, *options.fixed_multiplier, profiles, policy);
      rec.decision.lambda_beta = w.lambda_beta;
      rec.decision.multiplier = *options.fixed_multiplier;
      rec.decision.predicted = p.delay;
      rec.decision.predicted_at_1 = predict_percentile(w.lambda_beta, 1.0, profiles, policy).delay;
      rec.decision.feasible = p.feasible && p.delay <= policy.target_delay;
    } else {
      rec.decision = controller.decide(w.lambda_beta);
    }

    const auto arrivals = generator(w, options.warmup, derive_seed(options.seed, i));
    const auto scaled = policy.apply(profiles, rec.decision.multiplier);
    SimulationOptions sim = options.simulation;
    sim.horizon = 0.0;
    const auto result = run_bearer_simulation(arrivals, procedure, scaled, sim);
    std::vector<double> measured;
    for (const auto& s : result.samples)
      if (s.arrival >= options.warmup) measured.push_back(s.delay());
    rec.requests = measured.size();
    rec.empirical = measured.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : quantile(std::move(measured), policy.percentile);
    out.push_back(rec);
  }
  return out;
}

void write_decisions_csv(std::ostream& out, const std::vector<LoopRecord>& records) {
  out << "window_start_s,lambda_hat,multiplier,predicted_p,empirical_p,feasible\n";
  for (const auto& r : records) {
    out << format_double(r.window_start) << ',' << format_double(r.decision.lambda_beta) << ','
        << format_double(r.decision.multiplier) << ',' << format_double(r.decision.predicted)
        << ',';
    if (!std::isnan(r.empirical)) out << format_double(r.empirical);
    out << ',' << (r.decision.feasible ? "true" : "false") << '\n';
  }
}

}  // namespace epcload
