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

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "epcload/arrival.hpp"
#include "epcload/autoscaler.hpp"
#include "epcload/config.hpp"
#include "epcload/errors.hpp"
#include "epcload/roots.hpp"

using namespace epcload;

namespace {

double predicted(double lb, double m, const ScalingPolicy& pol = {}) {
  return predict_percentile(lb, m, default_profiles(), pol).delay;
}

// Rate at which the prediction at multiplier m reaches the target.
double threshold_rate(double m, const ScalingPolicy& pol = {}) {
  const double cap = m / default_profiles().at(Entity::MME).service_time();
  return bisect([&](double lb) { return predicted(lb, m, pol) - pol.target_delay; }, 1.0,
                cap * (1 - 1e-9), 1e-12);
}

}  // namespace

TEST_CASE("policy validation") {
  ScalingPolicy p;
  CHECK_NOTHROW(p.validate());
  p.multipliers = {2.0, 3.0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.multipliers = {1.0, 2.0, 2.0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.percentile = 1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.hysteresis = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("prediction limits and monotonicity") {
  const double lb = lambda_beta(10000, 10.0);
  CHECK(predicted(lb, 1e9) < 1e-9);
  CHECK(predicted(lb, 2.0) < predicted(lb, 1.0));
  const double lb15 = lambda_beta(15000, 10.0);
  CHECK(predicted(lb15, 1.0) > predicted(lb15, 2.0));
  const auto over = predict_percentile(1.2 / 0.0009, 1.0, default_profiles(), {});
  CHECK_FALSE(over.feasible);
  CHECK(std::isinf(over.delay));
  CHECK(predict_percentile(1.2 / 0.0009, 2.0, default_profiles(), {}).feasible);
}

TEST_CASE("MME-only scaling leaves K alone") {
  ScalingPolicy mme;
  mme.scope = ScalingScope::MmeOnly;
  const auto prof = mme.apply(default_profiles(), 2.0);
  CHECK(constant_delay_K(prof) == doctest::Approx(0.0055));
  CHECK(prof.at(Entity::MME).capacity == doctest::Approx(2e4));
  const double lb = lambda_beta(10000, 10.0);
  CHECK(predicted(lb, 2.0, mme) > predicted(lb, 2.0));
}

TEST_CASE("multiplier choice") {
  const auto prof = default_profiles();
  ScalingPolicy pol;
  const auto low = choose_multiplier(100.0, prof, pol);
  CHECK(low.multiplier == 1.0);
  CHECK(low.feasible);
  CHECK(low.predicted == low.predicted_at_1);

  const double r1 = threshold_rate(1.0);
  const auto mid = choose_multiplier(r1 * 1.001, prof, pol);
  CHECK(mid.multiplier == 2.0);
  CHECK(mid.feasible);
  CHECK(mid.predicted <= pol.target_delay);
  CHECK(choose_multiplier(r1 * 0.999, prof, pol).multiplier == 1.0);

  const double r25 = threshold_rate(2.5);
  const auto top = choose_multiplier(r25 * 1.001, prof, pol);
  CHECK(top.multiplier == 2.5);
  CHECK_FALSE(top.feasible);
  CHECK(top.predicted > pol.target_delay);
}

TEST_CASE("decisions are monotone in the rate and safe when feasible") {
  const auto prof = default_profiles();
  ScalingPolicy pol;
  double prev = 1.0;
  for (double lb = 10.0; lb < 3000.0; lb += 10.0) {
    const auto d = choose_multiplier(lb, prof, pol);
    CHECK(d.multiplier >= prev);
    prev = d.multiplier;
    if (d.feasible) CHECK(d.predicted <= pol.target_delay);
  }
}

TEST_CASE("hysteresis delays scale-down") {
  ScalingPolicy pol;
  const double r1 = threshold_rate(1.0);
  const double band = threshold_rate(1.0, [] {
    ScalingPolicy p;
    p.target_delay *= 0.9;
    return p;
  }());
  REQUIRE(band < r1);
  ScalingController c(default_profiles(), pol);
  CHECK(c.decide(r1 * 1.01).multiplier == 2.0);
  // Between the band and the threshold the raw choice is 1.0 but the
  // controller holds.
  const double between = 0.5 * (band + r1);
  CHECK(choose_multiplier(between, default_profiles(), pol).multiplier == 1.0);
  CHECK(c.decide(between).multiplier == 2.0);
  CHECK(c.decide(band * 0.99).multiplier == 1.0);

  ScalingPolicy raw;
  raw.hysteresis = 0.0;
  ScalingController r(default_profiles(), raw);
  CHECK(r.decide(r1 * 1.01).multiplier == 2.0);
  CHECK(r.decide(between).multiplier == 1.0);
}

TEST_CASE("closed loop at a constant low rate") {
  std::vector<WindowSpec> series;
  for (int i = 0; i < 3; ++i) series.push_back({10.0 * i, 10.0, 300.0, std::nullopt});
  const auto rec = run_scaling_loop(series, default_profiles(), {}, poisson_generator());
  REQUIRE(rec.size() == 3);
  for (const auto& r : rec) {
    CHECK(r.decision.multiplier == 1.0);
    CHECK(r.requests > 2000);
    CHECK(r.empirical <= 0.1);
    CHECK(r.empirical == doctest::Approx(r.decision.predicted).epsilon(0.2));
  }
  std::ostringstream csv;
  write_decisions_csv(csv, rec);
  CHECK(csv.str().rfind("window_start_s,lambda_hat,multiplier,predicted_p,empirical_p,feasible\n", 0) == 0);
  CHECK_THROWS_AS(run_scaling_loop({}, default_profiles(), {}, poisson_generator()), ConfigError);
}

TEST_CASE("traffic generator drives the loop from source counts") {
  const auto params = TrafficParams::make(10.0, 1e-5);
  const auto gen = traffic_generator(params, 1000);
  WindowSpec w{0.0, 10.0, lambda_beta(20000, 10.0), 20000};
  const auto s = gen(w, 0.0, 3);
  CHECK(static_cast<double>(s.size()) / 10.0 == doctest::Approx(w.lambda_beta).epsilon(0.08));
  CHECK(s[s.size() - 1].time < 10.0);
  WindowSpec bad{0.0, 10.0, 1.0, 1500};
  CHECK_THROWS_AS(gen(bad, 2.0, 3), ConfigError);
}
