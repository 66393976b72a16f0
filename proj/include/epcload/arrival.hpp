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
#include <span>
#include <vector>

#include "epcload/hazard.hpp"
#include "epcload/traffic.hpp"

namespace epcload {

/// How the chain of the source that made the last transmission is treated.
enum class LastTransmitter {
  /// Generic chain: slot k+1 may already be an Alarm (the simplification
  /// that lets every source be treated as if it had just transmitted).
  Generic,
  /// Exact chain of a source that was in Alarm at slot k: slot k+1 is
  /// forced Regular.
  ForcedRegular,
};

/// P(source with the given offset enters Alarm within m slots after slot k),
/// exact over the wrapped slot grid: 1 - prod_{y=s+1}^{s+m} (1 - h(y mod N)),
/// s = (k + offset) mod N. Requires m >= 1 and 0 <= k < N.
double falpha_q_discrete(std::int64_t m, std::int64_t k, std::int64_t offset_slots,
                         const HazardGrid& grid,
                         LastTransmitter chain = LastTransmitter::Generic);

/// P(some source in the population enters Alarm within m slots after k):
/// 1 - prod_q (1 - F_q). When `transmitter` names a source, that source's
/// factor uses `chain`; every other source uses the generic chain.
double falpha_system_discrete(std::int64_t m, std::int64_t k, const SourcePopulation& population,
                              const TrafficParams& params, const HazardGrid& grid,
                              std::optional<std::int64_t> transmitter = std::nullopt,
                              LastTransmitter chain = LastTransmitter::ForcedRegular);

/// falpha_system_discrete over a grid of lags (OpenMP-parallel over lags).
std::vector<double> falpha_system_grid(std::span<const std::int64_t> lags, std::int64_t k,
                                       const SourcePopulation& population,
                                       const TrafficParams& params, const HazardGrid& grid,
                                       std::optional<std::int64_t> transmitter = std::nullopt,
                                       LastTransmitter chain = LastTransmitter::ForcedRegular);

namespace reference {
std::vector<double> falpha_system_grid(std::span<const std::int64_t> lags, std::int64_t k,
                                       const SourcePopulation& population,
                                       const TrafficParams& params, const HazardGrid& grid,
                                       std::optional<std::int64_t> transmitter = std::nullopt,
                                       LastTransmitter chain = LastTransmitter::ForcedRegular);
}  // namespace reference

struct ArrivalRates {
  double lambda_alpha = 0.0;         // Q / T, offset-averaged Alarm rate
  double lambda_alpha_given_t = 0.0; // sum_q f_b(s_q(t)), conditional Alarm rate
  double lambda_beta = 0.0;          // tx_probability * Q / T, request rate
};

/// Rates of the population at reference time t (seconds).
ArrivalRates arrival_rates(const SourcePopulation& population, const TrafficParams& params,
                           double t = 0.0);

/// Offset-averaged Alarm rate Q / T.
double lambda_alpha(std::int64_t sources, double period_T);

/// Bearer-request rate Q * p / T with p the per-visit transmission
/// probability (default 1 - e^-1).
double lambda_beta(std::int64_t sources, double period_T, double tx_probability = 0.0);

/// Small-lag exponential limit of the conditional first-Alarm CDF:
/// 1 - exp(-lambda_{alpha|t} tau).
double falpha_exponential(double tau, double t, const SourcePopulation& population,
                          double period_T);

/// Geometric mixture of Erlang(z, stage_rate) CDFs with per-visit success
/// probability p: weights p (1-p)^(z-1), z = 1..z_max.
struct ErlangMixture {
  double stage_rate = 1.0;
  double success_probability = 0.0;  // <= 0 means 1 - e^-1
  int z_max = 100;

  double p() const noexcept;
  /// Weight of stage count z.
  double weight(int z) const;
  /// Probability mass dropped by truncating at z_max: (1-p)^z_max.
  double truncation_bound() const;
};

struct MixtureValue {
  double cdf = 0.0;
  double truncation_bound = 0.0;
};

/// Truncated mixture CDF at tau; tau >= 0, z_max >= 1.
MixtureValue fbeta_mixture(double tau, const ErlangMixture& mix);

/// fbeta_mixture over a grid of tau values (OpenMP-parallel).
std::vector<double> fbeta_mixture_grid(std::span<const double> taus, const ErlangMixture& mix);

namespace reference {
std::vector<double> fbeta_mixture_grid(std::span<const double> taus, const ErlangMixture& mix);
}  // namespace reference

/// Exponential request inter-arrival CDF 1 - exp(-lambda_beta tau).
double fbeta_closed_form(double tau, std::int64_t sources, double period_T,
                         double tx_probability = 0.0);

/// Erlang(z, rate) CDF at tau.
double erlang_cdf(int z, double rate, double tau);

}  // namespace epcload
