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

#include "epcload/arrival.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "epcload/errors.hpp"

namespace epcload {
namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();
const double kDefaultTx = -std::expm1(-1.0);

/// log P(no Alarm in the lag window) for one source; -inf if a certain slot
/// falls inside it.
double window_log_survival(std::int64_t m, std::int64_t s, const HazardGrid& grid,
                           LastTransmitter chain) {
  const std::int64_t from = s + (chain == LastTransmitter::ForcedRegular ? 2 : 1);
  const std::int64_t to = s + m + 1;
  if (from >= to) return 0.0;
  if (auto c = grid.next_certain(from); c && *c < to) return kMinusInf;
  return grid.log_survival(from, to);
}

void check_lag(std::int64_t m, std::int64_t k, const HazardGrid& grid) {
  if (m < 1) throw DomainError("lag m must be >= 1");
  if (k < 0 || k >= grid.size()) {
    std::ostringstream msg;
    msg << "reference slot k=" << k << " outside [0, " << grid.size() << ")";
    throw DomainError(msg.str());
  }
}

double resolve_tx(double p) { return p > 0.0 ? p : kDefaultTx; }

}  // namespace

double falpha_q_discrete(std::int64_t m, std::int64_t k, std::int64_t offset_slots,
                         const HazardGrid& grid, LastTransmitter chain) {
  check_lag(m, k, grid);
  const auto s = grid.wrap(k + offset_slots);
  return -std::expm1(window_log_survival(m, s, grid, chain));
}

double falpha_system_discrete(std::int64_t m, std::int64_t k, const SourcePopulation& population,
                              const TrafficParams& params, const HazardGrid& grid,
                              std::optional<std::int64_t> transmitter, LastTransmitter chain) {
  check_lag(m, k, grid);
  const auto q = population.total_sources();
  if (transmitter && (*transmitter < 0 || *transmitter >= q)) {
    throw DomainError("transmitter source id outside the population");
  }
  const auto tx_group = transmitter ? population.group_of(*transmitter) : std::int64_t{-1};
  double total = 0.0;
  for (std::int64_t g = 0; g < population.n_groups(); ++g) {
    const auto s = grid.wrap(k + population.offset_slots(g, params));
    const double generic = window_log_survival(m, s, grid, LastTransmitter::Generic);
    if (g == tx_group) {
      total += static_cast<double>(population.group_size - 1) * generic +
               window_log_survival(m, s, grid, chain);
    } else {
      total += static_cast<double>(population.group_size) * generic;
    }
  }
  return -std::expm1(total);
}

std::vector<double> falpha_system_grid(std::span<const std::int64_t> lags, std::int64_t k,
                                       const SourcePopulation& population,
                                       const TrafficParams& params, const HazardGrid& grid,
                                       std::optional<std::int64_t> transmitter,
                                       LastTransmitter chain) {
  for (auto m : lags) check_lag(m, k, grid);
  if (transmitter && (*transmitter < 0 || *transmitter >= population.total_sources())) {
    throw DomainError("transmitter source id outside the population");
  }
  std::vector<double> out(lags.size());
  const auto n = static_cast<std::int64_t>(lags.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = falpha_system_discrete(
        lags[static_cast<std::size_t>(i)], k, population, params, grid, transmitter, chain);
  }
  return out;
}

namespace reference {

std::vector<double> falpha_system_grid(std::span<const std::int64_t> lags, std::int64_t k,
                                       const SourcePopulation& population,
                                       const TrafficParams& params, const HazardGrid& grid,
                                       std::optional<std::int64_t> transmitter,
                                       LastTransmitter chain) {
  std::vector<double> out;
  out.reserve(lags.size());
  for (auto m : lags) {
    out.push_back(falpha_system_discrete(m, k, population, params, grid, transmitter, chain));
  }
  return out;
}

}  // namespace reference

double lambda_alpha(std::int64_t sources, double period_T) {
  if (sources < 1) throw DomainError("population must have at least one source");
  if (!(period_T > 0.0)) throw DomainError("period must be positive");
  return static_cast<double>(sources) / period_T;
}

double lambda_beta(std::int64_t sources, double period_T, double tx_probability) {
  return resolve_tx(tx_probability) * lambda_alpha(sources, period_T);
}

ArrivalRates arrival_rates(const SourcePopulation& population, const TrafficParams& params,
                           double t) {
  ArrivalRates r;
  r.lambda_alpha = lambda_alpha(population.total_sources(), params.period_T);
  r.lambda_beta = params.tx_probability * r.lambda_alpha;
  for (double w : population.offsets) {
    const double s = std::fmod(std::fmod(t + w, params.period_T) + params.period_T, params.period_T);
    r.lambda_alpha_given_t += static_cast<double>(population.group_size) * beta_pdf(s, params.period_T);
  }
  return r;
}

double falpha_exponential(double tau, double t, const SourcePopulation& population,
                          double period_T) {
  if (!(tau >= 0.0)) throw DomainError("falpha_exponential: tau must be >= 0");
  double rate = 0.0;
  for (double w : population.offsets) {
    const double s = std::fmod(std::fmod(t + w, period_T) + period_T, period_T);
    rate += static_cast<double>(population.group_size) * beta_pdf(s, period_T);
  }
  return -std::expm1(-rate * tau);
}

double ErlangMixture::p() const noexcept { return resolve_tx(success_probability); }

double ErlangMixture::weight(int z) const {
  if (z < 1) throw DomainError("Erlang stage count must be >= 1");
  return p() * std::pow(1.0 - p(), z - 1);
}

double ErlangMixture::truncation_bound() const { return std::pow(1.0 - p(), z_max); }

double erlang_cdf(int z, double rate, double tau) {
  if (z < 1) throw DomainError("Erlang stage count must be >= 1");
  if (!(tau >= 0.0)) throw DomainError("erlang_cdf: tau must be >= 0");
  const double x = rate * tau;
  if (x == 0.0) return 0.0;
  if (x < static_cast<double>(z)) {
    // Lower series: e^-x x^z / z! * sum_k x^k / ((z+1)...(z+k)).
    const double lead = std::exp(-x + z * std::log(x) - std::lgamma(z + 1.0));
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 10000; ++k) {
      term *= x / (z + k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::min(1.0, lead * sum);
  }
  // Upper tail: P(Poisson(x) < z) = sum_{j<z} e^-x x^j / j!.
  double term = std::exp(-x), upper = term;
  for (int j = 1; j < z; ++j) {
    term *= x / j;
    upper += term;
  }
  return std::max(0.0, 1.0 - upper);
}

MixtureValue fbeta_mixture(double tau, const ErlangMixture& mix) {
  if (!(tau >= 0.0)) throw DomainError("fbeta_mixture: tau must be >= 0");
  if (mix.z_max < 1) throw DomainError("fbeta_mixture: z_max must be >= 1");
  if (!(mix.stage_rate > 0.0)) throw DomainError("fbeta_mixture: stage rate must be positive");
  MixtureValue v;
  v.truncation_bound = mix.truncation_bound();
  for (int z = 1; z <= mix.z_max; ++z) v.cdf += mix.weight(z) * erlang_cdf(z, mix.stage_rate, tau);
  return v;
}

std::vector<double> fbeta_mixture_grid(std::span<const double> taus, const ErlangMixture& mix) {
  if (!taus.empty()) (void)fbeta_mixture(taus.front(), mix);  // surface argument errors
  for (double t : taus) {
    if (!(t >= 0.0)) throw DomainError("fbeta_mixture: tau must be >= 0");
  }
  std::vector<double> out(taus.size());
  const auto n = static_cast<std::int64_t>(taus.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = fbeta_mixture(taus[static_cast<std::size_t>(i)], mix).cdf;
  }
  return out;
}

namespace reference {

std::vector<double> fbeta_mixture_grid(std::span<const double> taus, const ErlangMixture& mix) {
  std::vector<double> out;
  out.reserve(taus.size());
  for (double t : taus) out.push_back(fbeta_mixture(t, mix).cdf);
  return out;
}

}  // namespace reference

double fbeta_closed_form(double tau, std::int64_t sources, double period_T,
                         double tx_probability) {
  if (!(tau >= 0.0)) throw DomainError("fbeta_closed_form: tau must be >= 0");
  return -std::expm1(-lambda_beta(sources, period_T, tx_probability) * tau);
}

}  // namespace epcload
