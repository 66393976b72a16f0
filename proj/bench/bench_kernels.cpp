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

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "epcload/arrival.hpp"
#include "epcload/hazard.hpp"
#include "epcload/traffic.hpp"

using namespace epcload;

namespace {

struct Setup {
  TrafficParams params = TrafficParams::make(10.0, 1e-4);
  HazardGrid grid = HazardGrid::beta34(params.n_slots);
  SourcePopulation population = SourcePopulation::uniform(20, 500, 10.0, 7);
};

const Setup& setup() {
  static const Setup s;
  return s;
}

std::vector<std::int64_t> lag_grid() {
  std::vector<std::int64_t> lags(256);
  std::iota(lags.begin(), lags.end(), std::int64_t{1});
  for (auto& l : lags) l *= 8;
  return lags;
}

std::vector<double> tau_grid() {
  std::vector<double> taus(4096);
  for (std::size_t i = 0; i < taus.size(); ++i) taus[i] = 1e-4 * static_cast<double>(i);
  return taus;
}

void BM_GenerateRequestsSerial(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) {
    auto out = reference::generate_requests(s.population, s.params, s.grid, 20.0, 1);
    benchmark::DoNotOptimize(out);
  }
}

void BM_GenerateRequestsParallel(benchmark::State& state) {
  const auto& s = setup();
  for (auto _ : state) {
    auto out = generate_requests(s.population, s.params, s.grid, 20.0, 1);
    benchmark::DoNotOptimize(out);
  }
}

void BM_FalphaGridSerial(benchmark::State& state) {
  const auto& s = setup();
  const auto lags = lag_grid();
  for (auto _ : state) {
    auto out = reference::falpha_system_grid(lags, 1000, s.population, s.params, s.grid);
    benchmark::DoNotOptimize(out);
  }
}

void BM_FalphaGridParallel(benchmark::State& state) {
  const auto& s = setup();
  const auto lags = lag_grid();
  for (auto _ : state) {
    auto out = falpha_system_grid(lags, 1000, s.population, s.params, s.grid);
    benchmark::DoNotOptimize(out);
  }
}

void BM_FbetaMixtureSerial(benchmark::State& state) {
  const auto taus = tau_grid();
  const ErlangMixture mix{1000.0, 0.0, 100};
  for (auto _ : state) {
    auto out = reference::fbeta_mixture_grid(taus, mix);
    benchmark::DoNotOptimize(out);
  }
}

void BM_FbetaMixtureParallel(benchmark::State& state) {
  const auto taus = tau_grid();
  const ErlangMixture mix{1000.0, 0.0, 100};
  for (auto _ : state) {
    auto out = fbeta_mixture_grid(taus, mix);
    benchmark::DoNotOptimize(out);
  }
}

}  // namespace

BENCHMARK(BM_GenerateRequestsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateRequestsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FalphaGridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FalphaGridParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FbetaMixtureSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FbetaMixtureParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
