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

#include <cstddef>
#include <functional>
#include <span>
#include <string>

namespace epcload {

using Cdf = std::function<double(double)>;

/// Two-sided Kolmogorov-Smirnov distance sup_x |F_n(x) - F(x)| for samples
/// sorted ascending. Throws DomainError for fewer than 2 samples or
/// unsorted input.
double ks_distance(std::span<const double> sorted_samples, const Cdf& model_cdf);

/// Asymptotic Kolmogorov distribution P(K <= x).
double kolmogorov_cdf(double x);

/// Critical value c / sqrt(n) at significance `alpha` from the asymptotic
/// Kolmogorov distribution.
double ks_critical_value(std::size_t n, double alpha);

/// Smallest sample size for which the asymptotic critical values are used
/// to claim significance.
inline constexpr std::size_t kKsMinSamples = 50;

struct KsReport {
  double statistic = 0.0;
  std::size_t n = 0;
  double critical_1pct = 0.0;
  double critical_5pct = 0.0;
  double p_value = 1.0;
  bool significance_valid = false;  // n >= kKsMinSamples
  bool pass_1pct() const noexcept { return statistic <= critical_1pct; }
  bool pass_5pct() const noexcept { return statistic <= critical_5pct; }
};

/// Sorts a copy of `samples` and fills a full report.
KsReport ks_test(std::span<const double> samples, const Cdf& model_cdf);

/// Structured text (JSON object) rendering of a report.
std::string to_json_text(const KsReport& report);

}  // namespace epcload
