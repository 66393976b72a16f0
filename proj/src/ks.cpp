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

#include "epcload/ks.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "epcload/errors.hpp"
#include "epcload/roots.hpp"
#include <json.hpp>

namespace epcload {

double ks_distance(std::span<const double> sorted_samples, const Cdf& model_cdf) {
  const auto n = sorted_samples.size();
  if (n < 2) throw DomainError("ks_distance needs at least 2 samples");
  if (!std::is_sorted(sorted_samples.begin(), sorted_samples.end())) {
    throw DomainError("ks_distance expects samples sorted ascending");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  double d = 0.0;
  std::size_t i = 0;
  while (i < n) {
    // Ties: the empirical CDF jumps once past the whole run of equal values.
    std::size_t j = i;
    while (j + 1 < n && sorted_samples[j + 1] == sorted_samples[i]) ++j;
    const double f = model_cdf(sorted_samples[i]);
    const double below = static_cast<double>(i) * inv_n;
    const double above = static_cast<double>(j + 1) * inv_n;
    d = std::max({d, f - below, above - f});
    i = j + 1;
  }
  return d;
}

double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x < 0.3) {
    // Jacobi-theta form converges fast for small x.
    const double pi2 = M_PI * M_PI;
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double t = (2.0 * k - 1.0);
      s += std::exp(-t * t * pi2 / (8.0 * x * x));
    }
    return std::sqrt(2.0 * M_PI) / x * s;
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return 1.0 - 2.0 * s;
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0) throw DomainError("ks_critical_value: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ks_critical_value: alpha must be in (0,1)");
  const double c = bisect([alpha](double x) { return 1.0 - kolmogorov_cdf(x) - alpha; }, 0.1, 5.0,
                          1e-12);
  return c / std::sqrt(static_cast<double>(n));
}

KsReport ks_test(std::span<const double> samples, const Cdf& model_cdf) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  KsReport r;
  r.n = sorted.size();
  r.statistic = ks_distance(sorted, model_cdf);
  r.critical_1pct = ks_critical_value(r.n, 0.01);
  r.critical_5pct = ks_critical_value(r.n, 0.05);
  r.p_value = 1.0 - kolmogorov_cdf(std::sqrt(static_cast<double>(r.n)) * r.statistic);
  r.significance_valid = r.n >= kKsMinSamples;
  return r;
}

std::string to_json_text(const KsReport& report) {
  nlohmann::ordered_json j;
  j["statistic"] = report.statistic;
  j["n"] = report.n;
  j["critical_1pct"] = report.critical_1pct;
  j["critical_5pct"] = report.critical_5pct;
  j["p_value"] = report.p_value;
  j["pass_1pct"] = report.pass_1pct();
  j["pass_5pct"] = report.pass_5pct();
  j["significance_valid"] = report.significance_valid;
  return j.dump(2);
}

}  // namespace epcload
