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

#include <cmath>
#include <sstream>

#include "epcload/errors.hpp"

namespace epcload {

/// Bisection for a root of `f` inside [lo, hi]. Stops when the bracket is
/// narrower than rel_tol * |midpoint| (or abs_tol). Throws NumericalError
/// with the bracket and end-point values when f(lo) and f(hi) share a sign.
template <typename F>
double bisect(F&& f, double lo, double hi, double rel_tol = 1e-12, double abs_tol = 0.0,
              int max_iter = 400) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi) || std::isnan(flo) || std::isnan(fhi)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "bisect: no sign change in bracket [" << lo << ", " << hi << "], f(lo)=" << flo
        << ", f(hi)=" << fhi;
    throw NumericalError(msg.str());
  }
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= std::max(rel_tol * std::abs(mid), abs_tol)) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace epcload
