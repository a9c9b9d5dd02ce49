/* Copyright 2026 The intvit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "intvit/approx_error.h"

#include <algorithm>
#include <cmath>

#include "intvit/errors.h"

namespace intvit {

double grid_point(double lo, double hi, std::size_t n, std::size_t i) {
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

ErrorNorms approx_error(const ScalarFn& ref, const ScalarFn& approx, double lo, double hi,
                        std::size_t n) {
  if (!(lo < hi)) throw ConfigError("approx_error requires lo < hi");
  if (n < 2) throw ConfigError("approx_error requires at least two grid points");
  double sum_sq = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_point(lo, hi, n, i);
    const double e = std::abs(ref(x) - approx(x));
    sum_sq += e * e;
    worst = std::max(worst, e);
  }
  return {std::sqrt(sum_sq / static_cast<double>(n)), worst};
}

}  // namespace intvit
