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

#ifndef INTVIT_APPROX_ERROR_H_
#define INTVIT_APPROX_ERROR_H_

#include <cstddef>
#include <functional>

namespace intvit {

struct ErrorNorms {
  double l2 = 0.0;    // root-mean-square error on the grid
  double linf = 0.0;  // max absolute error on the grid
};

// Every error table in this project uses a uniform grid of this many points,
// endpoints included.
inline constexpr std::size_t kErrorGridPoints = 10001;

using ScalarFn = std::function<double(double)>;

// L2 (RMS) and L-infinity error of `approx` against `ref` on a uniform grid
// of `n` points spanning [lo, hi]. Requires lo < hi and n >= 2.
ErrorNorms approx_error(const ScalarFn& ref, const ScalarFn& approx, double lo, double hi,
                        std::size_t n = kErrorGridPoints);

// The grid itself, shared with fitting code so that the fit objective and the
// reported errors see the same points.
double grid_point(double lo, double hi, std::size_t n, std::size_t i);

}  // namespace intvit

#endif  // INTVIT_APPROX_ERROR_H_
