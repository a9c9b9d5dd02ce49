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

#include "intvit/fixed_point.h"

#include <cmath>

#include "intvit/errors.h"

namespace intvit {

double Dyadic::to_double() const { return std::ldexp(static_cast<double>(mantissa), -shift); }

Dyadic to_dyadic(double value, int mantissa_bits) {
  if (!std::isfinite(value)) throw ConfigError("cannot encode a non-finite constant");
  if (value == 0.0) return {};
  int exp = 0;
  std::frexp(value, &exp);  // |value| in [2^(exp-1), 2^exp)
  int shift = (mantissa_bits - 1) - exp;
  if (shift > 62) return {};
  if (shift < -30) throw ConfigError("constant too large for a dyadic encoding");
  auto mantissa = static_cast<std::int64_t>(std::llround(std::ldexp(value, shift)));
  // Rounding can carry into the next power of two.
  if (std::llabs(mantissa) >= (std::int64_t{1} << (mantissa_bits - 1))) {
    mantissa /= 2;
    --shift;
  }
  return {mantissa, shift};
}

Dyadic to_dyadic_fixed(double value, int shift) {
  return {static_cast<std::int64_t>(std::llround(std::ldexp(value, shift))), shift};
}

Int apply(Int v, const Dyadic& d) { return rounding_shift_right(v * Int(d.mantissa), d.shift); }

bool is_pow2_reciprocal(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) return false;
  int exp = 0;
  return std::frexp(s, &exp) == 0.5;
}

int pow2_reciprocal_exponent(double s) {
  if (!is_pow2_reciprocal(s)) throw ConfigError("scale is not a power-of-two reciprocal");
  int exp = 0;
  std::frexp(s, &exp);
  return 1 - exp;
}

double snap_up_to_pow2(double s) {
  if (!(s > 0.0)) throw ConfigError("scale must be positive");
  return std::exp2(std::ceil(std::log2(s)));
}

}  // namespace intvit
