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

#ifndef INTVIT_FIXED_POINT_H_
#define INTVIT_FIXED_POINT_H_

#include <cstdint>

#include "intvit/counted_int.h"

namespace intvit {

// A real constant encoded as mantissa * 2^-shift. Built offline from a real
// value; applied on the integer path with a multiply and a rounding shift.
struct Dyadic {
  std::int64_t mantissa = 0;
  int shift = 0;

  double to_double() const;
  friend bool operator==(const Dyadic&, const Dyadic&) = default;
};

inline constexpr int kDefaultMantissaBits = 16;

// Normalizes so that |mantissa| lies in [2^(bits-2), 2^(bits-1)), i.e. a
// signed `bits`-wide mantissa with its top magnitude bit set. Zero encodes as
// {0, 0}. Shifts are limited to [-30, 62]; values too small for that range
// flush to zero.
Dyadic to_dyadic(double value, int mantissa_bits = kDefaultMantissaBits);

// Encodes value at a fixed shift: mantissa = round(value * 2^shift).
Dyadic to_dyadic_fixed(double value, int shift);

// rounding_shift_right(v * mantissa, shift).
Int apply(Int v, const Dyadic& d);

// True when s == 2^-k for some integer k (k may be negative).
bool is_pow2_reciprocal(double s);
// log2 exponent k of a power-of-two reciprocal s = 2^-k.
int pow2_reciprocal_exponent(double s);
// Smallest power-of-two reciprocal 2^-k with 2^-k >= s.
double snap_up_to_pow2(double s);

}  // namespace intvit

#endif  // INTVIT_FIXED_POINT_H_
