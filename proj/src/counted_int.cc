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

#include "intvit/counted_int.h"

#include "intvit/errors.h"

namespace intvit {
namespace {

void tally(std::uint64_t OpCounter::*field) {
  if (auto* c = detail::active_counter) ++(c->*field);
}

}  // namespace

OpCounter& OpCounter::operator+=(const OpCounter& other) {
  adds += other.adds;
  muls += other.muls;
  divs += other.divs;
  shifts += other.shifts;
  compares += other.compares;
  float_violations += other.float_violations;
  return *this;
}

Int operator+(Int a, Int b) {
  tally(&OpCounter::adds);
  std::int64_t r;
  if (__builtin_add_overflow(a.v_, b.v_, &r)) throw OverflowError("integer add overflow");
  return Int(r);
}

Int operator-(Int a, Int b) {
  tally(&OpCounter::adds);
  std::int64_t r;
  if (__builtin_sub_overflow(a.v_, b.v_, &r)) throw OverflowError("integer sub overflow");
  return Int(r);
}

Int operator-(Int a) { return Int(0) - a; }

Int operator*(Int a, Int b) {
  tally(&OpCounter::muls);
  std::int64_t r;
  if (__builtin_mul_overflow(a.v_, b.v_, &r)) throw OverflowError("integer multiply overflow");
  return Int(r);
}

Int operator/(Int a, Int b) {
  tally(&OpCounter::divs);
  if (b.v_ == 0) throw OverflowError("integer division by zero");
  if (a.v_ == INT64_MIN && b.v_ == -1) throw OverflowError("integer division overflow");
  return Int(a.v_ / b.v_);
}

Int operator>>(Int a, int s) {
  tally(&OpCounter::shifts);
  if (s < 0) throw OverflowError("negative shift amount");
  if (s > 63) s = 63;
  return Int(a.v_ >> s);
}

Int operator<<(Int a, int s) {
  tally(&OpCounter::shifts);
  if (s < 0) throw OverflowError("negative shift amount");
  if (s > 62 && a.v_ != 0) throw OverflowError("integer shift overflow");
  if (s > 62) return Int(0);
  const std::int64_t r = a.v_ << s;
  if ((r >> s) != a.v_) throw OverflowError("integer shift overflow");
  return Int(r);
}

Int min(Int a, Int b) { return b < a ? b : a; }
Int max(Int a, Int b) { return a < b ? b : a; }
Int clamp(Int v, Int lo, Int hi) { return min(max(v, lo), hi); }

Int abs(Int v) {
  // Tally the negate unconditionally so the count is data-independent.
  const Int neg = -v;
  return v < Int(0) ? neg : v;
}

Int sign(Int v) {
  if (v > Int(0)) {
    tally(&OpCounter::compares);
    return Int(1);
  }
  return v < Int(0) ? Int(-1) : Int(0);
}

Int rounding_shift_right(Int v, int s) {
  if (s <= 0) return v << -s;
  if (s > 62) return Int(0);
  return (v + Int(std::int64_t{1} << (s - 1))) >> s;
}

Int bit_length_minus_one(Int v) {
  if (v.value() <= 0) {
    for (int i = 0; i < 6; ++i) {
      tally(&OpCounter::compares);
      tally(&OpCounter::shifts);
      tally(&OpCounter::adds);
    }
    return Int(-1);
  }
  std::int64_t x = v.value();
  std::int64_t pos = 0;
  for (int step = 32; step >= 1; step >>= 1) {
    tally(&OpCounter::compares);
    tally(&OpCounter::shifts);
    tally(&OpCounter::adds);
    if ((x >> step) != 0) {
      x >>= step;
      pos += step;
    }
  }
  return Int(pos);
}

}  // namespace intvit
