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

#include <cmath>
#include <cstdint>

#include "gtest/gtest.h"
#include "intvit/counted_int.h"
#include "intvit/fixed_point.h"
#include "intvit/rng.h"

namespace intvit {
namespace {

TEST(DyadicTest, NormalizedMantissa) {
  for (double v : {0.7071, 1.0, 3.5, 1e-3, 123.456, -0.3}) {
    const Dyadic d = to_dyadic(v);
    const std::int64_t m = std::abs(d.mantissa);
    EXPECT_GE(m, std::int64_t{1} << 14) << v;
    EXPECT_LT(m, std::int64_t{1} << 15) << v;
    EXPECT_NEAR(d.to_double(), v, std::abs(v) * std::ldexp(1.0, -14)) << v;
  }
  EXPECT_EQ(to_dyadic(0.0), (Dyadic{0, 0}));
}

TEST(DyadicTest, FixedShift) {
  const Dyadic d = to_dyadic_fixed(0.25, 8);
  EXPECT_EQ(d.mantissa, 64);
  EXPECT_EQ(d.shift, 8);
}

TEST(DyadicTest, ApplyMatchesRealProduct) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const double m = rng.uniform(1e-4, 4.0);
    const std::int64_t v = rng.uniform_int(-100000, 100000);
    const Dyadic d = to_dyadic(m);
    const double want = static_cast<double>(v) * d.to_double();
    EXPECT_LE(std::abs(static_cast<double>(apply(Int(v), d).value()) - want), 0.5 + 1e-9);
  }
}

TEST(DyadicTest, ApplyIsIntegerOnly) {
  OpCounter c;
  {
    CountingScope scope(c);
    (void)apply(Int(12345), to_dyadic_fixed(0.3, 16));
  }
  EXPECT_EQ(c.float_violations, 0u);
  EXPECT_GT(c.total(), 0u);
}

TEST(Pow2Test, Classification) {
  EXPECT_TRUE(is_pow2_reciprocal(1.0 / 64));
  EXPECT_TRUE(is_pow2_reciprocal(4.0));
  EXPECT_FALSE(is_pow2_reciprocal(0.1));
  EXPECT_FALSE(is_pow2_reciprocal(0.0));
  EXPECT_EQ(pow2_reciprocal_exponent(1.0 / 64), 6);
  EXPECT_EQ(pow2_reciprocal_exponent(4.0), -2);
}

TEST(Pow2Test, SnapUp) {
  EXPECT_DOUBLE_EQ(snap_up_to_pow2(0.1), 0.125);
  EXPECT_DOUBLE_EQ(snap_up_to_pow2(0.125), 0.125);
  EXPECT_DOUBLE_EQ(snap_up_to_pow2(3.0), 4.0);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double s = std::exp(rng.uniform(-12, 3));
    const double p = snap_up_to_pow2(s);
    EXPECT_TRUE(is_pow2_reciprocal(p));
    EXPECT_GE(p, s);
    EXPECT_LT(p, 2 * s);
  }
}

TEST(RoundingShiftTest, HalfUp) {
  EXPECT_EQ(rounding_shift_right(Int(5), 1).value(), 3);
  EXPECT_EQ(rounding_shift_right(Int(-5), 1).value(), -2);
  EXPECT_EQ(rounding_shift_right(Int(3), 0).value(), 3);
  EXPECT_EQ(rounding_shift_right(Int(3), -2).value(), 12);
}

}  // namespace
}  // namespace intvit
