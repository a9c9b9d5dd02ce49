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

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "intvit/errors.h"
#include "intvit/quantizer.h"
#include "intvit/rng.h"

namespace intvit {
namespace {

TEST(QuantizerTest, SymmetricUnitRange) {
  const QParams p = qparams_from_range(1.0, -1.0, 8, Scheme::kAsymmetric);
  EXPECT_DOUBLE_EQ(p.scale[0], 2.0 / 255.0);
  EXPECT_EQ(p.zero_point[0], 128);
  EXPECT_EQ(quantize_value(0.0, p.scale[0], p.zero_point[0], p.qmax()), 128);
  const QParams s = qparams_from_range(1.0, -1.0, 8, Scheme::kSymmetric);
  EXPECT_DOUBLE_EQ(s.scale[0], 2.0 / 255.0);
  EXPECT_EQ(s.zero_point[0], 128);
}

TEST(QuantizerTest, AsymmetricZeroPointClipped) {
  const QParams p = qparams_from_range(6.0, 2.0, 8, Scheme::kAsymmetric);
  EXPECT_DOUBLE_EQ(p.scale[0], 4.0 / 255.0);
  EXPECT_EQ(p.zero_point[0], 0);
  const QParams n = qparams_from_range(-2.0, -6.0, 8, Scheme::kAsymmetric);
  EXPECT_EQ(n.zero_point[0], 255);
}

TEST(QuantizerTest, DegenerateRange) {
  EXPECT_THROW(qparams_from_range(1.0, 1.0, 8, Scheme::kAsymmetric), DegenerateRangeError);
  bool widened = false;
  const QParams p = qparams_from_range_widened(1.0, 1.0, 8, Scheme::kAsymmetric, &widened);
  EXPECT_TRUE(widened);
  EXPECT_GT(p.scale[0], 0.0);
}

TEST(QuantizerTest, RoundTripWithinHalfStep) {
  const double alpha = 3.5;
  const double beta = -1.25;
  const QParams p = qparams_from_range(alpha, beta, 8, Scheme::kAsymmetric);
  const double s = p.scale[0];
  // In range: inside the grid actually representable after rounding z.
  const double lo = dequantize_value(0, s, p.zero_point[0]);
  const double hi = dequantize_value(p.qmax(), s, p.zero_point[0]);
  const Tensor x = rng_tensor(9, {10000}, Uniform{lo, hi});
  const Tensor y = dequantize(quantize(x, p));
  for (std::size_t i = 0; i < x.size(); ++i) {
    ASSERT_LE(std::abs(x.reals()[i] - y.reals()[i]), s / 2 * (1 + 1e-6)) << i;
  }
}

TEST(QuantizerTest, MonotoneOnSortedInputs) {
  const QParams p = qparams_from_range(2.0, -2.0, 6, Scheme::kAsymmetric);
  Tensor x = rng_tensor(4, {5000}, Uniform{-3, 3});
  std::vector<float> v(x.reals().begin(), x.reals().end());
  std::sort(v.begin(), v.end());
  const Tensor codes = quantize(Tensor::real({v.size()}, v), p).codes;
  EXPECT_TRUE(std::is_sorted(codes.ints().begin(), codes.ints().end()));
}

TEST(QuantizerTest, PerChannelWeights) {
  const Tensor w = Tensor::real({2, 3}, {0.5f, -2.0f, 0.1f, -0.25f, 1.0f, -0.1f});
  const QTensor q = quantize_weights_per_channel(w, 1, 8);
  ASSERT_TRUE(q.params.per_channel());
  ASSERT_EQ(q.params.channels(), 3u);
  EXPECT_DOUBLE_EQ(q.params.scale[0], 1.0 / 255.0);
  EXPECT_DOUBLE_EQ(q.params.scale[1], 4.0 / 255.0);
  for (auto z : q.params.zero_point) EXPECT_EQ(z, 128);
  const Tensor back = dequantize(q);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double s = q.params.scale[i % 3];
    // The positive bound sits half a step past the top code; float inputs add ulps.
    EXPECT_LE(std::abs(back.reals()[i] - w.reals()[i]), s / 2 + 1e-6);
  }
}

TEST(ObserverTest, OrderIndependent) {
  std::vector<Tensor> parts;
  for (int i = 0; i < 6; ++i) parts.push_back(rng_tensor(20 + i, {7, 5}, Normal{i * 0.3, 1.0 + i}));
  MinMaxObserver forward;
  for (const Tensor& t : parts) forward.observe(t);
  MinMaxObserver backward;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) backward.observe(*it);
  EXPECT_EQ(forward.min(), backward.min());
  EXPECT_EQ(forward.max(), backward.max());
  EXPECT_EQ(forward.asymmetric_params(8), backward.asymmetric_params(8));

  MinMaxObserver a;
  MinMaxObserver b;
  for (int i = 0; i < 3; ++i) a.observe(parts[i]);
  for (int i = 3; i < 6; ++i) b.observe(parts[i]);
  a.merge(b);
  EXPECT_EQ(a.asymmetric_params(8), forward.asymmetric_params(8));
  EXPECT_EQ(a.samples_seen(), forward.samples_seen());
}

TEST(ObserverTest, IgnoresEmptyTensors) {
  MinMaxObserver o;
  o.observe(Tensor());
  EXPECT_EQ(o.samples_seen(), 0u);
}

TEST(ObserverTest, PerChannelEnvelope) {
  MinMaxObserver o(1);
  o.observe(Tensor::real({2, 2}, {1, -4, 3, 2}));
  ASSERT_EQ(o.running_min().size(), 2u);
  EXPECT_EQ(o.running_min()[0], 1.0);
  EXPECT_EQ(o.running_max()[0], 3.0);
  EXPECT_EQ(o.running_min()[1], -4.0);
  EXPECT_EQ(o.running_max()[1], 2.0);
}

}  // namespace
}  // namespace intvit
