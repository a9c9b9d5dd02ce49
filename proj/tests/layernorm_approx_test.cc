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
#include <vector>

#include "gtest/gtest.h"
#include "intvit/counted_int.h"
#include "intvit/errors.h"
#include "intvit/layernorm_approx.h"
#include "intvit/rng.h"

namespace intvit::layernorm {
namespace {

const Variant kAll[] = {Variant::kBitshiftNewton, Variant::kPolySqrt, Variant::kLog2Scale};

LNConfig with(Variant v) {
  LNConfig c;
  c.variant = v;
  return c;
}

QParams out_params() { return QParams::per_tensor(8.0 / 255, 128, 8, Scheme::kAsymmetric); }

QTensor random_input(std::uint64_t seed, std::size_t rows, std::size_t n) {
  Rng rng(seed);
  std::vector<std::int32_t> c(rows * n);
  for (auto& v : c) v = static_cast<std::int32_t>(rng.uniform_int(0, 255));
  return {Tensor::integer({rows, n}, std::move(c)),
          QParams::per_tensor(0.05, 120, 8, Scheme::kAsymmetric)};
}

double rms_vs_exact(const QTensor& q, const std::vector<float>& g, const std::vector<float>& b,
                    Variant v) {
  const QTensor out = int_layernorm(q, quantize_affine(g), quantize_affine(b), with(v));
  const Tensor ref = layer_norm_reference(dequantize(q), g, b);
  const Tensor got = dequantize(out);
  double sq = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) sq += std::pow(ref.reals()[i] - got.reals()[i], 2);
  return std::sqrt(sq / ref.size());
}

TEST(IntSqrtTest, Examples) {
  EXPECT_EQ(int_sqrt(Int(0)).value(), 0);
  EXPECT_EQ(int_sqrt(Int(255)).value(), 15);
  EXPECT_EQ(int_sqrt(Int(256)).value(), 16);
  EXPECT_EQ(int_sqrt(Int(std::int64_t{1} << 62)).value(), std::int64_t{1} << 31);
  EXPECT_THROW(int_sqrt(Int(-1)), ConfigError);
}

TEST(IntSqrtTest, ExhaustiveSmallDomain) {
  std::int64_t r = 0;
  std::int64_t prev = 0;
  for (std::int64_t n = 0; n < (1 << 20); ++n) {
    while ((r + 1) * (r + 1) <= n) ++r;
    const std::int64_t got = int_sqrt(Int(n)).value();
    ASSERT_EQ(got, r) << n;
    ASSERT_GE(got, prev);
    prev = got;
  }
}

TEST(IntSqrtTest, FewIterationsOverestimate) {
  const std::int64_t n = 987654321;
  EXPECT_GE(int_sqrt(Int(n), 1).value(), int_sqrt(Int(n)).value());
}

TEST(ConfigTest, Validation) {
  LNConfig c;
  EXPECT_NO_THROW(c.validate());
  c.iterations = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.iterations = kMaxIterations + 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.eps_code = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ConfigTest, VariantNames) {
  for (Variant v : kAll) EXPECT_EQ(variant_from_string(to_string(v)), v);
  EXPECT_EQ(to_string(Variant::kLog2Scale), "log2_scale");
  EXPECT_THROW(variant_from_string("rsqrt"), ConfigError);
}

TEST(ReferenceTest, ZeroMeanUnitVariance) {
  const Tensor x = Tensor::real({1, 4}, {1, 2, 3, 4});
  const Tensor y = layer_norm_reference(x, {1, 1, 1, 1}, {0, 0, 0, 0});
  double m = 0;
  double v = 0;
  for (float f : y.reals()) m += f / 4;
  for (float f : y.reals()) v += (f - m) * (f - m) / 4;
  EXPECT_NEAR(m, 0, 1e-6);
  EXPECT_NEAR(v, 1, 1e-5);
}

class VariantTest : public ::testing::TestWithParam<Variant> {};

TEST_P(VariantTest, ConstantRowGivesBeta) {
  const QTensor q{Tensor::integer({2, 8}, std::vector<std::int32_t>(16, 77)),
                  QParams::per_tensor(0.05, 120, 8, Scheme::kAsymmetric)};
  const std::vector<float> ones(8, 1.0f);
  const std::vector<float> zeros(8, 0.0f);
  const QTensor out =
      int_layernorm(q, quantize_affine(ones), quantize_affine(zeros), out_params(), with(GetParam()));
  for (auto c : out.codes.ints()) EXPECT_EQ(c, 128);
}

TEST_P(VariantTest, TwoPointRow) {
  const QTensor q{Tensor::integer({1, 2}, {100, 140}),
                  QParams::per_tensor(0.05, 120, 8, Scheme::kAsymmetric)};
  const QTensor out = int_layernorm(q, quantize_affine({1.0f, 1.0f}), quantize_affine({0.0f, 0.0f}),
                                    out_params(), with(GetParam()));
  const Tensor y = dequantize(out);
  EXPECT_NEAR(y.reals()[0], -1.0, 2 * out.params.scale[0]);
  EXPECT_NEAR(y.reals()[1], 1.0, 2 * out.params.scale[0]);
}

TEST_P(VariantTest, AccuracyOnRandomInputs) {
  Rng rng(4);
  std::vector<float> g(64);
  std::vector<float> b(64);
  for (auto& v : g) v = static_cast<float>(1 + rng.normal(0, 0.1));
  for (auto& v : b) v = static_cast<float>(rng.normal(0, 0.1));
  EXPECT_LE(rms_vs_exact(random_input(12, 16, 64), g, b, GetParam()), 0.05);
}

TEST_P(VariantTest, RowShiftInvariant) {
  const QTensor a = random_input(5, 4, 32);
  std::vector<std::int32_t> low(a.codes.ints().begin(), a.codes.ints().end());
  for (auto& c : low) c /= 2;
  std::vector<std::int32_t> high = low;
  for (auto& c : high) c += 90;
  const QParams p = a.params;
  const auto g = quantize_affine(std::vector<float>(32, 1.0f));
  const auto be = quantize_affine(std::vector<float>(32, 0.1f));
  const QTensor o1 = int_layernorm({Tensor::integer({4, 32}, low), p}, g, be, out_params(),
                                   with(GetParam()));
  const QTensor o2 = int_layernorm({Tensor::integer({4, 32}, high), p}, g, be, out_params(),
                                   with(GetParam()));
  EXPECT_EQ(o1.codes, o2.codes);
}

TEST_P(VariantTest, IntegerOnlyAndFinite) {
  const QTensor q = random_input(6, 8, 64);
  const auto g = quantize_affine(std::vector<float>(64, 1.0f));
  const auto be = quantize_affine(std::vector<float>(64, 0.0f));
  const Kernel k = prepare(q.params, g, be, out_params(), with(GetParam()));
  OpCounter c;
  Tensor out;
  {
    CountingScope scope(c);
    out = run(k, q.codes);
  }
  EXPECT_EQ(c.float_violations, 0u);
  EXPECT_GT(c.total(), 0u);
  for (auto v : out.ints()) {
    EXPECT_GE(v, 0);
    EXPECT_LE(v, 255);
  }
}

INSTANTIATE_TEST_SUITE_P(AllVariants, VariantTest, ::testing::ValuesIn(kAll),
                         [](const auto& info) { return to_string(info.param); });

TEST(AffineTest, SymmetricCodes) {
  const QTensor q = quantize_affine({0.5f, -1.0f, 0.25f});
  EXPECT_EQ(q.params.scheme, Scheme::kSymmetric);
  const Tensor back = dequantize(q);
  EXPECT_NEAR(back.reals()[1], -1.0, q.params.scale[0] / 2 + 1e-6);
}

}  // namespace
}  // namespace intvit::layernorm
