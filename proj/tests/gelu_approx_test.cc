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
#include <limits>
#include <vector>

#include "gtest/gtest.h"
#include "intvit/counted_int.h"
#include "intvit/errors.h"
#include "intvit/gelu_approx.h"
#include "intvit/quantizer.h"

namespace intvit::gelu {
namespace {

// Independent evaluation of the saturating polynomial and its error norms.
double oracle_l(double x, double a, double b, int d) {
  if (x == 0) return 0;
  const double u = std::min(std::fabs(x), -b) + b;
  const double mag = a * std::pow(u, d) + 1.0;
  return x > 0 ? mag : -mag;
}

struct Norms {
  double l2;
  double linf;
};

template <class F, class G>
Norms oracle_norms(F ref, G approx, double lo, double hi) {
  const int n = 10001;
  double sq = 0;
  double mx = 0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double d = std::fabs(ref(x) - approx(x));
    sq += d * d;
    mx = std::max(mx, d);
  }
  return {std::sqrt(sq / n), mx};
}

double oracle_gelu(double x) { return 0.5 * x * (1 + std::erf(x / std::sqrt(2.0))); }

TEST(ErfPolyTest, Anchors) {
  EXPECT_EQ(erf_poly_eval(0.0, kVisionQuartic), 0.0);
  EXPECT_EQ(erf_poly_eval(3.0, kVisionQuartic), 1.0);
  EXPECT_EQ(erf_poly_eval(-3.0, kVisionQuartic), -1.0);
  for (double x : {0.1, 0.7, 1.9, 2.5}) {
    EXPECT_DOUBLE_EQ(erf_poly_eval(-x, kVisionQuartic), -erf_poly_eval(x, kVisionQuartic));
    EXPECT_NEAR(erf_poly_eval(x, kVisionQuartic), oracle_l(x, -0.019913, -2.698088, 4), 1e-14);
  }
}

TEST(ErfPolyTest, QuarticErrorsOnStandardRange) {
  const Norms o = oracle_norms([](double x) { return std::erf(x); },
                               [](double x) { return oracle_l(x, -0.019913, -2.698088, 4); }, -3, 3);
  const ErrorNorms e = approx_error([](double x) { return std::erf(x); },
                                    [](double x) { return erf_poly_eval(x, kVisionQuartic); }, -3, 3);
  EXPECT_NEAR(e.linf, o.linf, 1e-12);
  EXPECT_NEAR(e.l2, o.l2, 1e-12);
  EXPECT_NEAR(e.linf, 0.0550, 0.0005);
}

TEST(PolyGeluTest, Anchors) {
  EXPECT_EQ(poly_gelu(0.0, kVisionQuartic), 0.0);
  EXPECT_NEAR(poly_gelu(10.0, kVisionQuartic) / 10.0, 1.0, 1e-3);
  const Norms o = oracle_norms(oracle_gelu, [](double x) { return poly_gelu(x, kVisionQuartic); }, -3, 3);
  EXPECT_NEAR(o.linf, 0.0093, 0.0005);
}

TEST(FitTest, RejectsBadArguments) {
  EXPECT_THROW(fit_erf_poly(0.0, 0.0, 4), ConfigError);
  EXPECT_THROW(fit_erf_poly(1.0, -1.0, 4), ConfigError);
  EXPECT_THROW(fit_erf_poly(-3.0, 3.0, 7), ConfigError);
}

TEST(FitTest, QuarticBeatsPublishedCoefficients) {
  const FitResult r = fit_erf_poly(-3.0, 3.0, 4);
  EXPECT_LE(r.objective, erf_fit_objective(kVisionQuartic, -3.0, 3.0, 10001));
  EXPECT_LE(r.l2_err, 0.0098);
}

// Brute-force grid oracle for the degree-2 erf-objective fit.
TEST(FitTest, QuadraticMatchesGridOracle) {
  const FitResult r = fit_erf_poly(-3.0, 3.0, 2);
  double best = std::numeric_limits<double>::infinity();
  double best_a = 0;
  double best_b = 0;
  for (double b = -3.0; b <= -1.0; b += 0.01) {
    for (double a = -0.6; a <= -0.1; a += 0.002) {
      const double obj = erf_fit_objective({a, b, 2}, -3.0, 3.0, 2001);
      if (obj < best) {
        best = obj;
        best_a = a;
        best_b = b;
      }
    }
  }
  EXPECT_LE(erf_fit_objective(r.coeffs, -3.0, 3.0, 2001), best * (1 + 1e-9));
  EXPECT_NEAR(r.coeffs.a, best_a, 0.01);
  EXPECT_NEAR(r.coeffs.b, best_b, 0.02);
  const Norms o = oracle_norms([](double x) { return std::erf(x); },
                               [&](double x) { return oracle_l(x, r.coeffs.a, r.coeffs.b, 2); }, -3, 3);
  EXPECT_NEAR(r.linf_err, o.linf, 1e-12);
}

TEST(FitTest, Deterministic) {
  const FitResult a = fit_erf_poly(-2.0, 2.0, 3);
  const FitResult b = fit_erf_poly(-2.0, 2.0, 3);
  EXPECT_EQ(a.coeffs, b.coeffs);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(IbertTest, TableErrors) {
  const ErfPolyCoeffs c = ibert_coeffs();
  EXPECT_EQ(c.degree, 2);
  EXPECT_NEAR(c.a, -0.2888, 0.0888 * 0.05);
  EXPECT_NEAR(c.b, -1.769, 1.769 * 0.05);
  const Norms erf = oracle_norms([](double x) { return std::erf(x); },
                                 [&](double x) { return oracle_l(x, c.a, c.b, 2); }, -3, 3);
  EXPECT_NEAR(erf.linf, 0.0962, 0.001);
  EXPECT_NEAR(erf.l2, 0.0264, 0.0264 * 0.15);
  const Norms g = oracle_norms(oracle_gelu, [&](double x) { return poly_gelu(x, c); }, -3, 3);
  EXPECT_NEAR(g.linf, 0.0182, 0.001);
  EXPECT_EQ(poly_gelu(0.0, c), 0.0);
}

QTensor all_codes(const QParams& p) {
  std::vector<std::int32_t> codes(p.qmax() + 1);
  for (std::int32_t i = 0; i <= p.qmax(); ++i) codes[i] = i;
  return {Tensor::integer({codes.size()}, codes), p};
}

TEST(GeluKernelTest, ExhaustiveSweepMatchesRealPath) {
  for (int bits : {4, 6, 8}) {
    const QParams in = qparams_from_range(3.0, -3.0, bits, Scheme::kAsymmetric);
    const QTensor q = all_codes(in);
    OpCounter ops;
    QTensor y;
    {
      CountingScope scope(ops);
      y = data_aware_poly_gelu_int(q);
    }
    EXPECT_EQ(ops.float_violations, 0u);
    const double s_out = y.params.scale[0];
    for (std::int32_t c = 0; c <= in.qmax(); ++c) {
      const double x = dequantize_value(c, in.scale[0], in.zero_point[0]);
      const double got = dequantize_value(y.codes.ints()[c], s_out, y.params.zero_point[0]);
      ASSERT_LE(std::fabs(got - poly_gelu(x, kVisionQuartic)), 2 * s_out) << "bits " << bits << " code " << c;
    }
  }
}

TEST(GeluKernelTest, ZeroMapsToOutputZeroPoint) {
  const QParams in = qparams_from_range(3.0, -3.0, 8, Scheme::kAsymmetric);
  const QParams out = gelu_output_params(in);
  const QTensor q{Tensor::integer({1}, {in.zero_point[0]}), in};
  EXPECT_EQ(data_aware_poly_gelu_int(q, kVisionQuartic, out).codes.ints()[0], out.zero_point[0]);
}

TEST(GeluKernelTest, IbertAndShiftVariantsTrackGelu) {
  const QParams in = qparams_from_range(4.0, -4.0, 8, Scheme::kAsymmetric);
  const QParams out = gelu_output_params(in);
  const QTensor q = all_codes(in);
  const QTensor ib = ibert_gelu_int(q, out);
  const QTensor sh = shift_gelu_int(q, out);
  for (std::int32_t c = 0; c <= in.qmax(); ++c) {
    const double x = dequantize_value(c, in.scale[0], in.zero_point[0]);
    const double yi = dequantize_value(ib.codes.ints()[c], out.scale[0], out.zero_point[0]);
    const double ys = dequantize_value(sh.codes.ints()[c], out.scale[0], out.zero_point[0]);
    EXPECT_LE(std::fabs(yi - poly_gelu(x, ibert_coeffs())), 2 * out.scale[0]);
    EXPECT_LE(std::fabs(ys - sigmoid_gelu(x)), 0.05);
  }
}

TEST(GeluKernelTest, OverflowIsReported) {
  const QParams in = qparams_from_range(3.0, -3.0, 8, Scheme::kAsymmetric);
  Kernel k = prepare_poly(in, gelu_output_params(in), kVisionQuartic);
  k.out_mult = Dyadic{std::int64_t{1} << 40, -20};
  EXPECT_THROW(run(k, Tensor::integer({1}, {255})), OverflowError);
}

}  // namespace
}  // namespace intvit::gelu
