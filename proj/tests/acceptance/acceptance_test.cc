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

// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// below and never adjusted to make a criterion pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "intvit/approx_error.h"
#include "intvit/counted_int.h"
#include "intvit/gelu_approx.h"
#include "intvit/integer_forward.h"
#include "intvit/pipeline.h"
#include "intvit/quantizer.h"
#include "intvit/rng.h"
#include "intvit/softmax_approx.h"
#include "intvit/toy_vit.h"
#include "intvit/unified_metric.h"

namespace intvit {
namespace {

// Criterion 1
constexpr double kOursErfLinf = 0.0550, kOursErfLinfTol = 0.0005;
constexpr double kOursErfL2 = 0.0098, kIbertErfL2 = 0.0264, kL2RelTol = 0.15;
constexpr double kIbertErfLinf = 0.0962, kIbertErfLinfTol = 0.001;
// Criterion 2
constexpr double kIGeluLinf = 0.0182, kIGeluLinfTol = 0.001;
constexpr double kOursGeluLinf = 0.0093, kOursGeluLinfTol = 0.0005;
// Criterion 3
constexpr double kExactLn2Linf = 0.3069, kExactLn2Tol = 0.0001;
// Criterion 4
constexpr double kSqnrTol = 0.01;
// Criterion 5
constexpr std::size_t kVitBEntries = 159;
// Criterion 6
constexpr int kIntegerInputs = 100;
// Criteria 7 and 8
constexpr int kSoftmaxRows = 10000;
constexpr std::uint64_t kSoftmaxSeed = 2024;
constexpr double kSoftmaxElementTol = 0.03;
// Criterion 9
constexpr int kQuantSamples = 10000;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
};

std::string num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

bool near(double v, double want, double tol) { return std::abs(v - want) <= tol; }

ErrorNorms erf_norms(const gelu::ErfPolyCoeffs& c) {
  return approx_error([](double x) { return std::erf(x); },
                      [&](double x) { return gelu::erf_poly_eval(x, c); }, -3, 3);
}

ErrorNorms gelu_norms(const gelu::ErfPolyCoeffs& c) {
  return approx_error(gelu::exact_gelu, [&](double x) { return gelu::poly_gelu(x, c); }, -3, 3);
}

Outcome erf_table() {
  Outcome o;
  const ErrorNorms ours = erf_norms(gelu::kVisionQuartic);
  const ErrorNorms ib = erf_norms(gelu::ibert_coeffs());
  o.require(near(ours.linf, kOursErfLinf, kOursErfLinfTol), "ours Linf " + num(ours.linf));
  o.require(near(ours.l2, kOursErfL2, kOursErfL2 * kL2RelTol), "ours L2 " + num(ours.l2));
  o.require(near(ib.linf, kIbertErfLinf, kIbertErfLinfTol), "I-BERT Linf " + num(ib.linf));
  o.require(near(ib.l2, kIbertErfL2, kIbertErfL2 * kL2RelTol), "I-BERT L2 " + num(ib.l2));
  o.require(ours.linf < ib.linf && ours.l2 < ib.l2, "ours < I-BERT in both norms");
  return o;
}

Outcome gelu_table() {
  Outcome o;
  const ErrorNorms ig = gelu_norms(gelu::ibert_coeffs());
  const ErrorNorms ours = gelu_norms(gelu::kVisionQuartic);
  o.require(near(ig.linf, kIGeluLinf, kIGeluLinfTol), "i-GELU Linf " + num(ig.linf));
  o.require(near(ours.linf, kOursGeluLinf, kOursGeluLinfTol), "ours Linf " + num(ours.linf));
  o.require(ours.linf < ig.linf, "ordering preserved");
  return o;
}

Outcome exp2_table() {
  using softmax::Base2Approx;
  Outcome o;
  const ErrorNorms iv = softmax::base2_frac_approx_error(Base2Approx::kIvitLinear);
  const ErrorNorms ex = softmax::base2_frac_approx_error(Base2Approx::kOursExactLn2);
  const ErrorNorms sh = softmax::base2_frac_approx_error(Base2Approx::kOursShift);
  o.require(iv.linf == 0.5, "I-ViT Linf " + num(iv.linf));
  o.require(near(ex.linf, kExactLn2Linf, kExactLn2Tol), "ours exact Linf " + num(ex.linf));
  o.require(sh.linf == 0.3125, "ours shift Linf " + num(sh.linf));
  o.require(ex.l2 < iv.l2, "L2 ours " + num(ex.l2) + " < I-ViT " + num(iv.l2));
  return o;
}

Outcome sqnr_example() {
  Outcome o;
  const double a = sqnr_from_powers(1e4, 100);
  const double b = sqnr_from_powers(1e4, 60);
  o.require(near(a, 20.00, kSqnrTol), "(1e4, 100) " + num(a, 2) + " dB");
  o.require(near(b, 22.21, kSqnrTol), "(1e4, 60) " + num(b, 2) + " dB");
  return o;
}

Outcome search_space() {
  Outcome o;
  PipelineConfig cfg;
  cfg.model.blocks = 12;
  const ModelGraph g = build_toy_vit(cfg.model, cfg.seed, cfg.pools);
  const MetricTable t = stage1_analyze(g, calibration_batches(cfg));
  int failed = 0;
  for (const auto& e : t.entries) failed += e.failed;
  o.require(t.entries.size() == kVitBEntries, std::to_string(t.entries.size()) + " entries");
  o.require(failed == 0, std::to_string(failed) + " failed candidates");
  return o;
}

Outcome integer_only() {
  Outcome o;
  const PipelineConfig cfg;
  const ModelGraph g = build_toy_vit(cfg.model, cfg.seed, cfg.pools);
  const AssignmentPlan plan = run_pipeline(cfg);
  const IntegerModel model(g, plan);
  std::uint64_t violations = 0;
  std::uint64_t ops = 0;
  for (int i = 0; i < kIntegerInputs; ++i) {
    const IntegerResult r = model.forward(random_inputs(g.config, 1, 50000 + i));
    violations += r.ops.float_violations;
    ops += r.ops.total();
  }
  o.require(violations == 0, std::to_string(violations) + " float violations over " +
                                 std::to_string(kIntegerInputs) + " inputs");
  o.require(ops > 0, std::to_string(ops / kIntegerInputs) + " integer ops per input");
  return o;
}

// Random softmax rows shared by criteria 7 and 8: codes uniform in [0, 255]
// at scale 1/16, lengths uniform in [2, 64].
std::vector<QTensor> softmax_rows() {
  Rng rng(kSoftmaxSeed);
  std::vector<QTensor> rows;
  rows.reserve(kSoftmaxRows);
  for (int i = 0; i < kSoftmaxRows; ++i) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(2, 64));
    std::vector<std::int32_t> c(n);
    for (auto& v : c) v = static_cast<std::int32_t>(rng.uniform_int(0, 255));
    rows.push_back({Tensor::integer({1, n}, std::move(c)),
                    QParams::per_tensor(1.0 / 16, 128, 8, Scheme::kAsymmetric)});
  }
  return rows;
}

Outcome softmax_properties() {
  Outcome o;
  Rng rng(kSoftmaxSeed + 1);
  int order_bad = 0;
  int shift_bad = 0;
  int sum_bad = 0;
  for (const QTensor& q : softmax_rows()) {
    const auto in = q.codes.ints();
    const std::size_t n = in.size();
    const QTensor out = softmax::efficient_bit_softmax(q);
    const auto y = out.codes.ints();
    bool ordered = true;
    for (std::size_t i = 0; i < n && ordered; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if ((in[i] > in[j] && y[i] < y[j]) || (in[i] == in[j] && y[i] != y[j])) {
          ordered = false;
          break;
        }
      }
    }
    order_bad += !ordered;
    const auto [lo, hi] = std::minmax_element(in.begin(), in.end());
    const std::int32_t shift = static_cast<std::int32_t>(rng.uniform_int(-*lo, 255 - *hi));
    std::vector<std::int32_t> moved(in.begin(), in.end());
    for (auto& v : moved) v += shift;
    const QTensor out2 = softmax::efficient_bit_softmax({Tensor::integer({1, n}, moved), q.params});
    shift_bad += !(out2.codes == out.codes);
    double sum = 0;
    for (auto v : y) sum += v / 128.0;
    sum_bad += !(sum <= 1.0 && sum >= 1.0 - (n + 1) / 128.0);
  }
  o.require(order_bad == 0, std::to_string(order_bad) + " rows out of order");
  o.require(shift_bad == 0, std::to_string(shift_bad) + " rows not shift-invariant");
  o.require(sum_bad == 0, std::to_string(sum_bad) + " row sums out of range");
  return o;
}

Outcome kernel_accuracy() {
  Outcome o;
  double worst_ratio = 0;
  std::uint64_t violations = 0;
  for (const auto& [hi, lo] : std::vector<std::pair<double, double>>{{3, -3}, {8, -8}, {4, -1}}) {
    const QParams in = qparams_from_range(hi, lo, 8, Scheme::kAsymmetric);
    std::vector<std::int32_t> codes(256);
    for (int c = 0; c < 256; ++c) codes[c] = c;
    const QTensor q{Tensor::integer({256}, codes), in};
    OpCounter ops;
    QTensor y;
    {
      CountingScope scope(ops);
      y = gelu::data_aware_poly_gelu_int(q);
    }
    violations += ops.float_violations;
    const double s_out = y.params.scale[0];
    for (int c = 0; c < 256; ++c) {
      const double x = dequantize_value(c, in.scale[0], in.zero_point[0]);
      const double got = dequantize_value(y.codes.ints()[c], s_out, y.params.zero_point[0]);
      worst_ratio = std::max(worst_ratio, std::abs(got - gelu::poly_gelu(x, gelu::kVisionQuartic)) / s_out);
    }
  }
  o.require(worst_ratio <= 2.0 && violations == 0,
            "poly GELU sweep worst " + num(worst_ratio, 3) + " s_out");
  double worst = 0;
  for (const QTensor& q : softmax_rows()) {
    const Tensor ref = softmax::softmax_reference(dequantize(q));
    const Tensor got = dequantize(softmax::efficient_bit_softmax(q));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      worst = std::max(worst, static_cast<double>(std::abs(ref.reals()[i] - got.reals()[i])));
    }
  }
  o.require(worst <= kSoftmaxElementTol, "softmax worst elementwise error " + num(worst) +
                                             " (limit " + num(kSoftmaxElementTol, 2) + ")");
  return o;
}

Outcome quantizer_properties() {
  Outcome o;
  const QParams p = qparams_from_range(3.5, -1.25, 8, Scheme::kAsymmetric);
  const double s = p.scale[0];
  const double lo = dequantize_value(0, s, p.zero_point[0]);
  const double hi = dequantize_value(p.qmax(), s, p.zero_point[0]);
  const Tensor x = rng_tensor(9, {static_cast<std::size_t>(kQuantSamples)}, Uniform{lo, hi});
  const Tensor y = dequantize(quantize(x, p));
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    worst = std::max(worst, static_cast<double>(std::abs(x.reals()[i] - y.reals()[i])));
  }
  // Inputs and outputs are float32; allow their rounding on top of s/2.
  o.require(worst <= s / 2 * (1 + 1e-6), "round-trip worst " + num(worst / s, 4) + " s");

  std::vector<float> v(x.reals().begin(), x.reals().end());
  for (auto& f : v) f = f * 1.5f - 1.0f;
  std::sort(v.begin(), v.end());
  const Tensor codes = quantize(Tensor::real({v.size()}, v), p).codes;
  o.require(std::is_sorted(codes.ints().begin(), codes.ints().end()), "monotone on sorted inputs");

  std::vector<Tensor> parts;
  for (int i = 0; i < 8; ++i) parts.push_back(rng_tensor(100 + i, {64}, Normal{0.1 * i, 1.0 + i}));
  MinMaxObserver fwd;
  MinMaxObserver rev;
  for (const Tensor& t : parts) fwd.observe(t);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) rev.observe(*it);
  o.require(fwd.min() == rev.min() && fwd.max() == rev.max() &&
                fwd.asymmetric_params(8) == rev.asymmetric_params(8),
            "observer order-independent");
  return o;
}

Outcome fitting_oracle() {
  Outcome o;
  const gelu::FitResult d4 = gelu::fit_erf_poly(-3, 3, 4);
  const gelu::FitResult d3 = gelu::fit_erf_poly(-3, 3, 3);
  const gelu::FitResult d2 = gelu::fit_erf_poly(-3, 3, 2);
  const double published = gelu::erf_fit_objective(gelu::kVisionQuartic, -3, 3, kErrorGridPoints);
  o.require(d4.objective <= published,
            "degree-4 objective " + num(d4.objective) + " vs published " + num(published));
  o.require(d4.l2_err <= d3.l2_err && d3.l2_err <= d2.l2_err,
            "L2 d4 " + num(d4.l2_err) + ", d3 " + num(d3.l2_err) + ", d2 " + num(d2.l2_err));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace intvit

int main() {
  using namespace intvit;
  const std::vector<Criterion> criteria = {
      {1, "erf error table", 1.0, erf_table},
      {2, "GELU error table", 1.0, gelu_table},
      {3, "base-2 exp error table", 1.0, exp2_table},
      {4, "SQNR worked example", 1.0, sqnr_example},
      {5, "search-space count", 120.0, search_space},
      {6, "integer-only invariant", 30.0, integer_only},
      {7, "softmax properties", 30.0, softmax_properties},
      {8, "kernel-vs-oracle accuracy", 60.0, kernel_accuracy},
      {9, "quantizer properties", 10.0, quantizer_properties},
      {10, "fitting oracle", 60.0, fitting_oracle},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.time_limit_s, "runtime " + num(secs, 2) + " s (limit " + num(c.time_limit_s, 0) + " s)");
    failures += !o.pass;
    std::printf("criterion %d: %s %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
