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

#ifndef INTVIT_GELU_APPROX_H_
#define INTVIT_GELU_APPROX_H_

#include <cstddef>
#include <cstdint>

#include "intvit/approx_error.h"
#include "intvit/counted_int.h"
#include "intvit/errors.h"
#include "intvit/fixed_point.h"
#include "intvit/quantizer.h"
#include "intvit/tensor.h"

namespace intvit::gelu {

// Saturating odd polynomial for erf:
//   L(x) = sign(x) * (a * (min(|x|, -b) + b)^degree + 1)
// -b is the saturation threshold, so b < 0.
struct ErfPolyCoeffs {
  double a = 0.0;
  double b = -1.0;
  int degree = 4;

  void validate() const;
  friend bool operator==(const ErfPolyCoeffs&, const ErfPolyCoeffs&) = default;
};

// Quartic coefficients derived from vision activations.
inline constexpr ErfPolyCoeffs kVisionQuartic{-0.019913, -2.698088, 4};

struct FitResult {
  ErfPolyCoeffs coeffs;
  double l2_err = 0.0;    // RMS against erf on the standard error grid
  double linf_err = 0.0;  // max abs against erf on the standard error grid
  double lo = 0.0;
  double hi = 0.0;
  double objective = 0.0;  // sum of squared residuals over the fit samples
  std::size_t samples = 0;
  std::size_t evaluations = 0;
};

class FitNonConvergence : public FitError {
 public:
  FitNonConvergence(const std::string& what, FitResult best)
      : FitError(what), best_(best) {}
  const FitResult& best_so_far() const { return best_; }

 private:
  FitResult best_;
};

double exact_gelu(double x);
double erf_poly_eval(double x, const ErfPolyCoeffs& c);

// Objective sum_i (erf(x_i) - L(x_i))^2 over `samples` uniform points on
// [lo, hi].
double erf_fit_objective(const ErfPolyCoeffs& c, double lo, double hi, std::size_t samples);

// Minimizes erf_fit_objective over (a, b) for a fixed degree: a coarse grid
// over (b, a*b^degree) seeds a coordinate descent with shrinking steps that
// stops once a sweep improves the objective by less than 1e-10 relatively and
// the steps have collapsed. Deterministic.
FitResult fit_erf_poly(double lo, double hi, int degree, std::size_t samples = kErrorGridPoints);

// The same search against the GELU-level objective
//   sum_i (GELU(x_i) - x_i/2 * (1 + L(x_i / sqrt 2)))^2,
// which is how the I-BERT quadratic is obtained.
FitResult fit_gelu_poly(double lo, double hi, int degree, std::size_t samples = kErrorGridPoints);

// I-BERT quadratic, fitted once with fit_gelu_poly over (-3, 3) and cached.
const ErfPolyCoeffs& ibert_coeffs();

// x/2 * (1 + L(x / sqrt 2)).
double poly_gelu(double x, const ErfPolyCoeffs& c);
Tensor data_aware_poly_gelu(const Tensor& x, const ErfPolyCoeffs& c = kVisionQuartic);
Tensor ibert_gelu(const Tensor& x);
// x * sigmoid(1.702 x), the functional form behind ShiftGELU.
double sigmoid_gelu(double x);

// ---------------------------------------------------------------------------
// Integer kernels. `prepare_*` runs on the host; `run` is integer-only.

enum class Variant { kPoly, kShift };

inline constexpr int kPolyFracBits = 14;   // fixed-point precision of u = |x|/sqrt2 + b
inline constexpr int kShiftFracBits = 12;  // working scale of the ShiftGELU exponent

struct Kernel {
  Variant variant = Variant::kPoly;
  int degree = 4;
  std::int64_t in_zero = 0;
  std::int64_t out_zero = 0;
  std::int64_t out_qmax = 255;
  // Poly: |x| code -> |x|/sqrt2 in Q.kPolyFracBits (sqrt2 folded into the scale).
  Dyadic to_u;
  std::int64_t threshold = 0;  // round(-b * 2^K)
  Dyadic coeff_a;
  // Output requantization: value code * out_mult -> output code.
  Dyadic out_mult;
  // Shift: input code -> x in Q.kShiftFracBits.
  Dyadic to_exp;
};

Kernel prepare_poly(const QParams& in, const QParams& out, const ErfPolyCoeffs& c);
Kernel prepare_shift(const QParams& in, const QParams& out);
Tensor run(const Kernel& kernel, const Tensor& codes);

// Asymmetric output parameters spanning fn over every input code of `in`.
QParams output_params_for(const QParams& in, double (*fn)(double, const ErfPolyCoeffs&),
                          const ErfPolyCoeffs& c);
QParams gelu_output_params(const QParams& in);

// Integer-only Data-aware Poly-GELU; output params default to the exact GELU
// range over the input code grid.
QTensor data_aware_poly_gelu_int(const QTensor& q, const ErfPolyCoeffs& c = kVisionQuartic);
QTensor data_aware_poly_gelu_int(const QTensor& q, const ErfPolyCoeffs& c, const QParams& out);
QTensor ibert_gelu_int(const QTensor& q, const QParams& out);
QTensor shift_gelu_int(const QTensor& q, const QParams& out);

}  // namespace intvit::gelu

#endif  // INTVIT_GELU_APPROX_H_
