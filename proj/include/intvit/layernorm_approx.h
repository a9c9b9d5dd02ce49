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

#ifndef INTVIT_LAYERNORM_APPROX_H_
#define INTVIT_LAYERNORM_APPROX_H_

#include <cstdint>
#include <string>
#include <vector>

#include "intvit/counted_int.h"
#include "intvit/fixed_point.h"
#include "intvit/quantizer.h"
#include "intvit/tensor.h"

// Integer-only LayerNorm candidates. The three families (bit-shifting,
// polynomial, logarithm) are reconstructions: each normalizes a row by an
// integer estimate of 1/sqrt(n^2 * Var) computed a different way.
namespace intvit::layernorm {

enum class Variant { kBitshiftNewton, kPolySqrt, kLog2Scale };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct LNConfig {
  Variant variant = Variant::kBitshiftNewton;
  int iterations = 8;          // Newton steps for kBitshiftNewton
  std::int64_t eps_code = 1;   // added to n^2 * Var in code units

  void validate() const;
};

inline constexpr int kMaxIterations = 16;
inline constexpr int kNormFracBits = 12;  // fixed-point bits of the normalized row
inline constexpr int kLog2FracBits = 12;  // fractional bits of the integer log2

// floor(sqrt(n)) by Newton iteration from x0 = 2^ceil(bits(n)/2). Exact once
// the iteration settles; fewer iterations return an upper estimate.
Int int_sqrt(Int n, int iterations = kMaxIterations);

// Exact LayerNorm over the last axis.
Tensor layer_norm_reference(const Tensor& x, const std::vector<float>& gamma,
                            const std::vector<float>& beta, double eps = 1e-6);

struct Kernel {
  LNConfig cfg;
  std::vector<std::int64_t> gamma;     // symmetric codes
  std::vector<std::int64_t> beta_acc;  // beta at the accumulator scale s_gamma / 2^P
  Dyadic out_mult;                     // accumulator -> output code
  std::int64_t out_zero = 0;
  std::int64_t out_qmax = 255;
  // Quadratic seeds; coefficient i is applied to x^i in Q15.
  Dyadic sqrt_c[3];
  Dyadic exp2_c[3];
};

// gamma and beta_sh are per-tensor symmetric QTensors of length row_length.
Kernel prepare(const QParams& in, const QTensor& gamma, const QTensor& beta_sh,
               const QParams& out, const LNConfig& cfg);
Tensor run(const Kernel& kernel, const Tensor& codes);

// Quantizes real affine parameters: gamma and beta as 8-bit symmetric.
QTensor quantize_affine(const std::vector<float>& v, int bits = 8);

QTensor int_layernorm(const QTensor& q, const QTensor& gamma, const QTensor& beta_sh,
                      const QParams& out, const LNConfig& cfg);
// Output parameters default to the range of the exact LayerNorm of the
// dequantized input.
QTensor int_layernorm(const QTensor& q, const QTensor& gamma, const QTensor& beta_sh,
                      const LNConfig& cfg);

}  // namespace intvit::layernorm

#endif  // INTVIT_LAYERNORM_APPROX_H_
