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

#ifndef INTVIT_SOFTMAX_APPROX_H_
#define INTVIT_SOFTMAX_APPROX_H_

#include <cstdint>
#include <vector>

#include "intvit/approx_error.h"
#include "intvit/counted_int.h"
#include "intvit/quantizer.h"
#include "intvit/tensor.h"

namespace intvit::softmax {

// How ln 2 is realized in the first-order term 1 + ln2 * f.
enum class Ln2Mode {
  kShift1011,  // ln2 ~ (0.1011)_2 = 0.6875 via f>>1 + f>>3 + f>>4
  kExact,      // ln2 as a 16-bit dyadic constant
};

// Where the fractional part of the base-2 exponent is placed after removing
// the integer part q: S*Qp = -q + f.
enum class FracRange {
  kNonPositive,  // f in (-1, 0]
  kNonNegative,  // f in [0, 1)
};

struct BitExpConfig {
  int bits = 8;            // output bit-width b; probabilities use 2^(b-1) steps
  int M = 31;              // IntDiv headroom exponent
  int taylor_degree = 1;   // 1 or 2
  Ln2Mode ln2_mode = Ln2Mode::kShift1011;
  // Working precision of the exponent pipeline: inputs are rescaled to
  // 2^-frac_bits after max subtraction, so exp codes are at most 2^frac_bits.
  int frac_bits = 8;
  // The first-order term is monotone across integer boundaries only when the
  // fraction sits in [0, 1): at f -> -1 the line gives 1 - 0.6875 < 1/2.
  FracRange frac_range = FracRange::kNonNegative;
  // Reject softmax inputs whose scale is not an exact power-of-two reciprocal.
  bool strict_dyadic = true;

  // Smallest M that keeps IntDiv exact to its floors for rows of `row_length`
  // elements: frac_bits + bits + ceil(log2 row_length) + 2.
  int min_headroom(std::size_t row_length) const;
  // Throws ConfigError when a field or the headroom invariant is violated.
  void validate(std::size_t row_length) const;
};

// Configuration of the I-ViT Shiftmax baseline: single-shift fraction on (-1, 0].
BitExpConfig shiftmax_config(BitExpConfig base = {});

// ---------------------------------------------------------------------------
// Element-level primitives (integer path).

// Qp = Qd + (Qd >> 1) - (Qd >> 4): multiplication by 1.4375 ~ log2(e).
Int log2e_shift(Int q_delta);
// f>>1 + f>>3 + f>>4: multiplication by 0.6875 ~ ln 2. Three shifts, two adds.
Int phi(Int x);

struct ExpDecomposition {
  std::int64_t q_int = 0;        // integer part magnitude, >= 0
  std::int64_t r_frac_code = 0;  // fractional code f (written -r for (-1, 0])
  friend bool operator==(const ExpDecomposition&, const ExpDecomposition&) = default;
};

// Splits a non-positive exponent code Qp at scale s into S*Qp = -q + s*f.
// With a power-of-two reciprocal s the split is exact in code space; otherwise
// floor(1/s) stands in for 1/s, which strict mode rejects.
ExpDecomposition decompose(Int qp, double s, FracRange range = FracRange::kNonPositive,
                           bool strict_dyadic = true);

// Integer-only kernel constants for one exponent scale.
struct ExpConstants {
  std::int64_t one = 0;        // floor(1/s)
  int frac_shift = -1;         // log2(one) when one is a power of two, else -1
  std::int64_t ln2_mantissa = 0;
  int ln2_shift = 0;
};
ExpConstants exp_constants(double s, bool strict_dyadic);

// 2^(s*qp) as a code at scale s, for qp <= 0, under cfg's fraction handling:
//   (approx(f) + floor(1/s)) >> q.
Int bit_exp_from_log2(Int qp, const ExpConstants& k, const BitExpConfig& cfg);
// I-ViT flavour: f on (-1, 0] and approx(f) = f >> 1.
Int shift_exp_from_log2(Int qp, const ExpConstants& k);

// ---------------------------------------------------------------------------
// Tensor-level operations. Softmax inputs use the last axis as the row axis.

// Per row: Qd = Qx - max(Qx). Codes become <= 0; params are unchanged.
QTensor max_subtract(const QTensor& q);
QTensor log2e_shift(const QTensor& q_delta);

// Efficient Bit-exp over max-subtracted codes at scale s; output codes are at
// the same scale and encode e^(s*Qd).
QTensor efficient_bit_exp(const QTensor& q_delta, double s, const BitExpConfig& cfg);

// IntDiv: (floor(2^M / sum_j Qexp_j) * Qexp_i) >> (M - (b - 1)). Output codes
// lie in [0, 2^(b-1)] at scale 2^-(b-1).
QTensor int_div_normalize(const QTensor& q_exp, const BitExpConfig& cfg);

// max_subtract -> rescale to 2^-frac_bits -> Efficient Bit-exp -> IntDiv.
QTensor efficient_bit_softmax(const QTensor& q, const BitExpConfig& cfg = {});
// Same pipeline with the I-ViT exponent (f >> 1 on (-1, 0]).
QTensor shiftmax(const QTensor& q, const BitExpConfig& cfg = shiftmax_config());
// I-BERT i-exp numerators: x = -z ln2 + p, exp(p) ~ 0.3585 (p + 1.353)^2 + 0.344.
QTensor iexp_softmax(const QTensor& q, const BitExpConfig& cfg = {});
// i-exp probabilities requantized onto the log2 grid: code k encodes 2^-k.
// Returns the k codes (in [0, 2^b - 1]).
QTensor log2_softmax_codes(const QTensor& q, const BitExpConfig& cfg = {});
// log2_softmax_codes expressed on the shared linear output grid 2^-(b-1):
// code = 2^(b-1) >> k.
QTensor log2_softmax(const QTensor& q, const BitExpConfig& cfg = {});

// Output parameters shared by every Softmax candidate: scale 2^-(b-1), z = 0.
QParams softmax_output_params(int bits);

// I-BERT second-order exp constants at scale 2^-frac_bits.
struct IexpConstants {
  int frac_bits = 0;
  std::int64_t ln2_code = 0;  // round(ln2 * 2^F)
  std::int64_t b_code = 0;    // round(1.353 * 2^F)
  std::int64_t c_code = 0;    // round(0.344 * 2^F)
  std::int64_t a_mantissa = 0;
  int a_shift = 0;
};
IexpConstants iexp_constants(int frac_bits);
// e^(x * 2^-F) for x <= 0, result code at scale 2^-F.
Int iexp_code(Int x, const IexpConstants& k);

// ---------------------------------------------------------------------------
// Prepared kernels: `prepare` runs on the host and may use real arithmetic;
// `run` is integer-only.

enum class Variant { kEfficientBit, kShift, kIexp, kLog2 };

struct Kernel {
  Variant variant = Variant::kEfficientBit;
  BitExpConfig cfg;
  // Left shift (positive) or right shift (negative) that moves max-subtracted
  // input codes onto the working scale. Zero when the input scale is used
  // directly (non-dyadic inputs in non-strict mode).
  int rescale = 0;
  ExpConstants exp;
  IexpConstants iexp;
  // Probability precision used before log2 requantization.
  int log2_prob_bits = 16;
};

Kernel prepare(Variant variant, const QParams& in, const BitExpConfig& cfg);
// Input: codes of shape [..., n]; output: codes at softmax_output_params(b),
// or log2 codes for the kLog2 variant when `log2_codes` is set.
Tensor run(const Kernel& kernel, const Tensor& codes, bool log2_codes = false);

// ---------------------------------------------------------------------------
// Real-valued reference pieces.

// Exact softmax over the last axis.
Tensor softmax_reference(const Tensor& x);

enum class Base2Approx { kIvitLinear, kOursExactLn2, kOursShift };
// 2^x approximants on the fractional part: 1 + x/2, 1 + ln2*x, 1 + 0.6875*x.
double base2_approx(Base2Approx mode, double x);
ErrorNorms base2_frac_approx_error(Base2Approx mode);

}  // namespace intvit::softmax

#endif  // INTVIT_SOFTMAX_APPROX_H_
