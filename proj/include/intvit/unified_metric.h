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

#ifndef INTVIT_UNIFIED_METRIC_H_
#define INTVIT_UNIFIED_METRIC_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "intvit/approx_error.h"
#include "intvit/approx_kind.h"
#include "intvit/tensor.h"

namespace intvit {

// Returned by sqnr for an exact reconstruction.
inline constexpr double kSqnrExact = std::numeric_limits<double>::infinity();

enum class DbConvention {
  kPowerRatio,  // 10 log10(signal / noise)
  kLiteral20,   // 20 log10(signal / noise)
};

struct MetricOptions {
  DbConvention db = DbConvention::kPowerRatio;
  // Min-max standardize p and c across the candidates of each layer before
  // scoring. Off by default: raw magnitudes are scored as-is.
  bool standardize = false;
};

double sqnr_from_powers(double signal_power, double noise_power,
                        DbConvention db = DbConvention::kPowerRatio);
double sqnr(const Tensor& x, const Tensor& x_hat, DbConvention db = DbConvention::kPowerRatio);
// Sum of squared differences.
double perturbation(const Tensor& x, const Tensor& x_hat);
// log(1 + exp(x)), stable at both tails.
double softplus(double x);
// 3 / (N(q)^-1 + N(p) + N(c)); q_db = +inf maps N(q)^-1 to 0.
double unified_score(double q_db, double p, double c);

// Integer operation cost per kernel: every add, shift, multiply, divide and
// compare costs 1. A layer with rows of length n costs
//   rows * (per_element * n + per_row + (row_max ? n - 1 : 0)).
// Data-dependent loops (the Newton square root, the log2 rounding search)
// are charged at their typical trip count on 8-bit inputs.
//
//   kind                   per_element  per_row  row_max
//   log2_softmax               35          60       yes
//   iexp_softmax               16           0       yes
//   shiftmax                   16           0       yes
//   efficient_bit_softmax      21           0       yes
//   ibert_gelu                 26           0       no
//   shift_gelu                 45           0       no
//   data_aware_poly_gelu       29           0       no
//   log2_scale                 16         118       no
//   poly_sqrt                  16          44       no
//   bitshift_newton            16          70       no
//
// The softmax gap between efficient_bit_softmax and shiftmax is the
// multiply-free ln2 term phi(x) = x>>1 + x>>3 + x>>4 (3 shifts, 2 adds).
struct OpCost {
  std::int64_t per_element;
  std::int64_t per_row;
  bool row_max;
};

inline constexpr std::int64_t kPhiOps = 5;

OpCost op_cost(ApproxKind kind);
// `layer_shape` is the input shape; the last axis is the reduction axis.
std::int64_t op_count(ApproxKind kind, const Shape& layer_shape);

struct MetricScore {
  double q_db = 0.0;
  double p = 0.0;
  std::int64_t c = 0;
  double score = 0.0;
};

struct MetricEntry {
  std::string layer_id;
  LayerKind layer_kind = LayerKind::kGelu;
  ApproxKind candidate = ApproxKind::kIbertGelu;
  MetricScore metric;
  bool failed = false;  // the candidate raised an error; scored 0
  std::string failure;
  bool chosen = false;
};

struct MetricTable {
  std::vector<MetricEntry> entries;
  double omega = 0.0;  // sum of the chosen entries' scores

  // layer_id,kind,candidate,q_db,p,c,score,chosen
  std::string to_csv() const;
};

// Recomputes every score from (q_db, p, c). With standardization, p and c are
// mapped to [0, 1] per layer first. Failed entries keep score 0.
void score_table(MetricTable& table, const MetricOptions& opts);

}  // namespace intvit

#endif  // INTVIT_UNIFIED_METRIC_H_
