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

#ifndef INTVIT_INTEGER_FORWARD_H_
#define INTVIT_INTEGER_FORWARD_H_

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "intvit/approx_kind.h"
#include "intvit/counted_int.h"
#include "intvit/gelu_approx.h"
#include "intvit/layernorm_approx.h"
#include "intvit/plan_io.h"
#include "intvit/softmax_approx.h"
#include "intvit/toy_vit.h"

namespace intvit {

// A prepared non-linear candidate kernel.
struct NonlinearKernel {
  ApproxKind kind = ApproxKind::kBitshiftNewton;
  std::variant<softmax::Kernel, gelu::Kernel, layernorm::Kernel> kernel;
  QParams out;
};

// `norm` is required for LayerNorm candidates. Softmax candidates ignore
// `out` and emit at softmax_output_params(in.bits).
NonlinearKernel prepare_nonlinear(ApproxKind kind, const QParams& in, const QParams& out,
                                  const NormWeights* norm = nullptr);
Tensor run_nonlinear(const NonlinearKernel& k, const Tensor& codes);

// Output parameters a non-linear layer would be calibrated to, given the
// real-valued reference output.
QParams nonlinear_output_params(LayerKind kind, const Tensor& reference_out, int bits,
                                bool* widened = nullptr);
// Activation parameters for a layer input; softmax inputs get a
// power-of-two scale.
QParams nonlinear_input_params(LayerKind kind, const Tensor& x, int bits, bool* widened = nullptr);

struct CalibrationResult {
  std::vector<SiteParams> sites;
  std::vector<std::string> warnings;
};

// One pass of `calib` ([batch, tokens, dim]) through the graph with the given
// per-layer kinds: every site's min/max envelope is observed on the
// real-valued output computed from the already-quantized upstream tensors.
CalibrationResult calibrate_sites(const ModelGraph& g, const std::vector<ApproxKind>& kinds,
                                  const Tensor& calib, int weight_bits, int act_bits);

struct IntegerResult {
  Tensor logits;  // dequantized at the boundary
  OpCounter ops;
};

// Integer-only inference with a calibrated plan. Kernels are prepared at
// construction; forward is const and thread-safe.
class IntegerModel {
 public:
  IntegerModel(const ModelGraph& g, const AssignmentPlan& plan);
  ~IntegerModel();
  IntegerModel(IntegerModel&&) noexcept;

  IntegerResult forward(const Tensor& x) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

IntegerResult integer_forward(const ModelGraph& g, const AssignmentPlan& plan, const Tensor& x);

}  // namespace intvit

#endif  // INTVIT_INTEGER_FORWARD_H_
