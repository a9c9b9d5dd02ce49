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

#ifndef INTVIT_TOY_VIT_H_
#define INTVIT_TOY_VIT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "intvit/approx_kind.h"
#include "intvit/tensor.h"

namespace intvit {

// Shape of a small pre-norm vision transformer encoder operating on
// already-embedded tokens, with a linear classifier on token 0.
struct ModelConfig {
  std::size_t blocks = 2;
  std::size_t dim = 64;
  std::size_t heads = 4;
  std::size_t tokens = 17;
  std::size_t mlp_ratio = 4;
  std::size_t num_classes = 10;

  void validate() const;
  std::size_t head_dim() const { return dim / heads; }
  std::size_t hidden() const { return dim * mlp_ratio; }
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct LayerRecord {
  std::string layer_id;  // "ln0", "b3.ln1", "b3.softmax", "b3.ln2", "b3.gelu"
  LayerKind kind = LayerKind::kLayerNorm;
  std::vector<ApproxKind> candidates;
};

struct LinearWeights {
  Tensor w;  // [in, out]
  std::vector<float> bias;
};

struct NormWeights {
  std::vector<float> gamma;
  std::vector<float> beta;
};

struct BlockWeights {
  NormWeights ln1;
  LinearWeights qkv;  // dim -> 3 * dim, laid out as [q | k | v]
  LinearWeights proj;
  NormWeights ln2;
  LinearWeights fc1;
  LinearWeights fc2;
};

struct ModelWeights {
  NormWeights ln0;
  std::vector<BlockWeights> blocks;
  LinearWeights head;
};

using CandidatePools = std::map<LayerKind, std::vector<ApproxKind>>;

CandidatePools default_pools();

struct ModelGraph {
  ModelConfig config;
  std::uint64_t seed = 0;
  std::vector<LayerRecord> layers;  // non-linear layers in execution order
  ModelWeights weights;
};

// Weights ~ N(0, 0.02); LayerNorm gamma ~ 1 + N(0, 0.02), beta ~ N(0, 0.02).
ModelGraph build_toy_vit(const ModelConfig& config, std::uint64_t seed,
                         const CandidatePools& pools = default_pools());

// Called once per non-linear layer with its input; may overwrite the output.
using LayerHook = std::function<void(std::size_t layer_index, const Tensor& input, Tensor& output)>;

// x: [batch, tokens, dim] or [tokens, dim]. Returns logits [batch, classes].
Tensor forward_fp(const ModelGraph& g, const Tensor& x, const LayerHook& hook = {});

// Random calibration or test inputs, N(0, 1), shaped [batch, tokens, dim].
Tensor random_inputs(const ModelConfig& config, std::size_t batch, std::uint64_t seed);

// Dense helpers shared with the integer path's calibration.
Tensor linear_fp(const Tensor& x, const LinearWeights& lw);
Tensor gelu_fp(const Tensor& x);

}  // namespace intvit

#endif  // INTVIT_TOY_VIT_H_
