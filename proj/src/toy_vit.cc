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

#include "intvit/toy_vit.h"

#include <cmath>

#include "intvit/errors.h"
#include "intvit/gelu_approx.h"
#include "intvit/layernorm_approx.h"
#include "intvit/rng.h"
#include "intvit/softmax_approx.h"

namespace intvit {
namespace {

constexpr double kInitStd = 0.02;

LinearWeights make_linear(Rng& rng, std::size_t in, std::size_t out) {
  std::vector<float> w(in * out);
  for (float& v : w) v = static_cast<float>(rng.normal(0.0, kInitStd));
  std::vector<float> b(out);
  for (float& v : b) v = static_cast<float>(rng.normal(0.0, kInitStd));
  return {Tensor::real({in, out}, std::move(w)), std::move(b)};
}

NormWeights make_norm(Rng& rng, std::size_t n) {
  NormWeights nw{std::vector<float>(n), std::vector<float>(n)};
  for (float& v : nw.gamma) v = static_cast<float>(1.0 + rng.normal(0.0, kInitStd));
  for (float& v : nw.beta) v = static_cast<float>(rng.normal(0.0, kInitStd));
  return nw;
}

Tensor add(const Tensor& a, const Tensor& b) {
  const auto x = a.reals();
  const auto y = b.reals();
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return Tensor::real(a.dims(), std::move(out));
}

}  // namespace

void ModelConfig::validate() const {
  if (blocks == 0 || dim == 0 || heads == 0 || tokens == 0 || mlp_ratio == 0 || num_classes == 0) {
    throw ConfigError("model shape fields must be positive");
  }
  if (dim % heads != 0) throw ConfigError("heads must divide dim");
}

CandidatePools default_pools() {
  CandidatePools pools;
  for (LayerKind k : {LayerKind::kGelu, LayerKind::kSoftmax, LayerKind::kLayerNorm}) {
    pools[k] = default_pool(k);
  }
  return pools;
}

ModelGraph build_toy_vit(const ModelConfig& config, std::uint64_t seed, const CandidatePools& pools) {
  config.validate();
  ModelGraph g;
  g.config = config;
  g.seed = seed;
  auto pool = [&](LayerKind k) {
    const auto it = pools.find(k);
    if (it == pools.end() || it->second.empty()) throw ConfigError("empty candidate pool for " + to_string(k));
    for (ApproxKind a : it->second) {
      if (layer_kind_of(a) != k) {
        throw ConfigError(to_string(a) + " is not a " + to_string(k) + " candidate");
      }
    }
    return it->second;
  };
  g.layers.push_back({"ln0", LayerKind::kLayerNorm, pool(LayerKind::kLayerNorm)});
  for (std::size_t b = 0; b < config.blocks; ++b) {
    const std::string p = "b" + std::to_string(b) + ".";
    g.layers.push_back({p + "ln1", LayerKind::kLayerNorm, pool(LayerKind::kLayerNorm)});
    g.layers.push_back({p + "softmax", LayerKind::kSoftmax, pool(LayerKind::kSoftmax)});
    g.layers.push_back({p + "ln2", LayerKind::kLayerNorm, pool(LayerKind::kLayerNorm)});
    g.layers.push_back({p + "gelu", LayerKind::kGelu, pool(LayerKind::kGelu)});
  }

  Rng rng(seed);
  const std::size_t d = config.dim;
  g.weights.ln0 = make_norm(rng, d);
  for (std::size_t b = 0; b < config.blocks; ++b) {
    BlockWeights bw;
    bw.ln1 = make_norm(rng, d);
    bw.qkv = make_linear(rng, d, 3 * d);
    bw.proj = make_linear(rng, d, d);
    bw.ln2 = make_norm(rng, d);
    bw.fc1 = make_linear(rng, d, config.hidden());
    bw.fc2 = make_linear(rng, config.hidden(), d);
    g.weights.blocks.push_back(std::move(bw));
  }
  g.weights.head = make_linear(rng, d, config.num_classes);
  return g;
}

Tensor linear_fp(const Tensor& x, const LinearWeights& lw) {
  const std::size_t in = lw.w.dims()[0];
  const std::size_t out = lw.w.dims()[1];
  if (x.row_length() != in) throw ShapeError("linear input width mismatch");
  const auto a = x.reals();
  const auto w = lw.w.reals();
  const std::size_t rows = x.rows();
  std::vector<float> y(rows * out);
  std::vector<double> acc(out);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t o = 0; o < out; ++o) acc[o] = lw.bias[o];
    for (std::size_t k = 0; k < in; ++k) {
      const double v = a[r * in + k];
      const float* wr = w.data() + k * out;
      for (std::size_t o = 0; o < out; ++o) acc[o] += v * wr[o];
    }
    for (std::size_t o = 0; o < out; ++o) y[r * out + o] = static_cast<float>(acc[o]);
  }
  Shape dims = x.dims();
  dims.back() = out;
  return Tensor::real(dims, std::move(y));
}

Tensor gelu_fp(const Tensor& x) {
  const auto in = x.reals();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<float>(gelu::exact_gelu(in[i]));
  return Tensor::real(x.dims(), std::move(out));
}

Tensor forward_fp(const ModelGraph& g, const Tensor& x_in, const LayerHook& hook) {
  const ModelConfig& c = g.config;
  Tensor x = x_in;
  if (x.rank() == 2) x = x.reshaped({1, x.dims()[0], x.dims()[1]});
  if (x.rank() != 3 || x.dims()[1] != c.tokens || x.dims()[2] != c.dim) {
    throw ShapeError("input must be [batch, tokens, dim]");
  }
  const std::size_t batch = x.dims()[0];
  const std::size_t t = c.tokens;
  const std::size_t d = c.dim;
  const std::size_t hd = c.head_dim();
  std::size_t layer = 0;
  auto nonlinear = [&](const Tensor& in, Tensor out) {
    if (hook) hook(layer, in, out);
    ++layer;
    return out;
  };
  auto ln = [&](const Tensor& in, const NormWeights& nw) {
    return nonlinear(in, layernorm::layer_norm_reference(in, nw.gamma, nw.beta));
  };

  Tensor h = ln(x, g.weights.ln0);
  const double inv_sqrt_hd = 1.0 / std::sqrt(static_cast<double>(hd));
  for (const BlockWeights& bw : g.weights.blocks) {
    const Tensor a = ln(h, bw.ln1);
    const Tensor qkv = linear_fp(a, bw.qkv);
    const auto qv = qkv.reals();
    std::vector<float> scores(batch * c.heads * t * t);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t hh = 0; hh < c.heads; ++hh) {
        for (std::size_t i = 0; i < t; ++i) {
          const float* qi = qv.data() + (b * t + i) * 3 * d + hh * hd;
          for (std::size_t j = 0; j < t; ++j) {
            const float* kj = qv.data() + (b * t + j) * 3 * d + d + hh * hd;
            double s = 0.0;
            for (std::size_t e = 0; e < hd; ++e) s += static_cast<double>(qi[e]) * kj[e];
            scores[((b * c.heads + hh) * t + i) * t + j] = static_cast<float>(s * inv_sqrt_hd);
          }
        }
      }
    }
    const Tensor st = Tensor::real({batch, c.heads, t, t}, std::move(scores));
    const Tensor prob = nonlinear(st, softmax::softmax_reference(st));
    const auto pv = prob.reals();
    std::vector<float> attn(batch * t * d);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t hh = 0; hh < c.heads; ++hh) {
        for (std::size_t i = 0; i < t; ++i) {
          const float* pr = pv.data() + ((b * c.heads + hh) * t + i) * t;
          for (std::size_t e = 0; e < hd; ++e) {
            double s = 0.0;
            for (std::size_t j = 0; j < t; ++j) {
              s += static_cast<double>(pr[j]) * qv[(b * t + j) * 3 * d + 2 * d + hh * hd + e];
            }
            attn[(b * t + i) * d + hh * hd + e] = static_cast<float>(s);
          }
        }
      }
    }
    h = add(h, linear_fp(Tensor::real({batch, t, d}, std::move(attn)), bw.proj));
    const Tensor m = ln(h, bw.ln2);
    const Tensor u = linear_fp(m, bw.fc1);
    const Tensor gu = nonlinear(u, gelu_fp(u));
    h = add(h, linear_fp(gu, bw.fc2));
  }
  const auto hv = h.reals();
  std::vector<float> cls(batch * d);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t e = 0; e < d; ++e) cls[b * d + e] = hv[b * t * d + e];
  }
  return linear_fp(Tensor::real({batch, d}, std::move(cls)), g.weights.head);
}

Tensor random_inputs(const ModelConfig& config, std::size_t batch, std::uint64_t seed) {
  return rng_tensor(seed, {batch, config.tokens, config.dim}, Normal{0.0, 1.0});
}

}  // namespace intvit
