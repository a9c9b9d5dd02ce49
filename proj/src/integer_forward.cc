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

#include "intvit/integer_forward.h"

#include <cmath>
#include <map>
#include <utility>

#include "intvit/errors.h"
#include "intvit/fixed_point.h"

namespace intvit {

NonlinearKernel prepare_nonlinear(ApproxKind kind, const QParams& in, const QParams& out,
                                  const NormWeights* norm) {
  NonlinearKernel k;
  k.kind = kind;
  k.out = out;
  switch (layer_kind_of(kind)) {
    case LayerKind::kSoftmax: {
      softmax::BitExpConfig cfg;
      cfg.bits = in.bits;
      softmax::Variant v = softmax::Variant::kEfficientBit;
      if (kind == ApproxKind::kShiftmax) {
        cfg = softmax::shiftmax_config(cfg);
        v = softmax::Variant::kShift;
      } else if (kind == ApproxKind::kIexpSoftmax) {
        v = softmax::Variant::kIexp;
      } else if (kind == ApproxKind::kLog2Softmax) {
        v = softmax::Variant::kLog2;
      }
      k.kernel = softmax::prepare(v, in, cfg);
      k.out = softmax::softmax_output_params(in.bits);
      break;
    }
    case LayerKind::kGelu:
      if (kind == ApproxKind::kShiftGelu) {
        k.kernel = gelu::prepare_shift(in, out);
      } else {
        k.kernel = gelu::prepare_poly(
            in, out, kind == ApproxKind::kIbertGelu ? gelu::ibert_coeffs() : gelu::kVisionQuartic);
      }
      break;
    case LayerKind::kLayerNorm: {
      if (norm == nullptr) throw ConfigError("LayerNorm candidates need affine weights");
      layernorm::LNConfig cfg;
      cfg.variant = kind == ApproxKind::kLog2Scale  ? layernorm::Variant::kLog2Scale
                    : kind == ApproxKind::kPolySqrt ? layernorm::Variant::kPolySqrt
                                                    : layernorm::Variant::kBitshiftNewton;
      k.kernel = layernorm::prepare(in, layernorm::quantize_affine(norm->gamma),
                                    layernorm::quantize_affine(norm->beta), out, cfg);
      break;
    }
  }
  return k;
}

Tensor run_nonlinear(const NonlinearKernel& k, const Tensor& codes) {
  return std::visit([&](const auto& kernel) { return run(kernel, codes); }, k.kernel);
}

QParams nonlinear_output_params(LayerKind kind, const Tensor& reference_out, int bits,
                                bool* widened) {
  if (kind == LayerKind::kSoftmax) return softmax::softmax_output_params(bits);
  MinMaxObserver obs;
  obs.observe(reference_out);
  return obs.asymmetric_params(bits, widened);
}

namespace {

QParams snap_params(const QParams& p, double lo) {
  const double s = snap_up_to_pow2(p.scale[0]);
  const double z = std::clamp(std::nearbyint(-lo / s), 0.0, static_cast<double>(p.qmax()));
  return QParams::per_tensor(s, static_cast<std::int32_t>(z), p.bits, Scheme::kAsymmetric);
}

}  // namespace

QParams nonlinear_input_params(LayerKind kind, const Tensor& x, int bits, bool* widened) {
  MinMaxObserver obs;
  obs.observe(x);
  const QParams p = obs.asymmetric_params(bits, widened);
  return kind == LayerKind::kSoftmax ? snap_params(p, std::min(obs.min(), 0.0)) : p;
}

namespace {

struct PreparedLinear {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<std::int64_t> w;  // centered codes, [in, out]
  std::vector<std::int64_t> bias;
  std::vector<Dyadic> mult;
  std::vector<std::int64_t> out_zero;
  std::int64_t in_zero = 0;
  std::int64_t out_qmax = 255;
  std::vector<double> acc_scale;  // for a dequantizing head
};

struct PreparedBinary {
  Dyadic ma;
  Dyadic mb;
  std::int64_t za = 0;
  std::int64_t zb = 0;
  std::int64_t zo = 0;
  std::int64_t qmax = 255;
};

Tensor slice_columns(const Tensor& t, std::size_t begin, std::size_t count) {
  const std::size_t n = t.row_length();
  Shape dims = t.dims();
  dims.back() = count;
  if (t.dtype() == DType::kReal32) {
    const auto v = t.reals();
    std::vector<float> out(t.rows() * count);
    for (std::size_t r = 0; r < t.rows(); ++r) {
      for (std::size_t j = 0; j < count; ++j) out[r * count + j] = v[r * n + begin + j];
    }
    return Tensor::real(dims, std::move(out));
  }
  const auto v = t.ints();
  std::vector<std::int32_t> out(t.rows() * count);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t j = 0; j < count; ++j) out[r * count + j] = v[r * n + begin + j];
  }
  return Tensor::integer(dims, std::move(out));
}

// Token 0 of every sample: [batch, tokens, dim] -> [batch, dim].
Tensor cls_rows(const Tensor& t) {
  const std::size_t batch = t.dims()[0];
  const std::size_t tokens = t.dims()[1];
  const std::size_t d = t.dims()[2];
  const auto v = t.ints();
  std::vector<std::int32_t> out(batch * d);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t e = 0; e < d; ++e) out[b * d + e] = v[b * tokens * d + e];
  }
  return Tensor::integer({batch, d}, std::move(out));
}

Tensor attention_scores_real(const Tensor& q, const Tensor& k, std::size_t heads, double scale) {
  const std::size_t batch = q.dims()[0];
  const std::size_t t = q.dims()[1];
  const std::size_t d = q.dims()[2];
  const std::size_t hd = d / heads;
  const auto qv = q.reals();
  const auto kv = k.reals();
  std::vector<float> out(batch * heads * t * t);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) {
          double s = 0.0;
          for (std::size_t e = 0; e < hd; ++e) {
            s += static_cast<double>(qv[(b * t + i) * d + h * hd + e]) * kv[(b * t + j) * d + h * hd + e];
          }
          out[((b * heads + h) * t + i) * t + j] = static_cast<float>(s * scale);
        }
      }
    }
  }
  return Tensor::real({batch, heads, t, t}, std::move(out));
}

Tensor attention_values_real(const Tensor& p, const Tensor& v) {
  const std::size_t batch = v.dims()[0];
  const std::size_t t = v.dims()[1];
  const std::size_t d = v.dims()[2];
  const std::size_t heads = p.dims()[1];
  const std::size_t hd = d / heads;
  const auto pv = p.reals();
  const auto vv = v.reals();
  std::vector<float> out(batch * t * d);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t e = 0; e < hd; ++e) {
          double s = 0.0;
          for (std::size_t j = 0; j < t; ++j) {
            s += static_cast<double>(pv[((b * heads + h) * t + i) * t + j]) * vv[(b * t + j) * d + h * hd + e];
          }
          out[(b * t + i) * d + h * hd + e] = static_cast<float>(s);
        }
      }
    }
  }
  return Tensor::real({batch, t, d}, std::move(out));
}

Tensor add_real(const Tensor& a, const Tensor& b) {
  const auto x = a.reals();
  const auto y = b.reals();
  std::vector<float> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return Tensor::real(a.dims(), std::move(out));
}

// ---------------------------------------------------------------------------
// Integer kernels for the linear parts of the graph.

Tensor run_linear(const PreparedLinear& pl, const Tensor& a, std::vector<Int>* raw_acc) {
  if (a.row_length() != pl.in) throw ShapeError("linear input width mismatch");
  const auto av = a.ints();
  const std::size_t rows = a.rows();
  std::vector<std::int32_t> out(raw_acc ? 0 : rows * pl.out);
  std::vector<Int> x(pl.in);
  std::vector<Int> acc(pl.out);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < pl.in; ++k) x[k] = Int(av[r * pl.in + k]) - Int(pl.in_zero);
    for (std::size_t n = 0; n < pl.out; ++n) acc[n] = Int(pl.bias[n]);
    for (std::size_t k = 0; k < pl.in; ++k) {
      const std::int64_t* wr = pl.w.data() + k * pl.out;
      for (std::size_t n = 0; n < pl.out; ++n) acc[n] += x[k] * Int(wr[n]);
    }
    if (raw_acc) {
      raw_acc->insert(raw_acc->end(), acc.begin(), acc.end());
      continue;
    }
    for (std::size_t n = 0; n < pl.out; ++n) {
      const Int o = apply(acc[n], pl.mult[n]) + Int(pl.out_zero[n]);
      out[r * pl.out + n] = static_cast<std::int32_t>(clamp(o, Int(0), Int(pl.out_qmax)).value());
    }
  }
  if (raw_acc) return {};
  Shape dims = a.dims();
  dims.back() = pl.out;
  return Tensor::integer(dims, std::move(out));
}

Tensor run_scores(const PreparedBinary& pb, const Tensor& q, const Tensor& k, std::size_t heads) {
  const std::size_t batch = q.dims()[0];
  const std::size_t t = q.dims()[1];
  const std::size_t d = q.dims()[2];
  const std::size_t hd = d / heads;
  const auto qv = q.ints();
  const auto kv = k.ints();
  std::vector<Int> qc(qv.size());
  std::vector<Int> kc(kv.size());
  for (std::size_t i = 0; i < qv.size(); ++i) qc[i] = Int(qv[i]) - Int(pb.za);
  for (std::size_t i = 0; i < kv.size(); ++i) kc[i] = Int(kv[i]) - Int(pb.zb);
  std::vector<std::int32_t> out(batch * heads * t * t);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j < t; ++j) {
          Int acc = Int(0);
          for (std::size_t e = 0; e < hd; ++e) {
            acc += qc[(b * t + i) * d + h * hd + e] * kc[(b * t + j) * d + h * hd + e];
          }
          const Int o = clamp(apply(acc, pb.ma) + Int(pb.zo), Int(0), Int(pb.qmax));
          out[((b * heads + h) * t + i) * t + j] = static_cast<std::int32_t>(o.value());
        }
      }
    }
  }
  return Tensor::integer({batch, heads, t, t}, std::move(out));
}

Tensor run_values(const PreparedBinary& pb, const Tensor& p, const Tensor& v) {
  const std::size_t batch = v.dims()[0];
  const std::size_t t = v.dims()[1];
  const std::size_t d = v.dims()[2];
  const std::size_t heads = p.dims()[1];
  const std::size_t hd = d / heads;
  const auto pv = p.ints();
  const auto vv = v.ints();
  std::vector<Int> vc(vv.size());
  for (std::size_t i = 0; i < vv.size(); ++i) vc[i] = Int(vv[i]) - Int(pb.zb);
  std::vector<std::int32_t> out(batch * t * d);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t e = 0; e < hd; ++e) {
          Int acc = Int(0);
          for (std::size_t j = 0; j < t; ++j) {
            acc += (Int(pv[((b * heads + h) * t + i) * t + j]) - Int(pb.za)) * vc[(b * t + j) * d + h * hd + e];
          }
          const Int o = clamp(apply(acc, pb.ma) + Int(pb.zo), Int(0), Int(pb.qmax));
          out[(b * t + i) * d + h * hd + e] = static_cast<std::int32_t>(o.value());
        }
      }
    }
  }
  return Tensor::integer({batch, t, d}, std::move(out));
}

Tensor run_add(const PreparedBinary& pb, const Tensor& a, const Tensor& b) {
  const auto av = a.ints();
  const auto bv = b.ints();
  std::vector<std::int32_t> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) {
    const Int o = apply(Int(av[i]) - Int(pb.za), pb.ma) + apply(Int(bv[i]) - Int(pb.zb), pb.mb) + Int(pb.zo);
    out[i] = static_cast<std::int32_t>(clamp(o, Int(0), Int(pb.qmax)).value());
  }
  return Tensor::integer(a.dims(), std::move(out));
}

// ---------------------------------------------------------------------------

struct LinearSpec {
  const LinearWeights* weights;
  std::vector<std::string> out_sites;  // equal-width column groups
};

class Engine {
 public:
  Engine(const ModelGraph& g, std::vector<ApproxKind> kinds, int weight_bits, int act_bits)
      : g_(g), kinds_(std::move(kinds)), wbits_(weight_bits), abits_(act_bits) {
    if (kinds_.size() != g_.layers.size()) throw ConfigError("one kind per non-linear layer required");
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
      if (layer_kind_of(kinds_[i]) != g_.layers[i].kind) {
        throw ConfigError("layer " + g_.layers[i].layer_id + " cannot use " + to_string(kinds_[i]));
      }
    }
  }

  void start_calibration() { calibrating_ = true; }
  void load_sites(const std::vector<SiteParams>& sites) {
    for (const SiteParams& s : sites) sites_[s.site] = s.params;
  }
  void freeze() { frozen_ = true; }

  std::vector<SiteParams> sites() const {
    std::vector<SiteParams> out;
    for (const std::string& name : order_) out.push_back({name, sites_.at(name)});
    return out;
  }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Quantizes x, runs the integer graph and dequantizes the logits. `counter`
  // wraps exactly the integer section.
  Tensor run(const Tensor& x_in, OpCounter* counter) {
    Tensor x = x_in;
    if (x.rank() == 2) x = x.reshaped({1, x.dims()[0], x.dims()[1]});
    const ModelConfig& c = g_.config;
    if (x.rank() != 3 || x.dims()[1] != c.tokens || x.dims()[2] != c.dim) {
      throw ShapeError("input must be [batch, tokens, dim]");
    }
    const QParams& pin = site("input", [&] { return x; });
    const QTensor xq = quantize(x, pin);
    std::vector<Int> acc;
    std::size_t batch = x.dims()[0];
    {
      OpCounter scratch;
      CountingScope scope(counter ? *counter : scratch);
      body(xq, acc);
    }
    const PreparedLinear& head = linears_.at("head");
    std::vector<float> logits(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
      logits[i] = static_cast<float>(static_cast<double>(acc[i].value()) * head.acc_scale[i % head.out]);
    }
    return Tensor::real({batch, head.out}, std::move(logits));
  }

 private:
  template <class F>
  const QParams& site(const std::string& name, F reference, LayerKind snap_for = LayerKind::kGelu) {
    auto it = sites_.find(name);
    if (it != sites_.end()) {
      if (calibrating_ && std::find(order_.begin(), order_.end(), name) == order_.end()) order_.push_back(name);
      return it->second;
    }
    if (!calibrating_) throw ConfigError("plan has no quantization parameters for site '" + name + "'");
    bool widened = false;
    QParams p;
    if (snap_for == LayerKind::kSoftmax) {
      p = nonlinear_input_params(LayerKind::kSoftmax, reference(), abits_, &widened);
    } else {
      MinMaxObserver obs;
      obs.observe(reference());
      p = obs.asymmetric_params(abits_, &widened);
    }
    if (widened) warnings_.push_back("degenerate range at site '" + name + "' widened");
    order_.push_back(name);
    return sites_[name] = p;
  }

  void set_site(const std::string& name, const QParams& p) {
    if (sites_.count(name) == 0) {
      if (!calibrating_) throw ConfigError("plan has no quantization parameters for site '" + name + "'");
      sites_[name] = p;
    }
    if (calibrating_ && std::find(order_.begin(), order_.end(), name) == order_.end()) order_.push_back(name);
  }

  template <class T, class F>
  const T& cached(std::map<std::string, T>& m, const std::string& key, F make) {
    auto it = m.find(key);
    if (it != m.end()) return it->second;
    if (frozen_) throw Error("kernel '" + key + "' was not prepared");
    return m.emplace(key, make()).first->second;
  }

  template <class F>
  auto guarded(const std::string& layer, F f) {
    try {
      return f();
    } catch (const OverflowError& e) {
      throw OverflowError("layer " + layer + ": " + e.what());
    }
  }

  QTensor linear(const std::string& name, const QTensor& a, const LinearSpec& spec) {
    const std::size_t groups = spec.out_sites.size();
    const std::size_t out = spec.weights->w.dims()[1];
    const std::size_t width = out / groups;
    std::vector<QParams> outs;
    Tensor ref;
    for (std::size_t gi = 0; gi < groups; ++gi) {
      outs.push_back(site(spec.out_sites[gi], [&] {
        if (ref.size() == 0) ref = linear_fp(dequantize(a), *spec.weights);
        return slice_columns(ref, gi * width, width);
      }));
    }
    const PreparedLinear& pl = cached(linears_, name, [&] {
      return prepare_linear(name, *spec.weights, a.params, &outs);
    });
    const Tensor codes = guarded(name, [&] { return run_linear(pl, a.codes, nullptr); });
    QParams p = outs[0];
    return {codes, p};
  }

  PreparedLinear prepare_linear(const std::string& name, const LinearWeights& lw, const QParams& in,
                                const std::vector<QParams>* outs) {
    const QTensor wq = quantize_weights_per_channel(lw.w, 1, wbits_);
    set_site(name + ".weight", wq.params);
    PreparedLinear pl;
    pl.in = lw.w.dims()[0];
    pl.out = lw.w.dims()[1];
    pl.in_zero = in.zero_point[0];
    pl.out_qmax = (std::int64_t{1} << abits_) - 1;
    const auto codes = wq.codes.ints();
    pl.w.resize(codes.size());
    for (std::size_t k = 0; k < pl.in; ++k) {
      for (std::size_t n = 0; n < pl.out; ++n) {
        pl.w[k * pl.out + n] = codes[k * pl.out + n] - wq.params.zero_point[n];
      }
    }
    const std::size_t width = outs ? pl.out / outs->size() : pl.out;
    for (std::size_t n = 0; n < pl.out; ++n) {
      const double acc_scale = in.scale[0] * wq.params.scale[n];
      pl.bias.push_back(std::llround(lw.bias[n] / acc_scale));
      pl.acc_scale.push_back(acc_scale);
      if (outs) {
        const QParams& o = (*outs)[n / width];
        pl.mult.push_back(to_dyadic(acc_scale / o.scale[0]));
        pl.out_zero.push_back(o.zero_point[0]);
      }
    }
    return pl;
  }

  QTensor nonlinear(std::size_t layer, const QTensor& in, const NormWeights* norm) {
    const LayerRecord& rec = g_.layers[layer];
    const std::string& id = rec.layer_id;
    QParams out;
    if (rec.kind == LayerKind::kSoftmax) {
      out = softmax::softmax_output_params(in.params.bits);
      set_site(id, out);
    } else {
      out = site(id, [&] {
        const Tensor x = dequantize(in);
        return rec.kind == LayerKind::kGelu ? gelu_fp(x)
                                            : layernorm::layer_norm_reference(x, norm->gamma, norm->beta);
      });
    }
    const NonlinearKernel& k = cached(nonlinear_, id, [&] {
      return prepare_nonlinear(kinds_[layer], in.params, out, norm);
    });
    return {guarded(id, [&] { return run_nonlinear(k, in.codes); }), k.out};
  }

  QTensor residual(const std::string& name, const QTensor& a, const QTensor& b) {
    const QParams& o = site(name, [&] { return add_real(dequantize(a), dequantize(b)); });
    const PreparedBinary& pb = cached(binaries_, name, [&] {
      PreparedBinary p;
      p.ma = to_dyadic(a.params.scale[0] / o.scale[0]);
      p.mb = to_dyadic(b.params.scale[0] / o.scale[0]);
      p.za = a.params.zero_point[0];
      p.zb = b.params.zero_point[0];
      p.zo = o.zero_point[0];
      p.qmax = o.qmax();
      return p;
    });
    return {guarded(name, [&] { return run_add(pb, a.codes, b.codes); }), o};
  }

  void body(const QTensor& x, std::vector<Int>& head_acc) {
    const ModelConfig& c = g_.config;
    const std::size_t d = c.dim;
    const double inv_sqrt_hd = 1.0 / std::sqrt(static_cast<double>(c.head_dim()));
    std::size_t layer = 0;
    QTensor h = nonlinear(layer++, x, &g_.weights.ln0);
    for (std::size_t bi = 0; bi < c.blocks; ++bi) {
      const BlockWeights& bw = g_.weights.blocks[bi];
      const std::string p = "b" + std::to_string(bi) + ".";
      const QTensor a = nonlinear(layer++, h, &bw.ln1);

      const QTensor qkv = linear(p + "qkv", a, {&bw.qkv, {p + "q", p + "k", p + "v"}});
      const QTensor q{slice_columns(qkv.codes, 0, d), sites_.at(p + "q")};
      const QTensor k{slice_columns(qkv.codes, d, d), sites_.at(p + "k")};
      const QTensor v{slice_columns(qkv.codes, 2 * d, d), sites_.at(p + "v")};

      const QParams& sp = site(
          p + "scores",
          [&] { return attention_scores_real(dequantize(q), dequantize(k), c.heads, inv_sqrt_hd); },
          LayerKind::kSoftmax);
      const PreparedBinary& ps = cached(binaries_, p + "scores", [&] {
        PreparedBinary pb;
        pb.ma = to_dyadic(q.params.scale[0] * k.params.scale[0] * inv_sqrt_hd / sp.scale[0]);
        pb.za = q.params.zero_point[0];
        pb.zb = k.params.zero_point[0];
        pb.zo = sp.zero_point[0];
        pb.qmax = sp.qmax();
        return pb;
      });
      const QTensor scores{guarded(p + "scores", [&] { return run_scores(ps, q.codes, k.codes, c.heads); }), sp};
      const QTensor prob = nonlinear(layer++, scores, nullptr);

      const QParams& ap = site(p + "attn", [&] { return attention_values_real(dequantize(prob), dequantize(v)); });
      const PreparedBinary& pv = cached(binaries_, p + "attn", [&] {
        PreparedBinary pb;
        pb.ma = to_dyadic(prob.params.scale[0] * v.params.scale[0] / ap.scale[0]);
        pb.za = prob.params.zero_point[0];
        pb.zb = v.params.zero_point[0];
        pb.zo = ap.zero_point[0];
        pb.qmax = ap.qmax();
        return pb;
      });
      const QTensor attn{guarded(p + "attn", [&] { return run_values(pv, prob.codes, v.codes); }), ap};

      const QTensor proj = linear(p + "proj", attn, {&bw.proj, {p + "proj"}});
      h = residual(p + "res1", h, proj);
      const QTensor m = nonlinear(layer++, h, &bw.ln2);
      const QTensor u = linear(p + "fc1", m, {&bw.fc1, {p + "fc1"}});
      const QTensor gu = nonlinear(layer++, u, nullptr);
      const QTensor f = linear(p + "fc2", gu, {&bw.fc2, {p + "fc2"}});
      h = residual(p + "res2", h, f);
    }
    const QTensor cls{cls_rows(h.codes), h.params};
    const PreparedLinear& head = cached(linears_, "head", [&] {
      return prepare_linear("head", g_.weights.head, cls.params, nullptr);
    });
    guarded("head", [&] { return run_linear(head, cls.codes, &head_acc); });
  }

  const ModelGraph& g_;
  std::vector<ApproxKind> kinds_;
  int wbits_;
  int abits_;
  bool calibrating_ = false;
  bool frozen_ = false;
  std::map<std::string, QParams> sites_;
  std::vector<std::string> order_;
  std::vector<std::string> warnings_;
  std::map<std::string, PreparedLinear> linears_;
  std::map<std::string, PreparedBinary> binaries_;
  std::map<std::string, NonlinearKernel> nonlinear_;
};

}  // namespace

CalibrationResult calibrate_sites(const ModelGraph& g, const std::vector<ApproxKind>& kinds,
                                  const Tensor& calib, int weight_bits, int act_bits) {
  Engine e(g, kinds, weight_bits, act_bits);
  e.start_calibration();
  e.run(calib, nullptr);
  return {e.sites(), e.warnings()};
}

struct IntegerModel::Impl {
  ModelGraph graph;
  std::unique_ptr<Engine> engine;
};

IntegerModel::IntegerModel(const ModelGraph& g, const AssignmentPlan& plan) : impl_(new Impl) {
  if (!plan.calibrated()) throw ConfigError("plan is not calibrated");
  if (!(plan.model == g.config)) throw ConfigError("plan model shape does not match the graph");
  impl_->graph = g;
  impl_->engine = std::make_unique<Engine>(impl_->graph, plan.kinds(), plan.weight_bits, plan.act_bits);
  impl_->engine->load_sites(plan.qparams);
  // Host-side warm-up prepares every kernel; forward passes only read them.
  impl_->engine->run(Tensor::zeros({1, g.config.tokens, g.config.dim}, DType::kReal32), nullptr);
  impl_->engine->freeze();
}

IntegerModel::~IntegerModel() = default;
IntegerModel::IntegerModel(IntegerModel&&) noexcept = default;

IntegerResult IntegerModel::forward(const Tensor& x) const {
  IntegerResult r;
  r.logits = impl_->engine->run(x, &r.ops);
  return r;
}

IntegerResult integer_forward(const ModelGraph& g, const AssignmentPlan& plan, const Tensor& x) {
  return IntegerModel(g, plan).forward(x);
}

}  // namespace intvit
