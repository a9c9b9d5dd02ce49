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

#include "intvit/layernorm_approx.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "intvit/errors.h"

namespace intvit::layernorm {
namespace {

constexpr int kQ = 15;  // precision of the quadratic seeds

// Scales d so that d * 4^g lies in [2^60, 2^62); returns g.
int normalize_even(Int d, Int& scaled) {
  const std::int64_t e = bit_length_minus_one(d).value();
  if (e > 61) throw OverflowError("LayerNorm variance exceeds 62 bits");
  const int g = static_cast<int>((61 - e) / 2);
  scaled = d << (2 * g);
  return g;
}

Int poly(const Dyadic (&c)[3], Int x) {
  const Int x2 = rounding_shift_right(x * x, kQ);
  return apply(Int(std::int64_t{1} << kQ), c[0]) + apply(x, c[1]) + apply(x2, c[2]);
}

// num * 2^P / sqrt(d) for one row, via an integer square root.
struct RowScale {
  Int factor;
  int shift;
};

RowScale sqrt_scale(const Kernel& k, Int d) {
  Int n_scaled;
  const int g = normalize_even(d, n_scaled);
  Int sd;
  if (k.cfg.variant == Variant::kBitshiftNewton) {
    sd = int_sqrt(n_scaled, k.cfg.iterations);
  } else {
    // Quadratic seed for sqrt(m), m = n_scaled / 2^60 in [1, 4), then one
    // Newton step.
    const Int m = n_scaled >> (60 - kQ);
    const Int seed = poly(k.sqrt_c, m) << (30 - kQ);
    sd = (seed + n_scaled / seed) >> 1;
  }
  // sd ~ sqrt(d) * 2^g in [2^30, 2^31].
  return {(Int(1) << 62) / sd, 62 - kNormFracBits - g};
}

RowScale log2_scale(const Kernel& k, Int d) {
  const Int e = bit_length_minus_one(d);
  // Mantissa in Q30, [1, 2).
  Int y = e > Int(30) ? rounding_shift_right(d, static_cast<int>(e.value() - 30))
                      : d << (Int(30) - e);
  Int frac = Int(0);
  const Int two = Int(std::int64_t{1} << 31);
  for (int i = 0; i < kLog2FracBits; ++i) {
    y = rounding_shift_right(y * y, 30);
    frac = frac << 1;
    if (y >= two) {
      y = y >> 1;
      frac = frac + Int(1);
    }
  }
  // L = log2(d) in Q.kLog2FracBits; 1/sqrt(d) = 2^-(L/2) = 2^-ip * 2^-fp.
  const Int half = ((e << kLog2FracBits) + frac) >> 1;
  const Int ip = half >> kLog2FracBits;
  const Int fp = half - (ip << kLog2FracBits);
  const Int g = poly(k.exp2_c, fp << (kQ - kLog2FracBits));
  return {g, static_cast<int>(ip.value()) + kQ - kNormFracBits};
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kBitshiftNewton:
      return "bitshift_newton";
    case Variant::kPolySqrt:
      return "poly_sqrt";
    case Variant::kLog2Scale:
      return "log2_scale";
  }
  return "unknown";
}

Variant variant_from_string(const std::string& s) {
  if (s == "bitshift_newton") return Variant::kBitshiftNewton;
  if (s == "poly_sqrt") return Variant::kPolySqrt;
  if (s == "log2_scale") return Variant::kLog2Scale;
  throw ConfigError("unknown LayerNorm variant '" + s + "'");
}

void LNConfig::validate() const {
  if (iterations < 1 || iterations > kMaxIterations) {
    throw ConfigError("LayerNorm iterations must lie in [1, 16]");
  }
  if (eps_code < 1) throw ConfigError("eps_code must be at least 1");
}

Int int_sqrt(Int n, int iterations) {
  if (n < Int(0)) throw ConfigError("int_sqrt of a negative value");
  if (n == Int(0)) return Int(0);
  const Int bits = bit_length_minus_one(n) + Int(1);
  Int x = Int(1) << ((bits + Int(1)) >> 1);
  for (int i = 0; i < iterations; ++i) {
    const Int next = (x + n / x) >> 1;
    if (next >= x) break;
    x = next;
  }
  return x;
}

Tensor layer_norm_reference(const Tensor& x, const std::vector<float>& gamma,
                            const std::vector<float>& beta, double eps) {
  const std::size_t n = x.row_length();
  if (gamma.size() != n || beta.size() != n) throw ShapeError("affine parameters must match the row length");
  const auto in = x.reals();
  std::vector<float> out(in.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const float* row = in.data() + r * n;
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += row[j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mean) * (row[j] - mean);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      out[r * n + j] = static_cast<float>((row[j] - mean) * inv * gamma[j] + beta[j]);
    }
  }
  return Tensor::real(x.dims(), std::move(out));
}

QTensor quantize_affine(const std::vector<float>& v, int bits) {
  if (v.empty()) throw ShapeError("empty affine parameter");
  double m = 0.0;
  for (float x : v) m = std::max(m, std::abs(static_cast<double>(x)));
  if (m == 0.0) m = 1.0;
  const QParams p = qparams_from_range(m, -m, bits, Scheme::kSymmetric);
  return quantize(Tensor::real({v.size()}, v), p);
}

Kernel prepare(const QParams& in, const QTensor& gamma, const QTensor& beta_sh,
               const QParams& out, const LNConfig& cfg) {
  cfg.validate();
  if (in.per_channel() || out.per_channel() || gamma.params.per_channel() ||
      beta_sh.params.per_channel()) {
    throw ConfigError("LayerNorm kernels take per-tensor parameters");
  }
  if (gamma.codes.size() != beta_sh.codes.size()) {
    throw ShapeError("gamma and beta lengths differ");
  }
  Kernel k;
  k.cfg = cfg;
  const double s_g = gamma.params.scale[0];
  const double acc_scale = s_g / std::ldexp(1.0, kNormFracBits);
  const auto g = gamma.codes.ints();
  const auto b = beta_sh.codes.ints();
  const std::int64_t gz = gamma.params.zero_point[0];
  const std::int64_t bz = beta_sh.params.zero_point[0];
  const Dyadic beta_to_acc = to_dyadic(beta_sh.params.scale[0] / acc_scale);
  for (std::size_t j = 0; j < g.size(); ++j) {
    k.gamma.push_back(g[j] - gz);
    k.beta_acc.push_back(apply(Int(b[j] - bz), beta_to_acc).value());
  }
  k.out_mult = to_dyadic(acc_scale / out.scale[0]);
  k.out_zero = out.zero_point[0];
  k.out_qmax = out.qmax();
  // sqrt(m) on [1, 4) through (1, 1), (9/4, 3/2), (4, 2).
  k.sqrt_c[0] = to_dyadic(18.0 / 35.0);
  k.sqrt_c[1] = to_dyadic(11.0 / 21.0);
  k.sqrt_c[2] = to_dyadic(-4.0 / 105.0);
  // 2^-f on [0, 1) through f = 0, 1/2, 1.
  const double r = std::sqrt(0.5);
  k.exp2_c[0] = to_dyadic(1.0);
  k.exp2_c[1] = to_dyadic(-3.0 + 4.0 * r - 0.5);
  k.exp2_c[2] = to_dyadic(2.0 * (0.5 - 2.0 * r + 1.0));
  (void)in;
  return k;
}

Tensor run(const Kernel& k, const Tensor& codes) {
  const std::size_t n = codes.row_length();
  if (n != k.gamma.size()) throw ShapeError("row length does not match the affine parameters");
  const auto in = codes.ints();
  std::vector<std::int32_t> out(in.size());
  const Int count = Int(static_cast<std::int64_t>(n));
  for (std::size_t r = 0; r < codes.rows(); ++r) {
    const std::int32_t* row = in.data() + r * n;
    Int s = Int(0);
    Int ss = Int(0);
    for (std::size_t j = 0; j < n; ++j) {
      const Int q = Int(row[j]);
      s += q;
      ss += q * q;
    }
    // n^2 * Var = n * sum(q^2) - sum(q)^2, exact in integers.
    const Int d = count * ss - s * s + Int(k.cfg.eps_code);
    const RowScale rs = k.cfg.variant == Variant::kLog2Scale ? log2_scale(k, d) : sqrt_scale(k, d);
    for (std::size_t j = 0; j < n; ++j) {
      const Int num = count * Int(row[j]) - s;
      const Int norm = rounding_shift_right(num * rs.factor, rs.shift);
      const Int acc = norm * Int(k.gamma[j]) + Int(k.beta_acc[j]);
      const Int o = apply(acc, k.out_mult) + Int(k.out_zero);
      out[r * n + j] = static_cast<std::int32_t>(clamp(o, Int(0), Int(k.out_qmax)).value());
    }
  }
  return Tensor::integer(codes.dims(), std::move(out));
}

QTensor int_layernorm(const QTensor& q, const QTensor& gamma, const QTensor& beta_sh,
                      const QParams& out, const LNConfig& cfg) {
  return {run(prepare(q.params, gamma, beta_sh, out, cfg), q.codes), out};
}

QTensor int_layernorm(const QTensor& q, const QTensor& gamma, const QTensor& beta_sh,
                      const LNConfig& cfg) {
  const Tensor x = dequantize(q);
  const Tensor g = dequantize(gamma);
  const Tensor b = dequantize(beta_sh);
  const auto gv = g.reals();
  const auto bv = b.reals();
  const Tensor ref = layer_norm_reference(x, {gv.begin(), gv.end()}, {bv.begin(), bv.end()});
  MinMaxObserver obs;
  obs.observe(ref);
  return int_layernorm(q, gamma, beta_sh, obs.asymmetric_params(q.params.bits, nullptr), cfg);
}

}  // namespace intvit::layernorm
