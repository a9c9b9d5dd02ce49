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

#include "intvit/softmax_approx.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "intvit/errors.h"
#include "intvit/fixed_point.h"

namespace intvit::softmax {
namespace {

int ceil_log2(std::size_t n) { return n <= 1 ? 0 : std::bit_width(n - 1); }

double per_tensor_scale(const QParams& p) {
  if (p.per_channel()) throw ConfigError("softmax inputs must be quantized per tensor");
  return p.scale[0];
}

// Row maximum minus every code, then the shift onto the working scale.
void subtract_row_max(std::span<const std::int32_t> in, int rescale, std::vector<Int>& out) {
  out.resize(in.size());
  Int m = in[0];
  for (std::size_t j = 1; j < in.size(); ++j) m = max(m, Int(in[j]));
  for (std::size_t j = 0; j < in.size(); ++j) {
    Int d = Int(in[j]) - m;
    if (rescale > 0) d = d << rescale;
    if (rescale < 0) d = d >> -rescale;
    out[j] = d;
  }
}

// (floor(2^M / sum) * e_i) >> (M - out_shift) for every element of the row.
void normalize_row(std::vector<Int>& e, int M, int out_bits, std::size_t row) {
  Int sum = e[0];
  for (std::size_t j = 1; j < e.size(); ++j) sum = sum + e[j];
  if (sum.value() <= 0) throw NormalizationError("exponent row sums to zero", row);
  const Int inv = Int(std::int64_t{1} << M) / sum;
  for (auto& v : e) v = (inv * v) >> (M - out_bits);
}

}  // namespace

int BitExpConfig::min_headroom(std::size_t row_length) const {
  return frac_bits + bits + ceil_log2(row_length) + 2;
}

void BitExpConfig::validate(std::size_t row_length) const {
  if (bits < 2 || bits > 16) throw ConfigError("softmax bit-width must lie in [2, 16]");
  if (taylor_degree != 1 && taylor_degree != 2) {
    throw ConfigError("taylor_degree must be 1 or 2");
  }
  if (frac_bits < 1 || frac_bits > 24) throw ConfigError("frac_bits must lie in [1, 24]");
  if (M > 62) throw ConfigError("M must not exceed 62");
  if (M < min_headroom(row_length)) {
    throw ConfigError("M = " + std::to_string(M) + " is below the required headroom " +
                      std::to_string(min_headroom(row_length)) + " for rows of " +
                      std::to_string(row_length));
  }
}

BitExpConfig shiftmax_config(BitExpConfig base) {
  base.taylor_degree = 1;
  base.frac_range = FracRange::kNonPositive;
  return base;
}

Int log2e_shift(Int q_delta) { return q_delta + (q_delta >> 1) - (q_delta >> 4); }

Int phi(Int x) { return (x >> 1) + (x >> 3) + (x >> 4); }

ExpConstants exp_constants(double s, bool strict_dyadic) {
  ExpConstants k;
  if (is_pow2_reciprocal(s) && s <= 1.0) {
    k.frac_shift = pow2_reciprocal_exponent(s);
    k.one = std::int64_t{1} << k.frac_shift;
  } else {
    if (strict_dyadic) {
      throw ConfigError("exponent scale " + std::to_string(s) +
                        " is not a power-of-two reciprocal");
    }
    if (!(s > 0.0) || s > 1.0) throw ConfigError("exponent scale must lie in (0, 1]");
    k.one = static_cast<std::int64_t>(std::floor(1.0 / s));
    k.frac_shift = -1;
  }
  const Dyadic ln2 = to_dyadic(std::numbers::ln2);
  k.ln2_mantissa = ln2.mantissa;
  k.ln2_shift = ln2.shift;
  return k;
}

namespace {

struct Split {
  Int q;
  Int f;
};

Split split(Int qp, const ExpConstants& k, FracRange range) {
  Int neg = -qp;
  if (range == FracRange::kNonNegative) neg = neg + Int(k.one - 1);
  const Int q = k.frac_shift >= 0 ? neg >> k.frac_shift : neg / Int(k.one);
  const Int whole = k.frac_shift >= 0 ? q << k.frac_shift : q * Int(k.one);
  return {q, qp + whole};
}

// ln2 * f at the fraction's own scale.
Int ln2_times(Int f, const ExpConstants& k, Ln2Mode mode) {
  if (mode == Ln2Mode::kShift1011) return phi(f);
  return rounding_shift_right(f * Int(k.ln2_mantissa), k.ln2_shift);
}

}  // namespace

ExpDecomposition decompose(Int qp, double s, FracRange range, bool strict_dyadic) {
  if (qp.value() > 0) throw ConfigError("decompose expects non-positive exponent codes");
  const ExpConstants k = exp_constants(s, strict_dyadic);
  const Split parts = split(qp, k, range);
  return {parts.q.value(), parts.f.value()};
}

Int bit_exp_from_log2(Int qp, const ExpConstants& k, const BitExpConfig& cfg) {
  const Split parts = split(qp, k, cfg.frac_range);
  Int t = ln2_times(parts.f, k, cfg.ln2_mode);
  if (cfg.taylor_degree == 2) {
    // t + t^2 / 2 at scale 1/one.
    const Int sq = t * t;
    t = t + (k.frac_shift >= 0 ? rounding_shift_right(sq, k.frac_shift + 1)
                               : sq / Int(2 * k.one));
  }
  return (t + Int(k.one)) >> parts.q;
}

Int shift_exp_from_log2(Int qp, const ExpConstants& k) {
  const Split parts = split(qp, k, FracRange::kNonPositive);
  return ((parts.f >> 1) + Int(k.one)) >> parts.q;
}

IexpConstants iexp_constants(int frac_bits) {
  IexpConstants k;
  k.frac_bits = frac_bits;
  k.ln2_code = std::llround(std::ldexp(std::numbers::ln2, frac_bits));
  k.b_code = std::llround(std::ldexp(1.353, frac_bits));
  k.c_code = std::llround(std::ldexp(0.344, frac_bits));
  const Dyadic a = to_dyadic(0.3585);
  k.a_mantissa = a.mantissa;
  k.a_shift = a.shift;
  return k;
}

Int iexp_code(Int x, const IexpConstants& k) {
  const Int z = (-x) / Int(k.ln2_code);
  const Int p = x + z * Int(k.ln2_code);
  const Int t = p + Int(k.b_code);
  const Int poly =
      rounding_shift_right(t * t * Int(k.a_mantissa), k.a_shift + k.frac_bits) + Int(k.c_code);
  return poly >> z;
}

QParams softmax_output_params(int bits) {
  return QParams::per_tensor(std::ldexp(1.0, -(bits - 1)), 0, bits, Scheme::kAsymmetric);
}

Kernel prepare(Variant variant, const QParams& in, const BitExpConfig& cfg) {
  Kernel kernel;
  kernel.variant = variant;
  kernel.cfg = cfg;
  const double s = per_tensor_scale(in);
  if (is_pow2_reciprocal(s)) {
    kernel.rescale = cfg.frac_bits - pow2_reciprocal_exponent(s);
    kernel.exp = exp_constants(std::ldexp(1.0, -cfg.frac_bits), true);
  } else {
    // The iexp variants need a dyadic working scale for their constants.
    if (cfg.strict_dyadic || variant == Variant::kIexp || variant == Variant::kLog2) {
      throw ConfigError("softmax input scale " + std::to_string(s) +
                        " is not a power-of-two reciprocal");
    }
    kernel.rescale = 0;
    kernel.exp = exp_constants(s, false);
    if (kernel.exp.one > (std::int64_t{1} << cfg.frac_bits)) {
      throw ConfigError("input scale finer than 2^-frac_bits needs a dyadic scale");
    }
  }
  kernel.iexp = iexp_constants(cfg.frac_bits);
  return kernel;
}

Tensor run(const Kernel& kernel, const Tensor& codes, bool log2_codes) {
  const BitExpConfig& cfg = kernel.cfg;
  const std::size_t n = codes.row_length();
  cfg.validate(n);
  const auto in = codes.ints();
  std::vector<std::int32_t> out(in.size());
  std::vector<Int> row;
  const int log2_bits = kernel.log2_prob_bits;
  const int log2_m = cfg.frac_bits + log2_bits + ceil_log2(n) + 2;
  const Int log2_max_code = Int((std::int64_t{1} << cfg.bits) - 1);
  for (std::size_t r = 0; r < codes.rows(); ++r) {
    subtract_row_max(in.subspan(r * n, n), kernel.rescale, row);
    switch (kernel.variant) {
      case Variant::kEfficientBit:
        for (auto& v : row) v = bit_exp_from_log2(log2e_shift(v), kernel.exp, cfg);
        break;
      case Variant::kShift:
        for (auto& v : row) v = shift_exp_from_log2(log2e_shift(v), kernel.exp);
        break;
      case Variant::kIexp:
      case Variant::kLog2:
        for (auto& v : row) v = iexp_code(v, kernel.iexp);
        break;
    }
    if (kernel.variant != Variant::kLog2) {
      normalize_row(row, cfg.M, cfg.bits - 1, r);
    } else {
      normalize_row(row, log2_m, log2_bits, r);
      for (auto& p : row) {
        // k = round(-log2(P / 2^B)) = B - m - [P^2 >= 2^(2m+1)], m = floor(log2 P).
        Int k = log2_max_code;
        if (p > Int(0)) {
          const Int m = bit_length_minus_one(p);
          const Int half_up = (p * p) >> (m + m + Int(1));
          k = Int(log2_bits) - m - min(half_up, Int(1));
          k = clamp(k, Int(0), log2_max_code);
        }
        p = log2_codes ? k : Int(std::int64_t{1} << (cfg.bits - 1)) >> k;
      }
    }
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = static_cast<std::int32_t>(row[j].value());
  }
  return Tensor::integer(codes.dims(), std::move(out));
}

QTensor max_subtract(const QTensor& q) {
  const std::size_t n = q.codes.row_length();
  const auto in = q.codes.ints();
  std::vector<std::int32_t> out(in.size());
  std::vector<Int> row;
  for (std::size_t r = 0; r < q.codes.rows(); ++r) {
    subtract_row_max(in.subspan(r * n, n), 0, row);
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = static_cast<std::int32_t>(row[j].value());
  }
  return {Tensor::integer(q.codes.dims(), std::move(out)), q.params};
}

QTensor log2e_shift(const QTensor& q_delta) {
  const auto in = q_delta.codes.ints();
  std::vector<std::int32_t> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = static_cast<std::int32_t>(log2e_shift(Int(in[i])).value());
  }
  return {Tensor::integer(q_delta.codes.dims(), std::move(out)), q_delta.params};
}

QTensor efficient_bit_exp(const QTensor& q_delta, double s, const BitExpConfig& cfg) {
  const ExpConstants k = exp_constants(s, cfg.strict_dyadic);
  const auto in = q_delta.codes.ints();
  std::vector<std::int32_t> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] > 0) throw ConfigError("efficient_bit_exp expects max-subtracted codes");
    out[i] = static_cast<std::int32_t>(bit_exp_from_log2(log2e_shift(Int(in[i])), k, cfg).value());
  }
  QParams p;
  p.scale = {s};
  p.zero_point = {0};
  p.bits = std::clamp(static_cast<int>(std::bit_width(static_cast<std::uint64_t>(k.one))), 2, 16);
  p.scheme = Scheme::kAsymmetric;
  return {Tensor::integer(q_delta.codes.dims(), std::move(out)), p};
}

QTensor int_div_normalize(const QTensor& q_exp, const BitExpConfig& cfg) {
  const std::size_t n = q_exp.codes.row_length();
  if (cfg.M > 62 || cfg.M < cfg.bits) throw ConfigError("M out of range");
  const auto in = q_exp.codes.ints();
  std::vector<std::int32_t> out(in.size());
  std::vector<Int> row(n);
  for (std::size_t r = 0; r < q_exp.codes.rows(); ++r) {
    for (std::size_t j = 0; j < n; ++j) row[j] = Int(in[r * n + j]);
    normalize_row(row, cfg.M, cfg.bits - 1, r);
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = static_cast<std::int32_t>(row[j].value());
  }
  return {Tensor::integer(q_exp.codes.dims(), std::move(out)), softmax_output_params(cfg.bits)};
}

namespace {

QTensor run_variant(Variant v, const QTensor& q, const BitExpConfig& cfg, bool log2_codes) {
  const Kernel kernel = prepare(v, q.params, cfg);
  Tensor codes = run(kernel, q.codes, log2_codes);
  QParams p = softmax_output_params(cfg.bits);
  return {std::move(codes), p};
}

}  // namespace

QTensor efficient_bit_softmax(const QTensor& q, const BitExpConfig& cfg) {
  return run_variant(Variant::kEfficientBit, q, cfg, false);
}

QTensor shiftmax(const QTensor& q, const BitExpConfig& cfg) {
  return run_variant(Variant::kShift, q, cfg, false);
}

QTensor iexp_softmax(const QTensor& q, const BitExpConfig& cfg) {
  return run_variant(Variant::kIexp, q, cfg, false);
}

QTensor log2_softmax_codes(const QTensor& q, const BitExpConfig& cfg) {
  return run_variant(Variant::kLog2, q, cfg, true);
}

QTensor log2_softmax(const QTensor& q, const BitExpConfig& cfg) {
  return run_variant(Variant::kLog2, q, cfg, false);
}

Tensor softmax_reference(const Tensor& x) {
  const std::size_t n = x.row_length();
  const auto in = x.reals();
  std::vector<float> out(in.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = in.subspan(r * n, n);
    const double m = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    std::vector<double> e(n);
    for (std::size_t j = 0; j < n; ++j) sum += e[j] = std::exp(row[j] - m);
    for (std::size_t j = 0; j < n; ++j) out[r * n + j] = static_cast<float>(e[j] / sum);
  }
  return Tensor::real(x.dims(), std::move(out));
}

double base2_approx(Base2Approx mode, double x) {
  switch (mode) {
    case Base2Approx::kIvitLinear:
      return 1.0 + x / 2.0;
    case Base2Approx::kOursExactLn2:
      return 1.0 + std::numbers::ln2 * x;
    case Base2Approx::kOursShift:
      return 1.0 + 0.6875 * x;
  }
  return 0.0;
}

ErrorNorms base2_frac_approx_error(Base2Approx mode) {
  return approx_error([](double x) { return std::exp2(x); },
                      [mode](double x) { return base2_approx(mode, x); }, -1.0, 1.0);
}

}  // namespace intvit::softmax
