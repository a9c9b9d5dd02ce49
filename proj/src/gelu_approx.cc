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

#include "intvit/gelu_approx.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "intvit/softmax_approx.h"

namespace intvit::gelu {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr std::size_t kEvaluationBudget = 400000;

double powi(double base, int degree) {
  double r = 1.0;
  for (int i = 0; i < degree; ++i) r *= base;
  return r;
}

using Objective = std::function<double(double a, double b)>;

struct Point {
  double c0;  // a * b^degree, i.e. L(0+) - 1
  double b;
};

// Grid seeding followed by coordinate descent in (c0, b), where the
// objective's valley is close to axis-aligned; a = c0 / b^degree.
FitResult minimize(const Objective& raw, int degree, double b_max) {
  std::size_t evaluations = 0;
  auto f = [&](const Point& p) {
    ++evaluations;
    if (!(p.b < 0.0)) return std::numeric_limits<double>::infinity();
    return raw(p.c0 / powi(p.b, degree), p.b);
  };

  Point best{-1.0, -1.0};
  double best_f = std::numeric_limits<double>::infinity();
  constexpr int kBSteps = 60;
  constexpr int kCSteps = 41;
  for (int i = 0; i < kBSteps; ++i) {
    const double b = -0.05 - (b_max - 0.05) * i / (kBSteps - 1);
    for (int j = 0; j < kCSteps; ++j) {
      const Point p{-2.0 * j / (kCSteps - 1), b};
      const double v = f(p);
      if (v < best_f) {
        best_f = v;
        best = p;
      }
    }
  }

  std::array<double, 2> step{0.05, (b_max - 0.05) / (kBSteps - 1)};
  bool converged = false;
  while (evaluations < kEvaluationBudget) {
    const double sweep_start = best_f;
    bool moved = false;
    for (int coord = 0; coord < 2; ++coord) {
      for (double dir : {1.0, -1.0}) {
        Point trial = best;
        (coord == 0 ? trial.c0 : trial.b) += dir * step[coord];
        const double v = f(trial);
        if (v < best_f) {
          // Keep walking while the direction pays off.
          Point further = trial;
          double fv = v;
          for (;;) {
            Point next = further;
            (coord == 0 ? next.c0 : next.b) += dir * step[coord];
            const double nv = f(next);
            if (!(nv < fv)) break;
            further = next;
            fv = nv;
          }
          best = further;
          best_f = fv;
          moved = true;
          break;
        }
      }
    }
    const double rel = (sweep_start - best_f) / std::max(sweep_start, 1e-300);
    const bool tiny_steps = step[0] < 1e-12 && step[1] < 1e-12;
    if (!moved) {
      step[0] *= 0.5;
      step[1] *= 0.5;
      if (tiny_steps) {
        converged = true;
        break;
      }
    } else if (rel < 1e-10 && step[0] < 1e-9 && step[1] < 1e-9) {
      converged = true;
      break;
    }
  }

  FitResult result;
  result.coeffs = {best.c0 / powi(best.b, degree), best.b, degree};
  result.objective = best_f;
  result.evaluations = evaluations;
  if (!converged) throw FitNonConvergence("coefficient fit exhausted its evaluation budget", result);
  return result;
}

void fill_errors(FitResult& r, double lo, double hi, std::size_t samples) {
  const ErfPolyCoeffs c = r.coeffs;
  const ErrorNorms e = approx_error([](double x) { return std::erf(x); },
                                    [c](double x) { return erf_poly_eval(x, c); }, lo, hi);
  r.l2_err = e.l2;
  r.linf_err = e.linf;
  r.lo = lo;
  r.hi = hi;
  r.samples = samples;
}

void check_fit_args(double lo, double hi, int degree, std::size_t samples) {
  if (!(lo < hi)) throw ConfigError("fit range requires lo < hi");
  if (degree < 2 || degree > 4) throw ConfigError("degree must be 2, 3 or 4");
  if (samples < 100) throw ConfigError("fit needs at least 100 samples");
}

}  // namespace

void ErfPolyCoeffs::validate() const {
  if (!(b < 0.0)) throw ConfigError("erf polynomial requires b < 0");
  if (degree < 2 || degree > 4) throw ConfigError("erf polynomial degree must be 2, 3 or 4");
  if (!std::isfinite(a)) throw ConfigError("erf polynomial coefficient a must be finite");
}

double exact_gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double erf_poly_eval(double x, const ErfPolyCoeffs& c) {
  if (x == 0.0) return 0.0;
  const double u = std::min(std::abs(x), -c.b) + c.b;
  const double mag = c.a * powi(u, c.degree) + 1.0;
  return x > 0.0 ? mag : -mag;
}

double erf_fit_objective(const ErfPolyCoeffs& c, double lo, double hi, std::size_t samples) {
  double sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = grid_point(lo, hi, samples, i);
    const double r = std::erf(x) - erf_poly_eval(x, c);
    sum += r * r;
  }
  return sum;
}

FitResult fit_erf_poly(double lo, double hi, int degree, std::size_t samples) {
  check_fit_args(lo, hi, degree, samples);
  std::vector<double> xs(samples);
  std::vector<double> ref(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    xs[i] = grid_point(lo, hi, samples, i);
    ref[i] = std::erf(xs[i]);
  }
  auto objective = [&](double a, double b) {
    const ErfPolyCoeffs c{a, b, degree};
    double sum = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double r = ref[i] - erf_poly_eval(xs[i], c);
      sum += r * r;
    }
    return sum;
  };
  const double b_max = 2.0 * std::max(std::abs(lo), std::abs(hi));
  FitResult r = minimize(objective, degree, b_max);
  fill_errors(r, lo, hi, samples);
  return r;
}

FitResult fit_gelu_poly(double lo, double hi, int degree, std::size_t samples) {
  check_fit_args(lo, hi, degree, samples);
  std::vector<double> xs(samples);
  std::vector<double> ref(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    xs[i] = grid_point(lo, hi, samples, i);
    ref[i] = exact_gelu(xs[i]);
  }
  auto objective = [&](double a, double b) {
    const ErfPolyCoeffs c{a, b, degree};
    double sum = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double r = ref[i] - poly_gelu(xs[i], c);
      sum += r * r;
    }
    return sum;
  };
  const double b_max = 2.0 * std::max(std::abs(lo), std::abs(hi)) * kInvSqrt2;
  FitResult r = minimize(objective, degree, b_max);
  fill_errors(r, lo, hi, samples);
  return r;
}

const ErfPolyCoeffs& ibert_coeffs() {
  static const ErfPolyCoeffs coeffs = fit_gelu_poly(-3.0, 3.0, 2).coeffs;
  return coeffs;
}

double poly_gelu(double x, const ErfPolyCoeffs& c) {
  return 0.5 * x * (1.0 + erf_poly_eval(x * kInvSqrt2, c));
}

Tensor data_aware_poly_gelu(const Tensor& x, const ErfPolyCoeffs& c) {
  c.validate();
  const auto in = x.reals();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<float>(poly_gelu(in[i], c));
  return Tensor::real(x.dims(), std::move(out));
}

Tensor ibert_gelu(const Tensor& x) { return data_aware_poly_gelu(x, ibert_coeffs()); }

double sigmoid_gelu(double x) { return x / (1.0 + std::exp(-1.702 * x)); }

// ---------------------------------------------------------------------------

Kernel prepare_poly(const QParams& in, const QParams& out, const ErfPolyCoeffs& c) {
  c.validate();
  if (in.per_channel() || out.per_channel()) {
    throw ConfigError("GELU kernels take per-tensor parameters");
  }
  Kernel k;
  k.variant = Variant::kPoly;
  k.degree = c.degree;
  k.in_zero = in.zero_point[0];
  k.out_zero = out.zero_point[0];
  k.out_qmax = out.qmax();
  k.to_u = to_dyadic(in.scale[0] * kInvSqrt2 * std::ldexp(1.0, kPolyFracBits));
  k.threshold = std::llround(-c.b * std::ldexp(1.0, kPolyFracBits));
  k.coeff_a = to_dyadic(c.a);
  k.out_mult = to_dyadic(in.scale[0] / (out.scale[0] * std::ldexp(1.0, kPolyFracBits + 1)));
  return k;
}

Kernel prepare_shift(const QParams& in, const QParams& out) {
  if (in.per_channel() || out.per_channel()) {
    throw ConfigError("GELU kernels take per-tensor parameters");
  }
  Kernel k;
  k.variant = Variant::kShift;
  k.in_zero = in.zero_point[0];
  k.out_zero = out.zero_point[0];
  k.out_qmax = out.qmax();
  k.to_exp = to_dyadic(in.scale[0] * std::ldexp(1.0, kShiftFracBits));
  k.out_mult = to_dyadic(in.scale[0] / (out.scale[0] * std::ldexp(1.0, kShiftFracBits)));
  return k;
}

namespace {

Int run_poly(const Kernel& k, Int code) {
  const Int one = Int(std::int64_t{1} << kPolyFracBits);
  const Int x = code - Int(k.in_zero);
  const Int t = min(apply(abs(x), k.to_u), Int(k.threshold));
  const Int u = t - Int(k.threshold);
  Int p = u;
  if (k.degree >= 2) {
    const Int u2 = rounding_shift_right(u * u, kPolyFracBits);
    if (k.degree == 2) p = u2;
    if (k.degree == 3) p = rounding_shift_right(u2 * u, kPolyFracBits);
    if (k.degree == 4) p = rounding_shift_right(u2 * u2, kPolyFracBits);
  }
  const Int erf_mag = apply(p, k.coeff_a) + one;
  const Int erf = sign(x) * erf_mag;
  const Int y = x * (one + erf);
  return clamp(apply(y, k.out_mult) + Int(k.out_zero), Int(0), Int(k.out_qmax));
}

Int run_shift(const Kernel& k, const softmax::ExpConstants& exp, Int code) {
  const Int x = code - Int(k.in_zero);
  const Int xf = apply(x, k.to_exp);
  // 1.702 x ~ x + x>>1 + x>>3 + x>>4.
  const Int y = xf + (xf >> 1) + (xf >> 3) + (xf >> 4);
  const Int m = max(y, Int(0));
  const Int e1 = softmax::shift_exp_from_log2(softmax::log2e_shift(y - m), exp);
  const Int e0 = softmax::shift_exp_from_log2(softmax::log2e_shift(-m), exp);
  const Int sig = (e1 << kShiftFracBits) / (e1 + e0);
  return clamp(apply(x * sig, k.out_mult) + Int(k.out_zero), Int(0), Int(k.out_qmax));
}

}  // namespace

Tensor run(const Kernel& kernel, const Tensor& codes) {
  const auto in = codes.ints();
  std::vector<std::int32_t> out(in.size());
  if (kernel.variant == Variant::kPoly) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      out[i] = static_cast<std::int32_t>(run_poly(kernel, Int(in[i])).value());
    }
  } else {
    softmax::ExpConstants exp;
    exp.one = std::int64_t{1} << kShiftFracBits;
    exp.frac_shift = kShiftFracBits;
    for (std::size_t i = 0; i < in.size(); ++i) {
      out[i] = static_cast<std::int32_t>(run_shift(kernel, exp, Int(in[i])).value());
    }
  }
  return Tensor::integer(codes.dims(), std::move(out));
}

QParams output_params_for(const QParams& in, double (*fn)(double, const ErfPolyCoeffs&),
                          const ErfPolyCoeffs& c) {
  if (in.per_channel()) throw ConfigError("GELU kernels take per-tensor parameters");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::int32_t q = 0; q <= in.qmax(); ++q) {
    const double v = fn(dequantize_value(q, in.scale[0], in.zero_point[0]), c);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return qparams_from_range_widened(hi, lo, in.bits, Scheme::kAsymmetric, nullptr);
}

QParams gelu_output_params(const QParams& in) {
  return output_params_for(
      in, [](double x, const ErfPolyCoeffs&) { return exact_gelu(x); }, kVisionQuartic);
}

QTensor data_aware_poly_gelu_int(const QTensor& q, const ErfPolyCoeffs& c) {
  return data_aware_poly_gelu_int(q, c, gelu_output_params(q.params));
}

QTensor data_aware_poly_gelu_int(const QTensor& q, const ErfPolyCoeffs& c, const QParams& out) {
  return {run(prepare_poly(q.params, out, c), q.codes), out};
}

QTensor ibert_gelu_int(const QTensor& q, const QParams& out) {
  return {run(prepare_poly(q.params, out, ibert_coeffs()), q.codes), out};
}

QTensor shift_gelu_int(const QTensor& q, const QParams& out) {
  return {run(prepare_shift(q.params, out), q.codes), out};
}

}  // namespace intvit::gelu
