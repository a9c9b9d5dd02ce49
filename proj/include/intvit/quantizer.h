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

#ifndef INTVIT_QUANTIZER_H_
#define INTVIT_QUANTIZER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "intvit/tensor.h"

namespace intvit {

enum class Scheme { kSymmetric, kAsymmetric };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

// Uniform affine quantization parameters. Codes always live in [0, 2^bits-1];
// the symmetric scheme uses the midpoint code 2^(bits-1) as its zero point.
// A per-channel QParams carries one (scale, zero_point) per slice of
// `channel_axis`; a per-tensor one carries exactly one pair.
struct QParams {
  std::vector<double> scale;
  std::vector<std::int32_t> zero_point;
  int bits = 8;
  Scheme scheme = Scheme::kAsymmetric;
  std::optional<std::size_t> channel_axis;

  static QParams per_tensor(double scale, std::int32_t zero_point, int bits, Scheme scheme);

  bool per_channel() const { return channel_axis.has_value(); }
  std::int32_t qmax() const { return static_cast<std::int32_t>((std::int64_t{1} << bits) - 1); }
  std::size_t channels() const { return scale.size(); }

  // Throws ConfigError when an invariant is broken.
  void validate() const;

  friend bool operator==(const QParams&, const QParams&) = default;
};

struct QTensor {
  Tensor codes;  // Int32, every code in [0, qmax]
  QParams params;
};

// Per-tensor parameters for the real range [beta, alpha].
//   asymmetric: s = (alpha - beta) / (2^b - 1), z = clip(round(-beta / s), 0, 2^b - 1)
//   symmetric:  s = 2 * max(|alpha|, |beta|) / (2^b - 1), z = 2^(b - 1)
// Throws DegenerateRangeError for an empty range.
QParams qparams_from_range(double alpha, double beta, int bits, Scheme scheme);

// One (alpha, beta) pair per channel along `axis`.
QParams qparams_from_range(const std::vector<double>& alpha, const std::vector<double>& beta,
                           int bits, Scheme scheme, std::size_t axis);

// Pipeline calibration variant: a constant range (alpha == beta) is widened
// by a small epsilon-scaled margin instead of failing. Sets *widened when that
// happened.
QParams qparams_from_range_widened(double alpha, double beta, int bits, Scheme scheme,
                                   bool* widened);

// codes = clip(round_half_even(x / s) + z, 0, 2^b - 1).
QTensor quantize(const Tensor& x, const QParams& p);
// x = s * (q - z).
Tensor dequantize(const QTensor& q);

// Scalar helpers for the per-tensor case.
std::int32_t quantize_value(double x, double scale, std::int32_t zero_point, std::int32_t qmax);
double dequantize_value(std::int32_t code, double scale, std::int32_t zero_point);

// Running min/max envelope over every tensor observed so far. Per-channel
// when constructed with an axis.
class MinMaxObserver {
 public:
  MinMaxObserver() = default;
  explicit MinMaxObserver(std::size_t channel_axis) : axis_(channel_axis) {}

  // Empty tensors are ignored.
  void observe(const Tensor& x);
  // Associative, commutative combination with another observer.
  void merge(const MinMaxObserver& other);

  std::size_t samples_seen() const { return samples_seen_; }
  const std::vector<double>& running_min() const { return min_; }
  const std::vector<double>& running_max() const { return max_; }
  double min() const;
  double max() const;
  const std::optional<std::size_t>& channel_axis() const { return axis_; }

  // Asymmetric per-tensor parameters from the envelope (widened if constant).
  QParams asymmetric_params(int bits, bool* widened = nullptr) const;

 private:
  std::optional<std::size_t> axis_;
  std::vector<double> min_;
  std::vector<double> max_;
  std::size_t samples_seen_ = 0;
};

// Functional form: returns the updated observer.
MinMaxObserver observe(MinMaxObserver o, const Tensor& x);

// Symmetric per-channel weight quantization with alpha = max|w| per slice of
// `axis` (the output channel).
QTensor quantize_weights_per_channel(const Tensor& w, std::size_t axis, int bits);

}  // namespace intvit

#endif  // INTVIT_QUANTIZER_H_
