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

#include "intvit/quantizer.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "intvit/errors.h"

namespace intvit {
namespace {

// Index of the channel that flat element `i` belongs to along `axis`.
struct ChannelIndexer {
  std::size_t inner = 1;
  std::size_t extent = 1;

  ChannelIndexer(const Shape& dims, std::size_t axis) {
    if (axis >= dims.size()) throw ShapeError("channel axis out of range");
    extent = dims[axis];
    for (std::size_t d = axis + 1; d < dims.size(); ++d) inner *= dims[d];
  }
  std::size_t operator()(std::size_t i) const { return (i / inner) % extent; }
};

void check_bits(int bits) {
  if (bits < 2 || bits > 16) throw ConfigError("bit-width must lie in [2, 16]");
}

}  // namespace

std::string to_string(Scheme scheme) {
  return scheme == Scheme::kSymmetric ? "symmetric" : "asymmetric";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "symmetric") return Scheme::kSymmetric;
  if (name == "asymmetric") return Scheme::kAsymmetric;
  throw ConfigError("unknown quantization scheme '" + name + "'");
}

QParams QParams::per_tensor(double scale, std::int32_t zero_point, int bits, Scheme scheme) {
  QParams p;
  p.scale = {scale};
  p.zero_point = {zero_point};
  p.bits = bits;
  p.scheme = scheme;
  p.validate();
  return p;
}

void QParams::validate() const {
  check_bits(bits);
  if (scale.empty() || scale.size() != zero_point.size()) {
    throw ConfigError("scale and zero_point must be non-empty and of equal length");
  }
  if (!per_channel() && scale.size() != 1) {
    throw ConfigError("per-tensor parameters need exactly one scale");
  }
  for (std::size_t c = 0; c < scale.size(); ++c) {
    if (!(scale[c] > 0.0) || !std::isfinite(scale[c])) throw ConfigError("scale must be positive");
    if (zero_point[c] < 0 || zero_point[c] > qmax()) {
      throw ConfigError("zero_point outside [0, 2^b - 1]");
    }
    if (scheme == Scheme::kSymmetric && zero_point[c] != (1 << (bits - 1))) {
      throw ConfigError("symmetric zero_point must be the midpoint code");
    }
  }
}

QParams qparams_from_range(double alpha, double beta, int bits, Scheme scheme) {
  check_bits(bits);
  const double levels = std::ldexp(1.0, bits) - 1.0;
  QParams p;
  p.bits = bits;
  p.scheme = scheme;
  if (scheme == Scheme::kSymmetric) {
    const double bound = std::max(std::abs(alpha), std::abs(beta));
    if (!(bound > 0.0)) throw DegenerateRangeError("symmetric range has zero magnitude");
    p.scale = {2.0 * bound / levels};
    p.zero_point = {1 << (bits - 1)};
  } else {
    if (!(alpha > beta)) {
      throw DegenerateRangeError("asymmetric range requires alpha > beta (got alpha=" +
                                 std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
    }
    const double s = (alpha - beta) / levels;
    const double z = std::clamp(std::nearbyint(-beta / s), 0.0, levels);
    p.scale = {s};
    p.zero_point = {static_cast<std::int32_t>(z)};
  }
  p.validate();
  return p;
}

QParams qparams_from_range(const std::vector<double>& alpha, const std::vector<double>& beta,
                           int bits, Scheme scheme, std::size_t axis) {
  if (alpha.size() != beta.size() || alpha.empty()) {
    throw ShapeError("per-channel alpha and beta must be non-empty and of equal length");
  }
  QParams p;
  p.bits = bits;
  p.scheme = scheme;
  p.channel_axis = axis;
  for (std::size_t c = 0; c < alpha.size(); ++c) {
    const QParams one = qparams_from_range(alpha[c], beta[c], bits, scheme);
    p.scale.push_back(one.scale[0]);
    p.zero_point.push_back(one.zero_point[0]);
  }
  p.validate();
  return p;
}

QParams qparams_from_range_widened(double alpha, double beta, int bits, Scheme scheme,
                                   bool* widened) {
  if (widened) *widened = false;
  const bool degenerate = scheme == Scheme::kSymmetric
                              ? !(std::max(std::abs(alpha), std::abs(beta)) > 0.0)
                              : !(alpha > beta);
  if (degenerate) {
    const double margin = std::max(1.0, std::abs(alpha)) *
                          std::numeric_limits<float>::epsilon() * 1024.0;
    const double hi = std::max(alpha, beta);
    const double lo = std::min(alpha, beta);
    alpha = hi + margin;
    beta = lo - margin;
    if (widened) *widened = true;
  }
  return qparams_from_range(alpha, beta, bits, scheme);
}

std::int32_t quantize_value(double x, double scale, std::int32_t zero_point, std::int32_t qmax) {
  const double q = std::nearbyint(x / scale) + zero_point;
  return static_cast<std::int32_t>(std::clamp(q, 0.0, static_cast<double>(qmax)));
}

double dequantize_value(std::int32_t code, double scale, std::int32_t zero_point) {
  return scale * static_cast<double>(code - zero_point);
}

QTensor quantize(const Tensor& x, const QParams& p) {
  p.validate();
  const auto in = x.reals();
  std::vector<std::int32_t> codes(in.size());
  if (!p.per_channel()) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      codes[i] = quantize_value(in[i], p.scale[0], p.zero_point[0], p.qmax());
    }
  } else {
    const ChannelIndexer channel(x.dims(), *p.channel_axis);
    if (channel.extent != p.channels()) {
      throw ShapeError("channel extent " + std::to_string(channel.extent) +
                       " does not match " + std::to_string(p.channels()) + " scales");
    }
    for (std::size_t i = 0; i < in.size(); ++i) {
      const std::size_t c = channel(i);
      codes[i] = quantize_value(in[i], p.scale[c], p.zero_point[c], p.qmax());
    }
  }
  return {Tensor::integer(x.dims(), std::move(codes)), p};
}

Tensor dequantize(const QTensor& q) {
  const auto codes = q.codes.ints();
  const QParams& p = q.params;
  std::vector<float> out(codes.size());
  if (!p.per_channel()) {
    for (std::size_t i = 0; i < codes.size(); ++i) {
      out[i] = static_cast<float>(dequantize_value(codes[i], p.scale[0], p.zero_point[0]));
    }
  } else {
    const ChannelIndexer channel(q.codes.dims(), *p.channel_axis);
    if (channel.extent != p.channels()) throw ShapeError("channel extent mismatch");
    for (std::size_t i = 0; i < codes.size(); ++i) {
      const std::size_t c = channel(i);
      out[i] = static_cast<float>(dequantize_value(codes[i], p.scale[c], p.zero_point[c]));
    }
  }
  return Tensor::real(q.codes.dims(), std::move(out));
}

void MinMaxObserver::observe(const Tensor& x) {
  if (x.size() == 0) return;
  const auto data = x.reals();
  if (!axis_) {
    const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
    if (min_.empty()) {
      min_ = {*lo};
      max_ = {*hi};
    } else {
      min_[0] = std::min<double>(min_[0], *lo);
      max_[0] = std::max<double>(max_[0], *hi);
    }
  } else {
    const ChannelIndexer channel(x.dims(), *axis_);
    if (min_.empty()) {
      min_.assign(channel.extent, std::numeric_limits<double>::infinity());
      max_.assign(channel.extent, -std::numeric_limits<double>::infinity());
    } else if (min_.size() != channel.extent) {
      throw ShapeError("observer channel count changed between batches");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t c = channel(i);
      min_[c] = std::min<double>(min_[c], data[i]);
      max_[c] = std::max<double>(max_[c], data[i]);
    }
  }
  ++samples_seen_;
}

void MinMaxObserver::merge(const MinMaxObserver& other) {
  if (other.samples_seen_ == 0) return;
  if (samples_seen_ == 0) {
    *this = other;
    return;
  }
  if (axis_ != other.axis_ || min_.size() != other.min_.size()) {
    throw ShapeError("cannot merge observers of different granularity");
  }
  for (std::size_t c = 0; c < min_.size(); ++c) {
    min_[c] = std::min(min_[c], other.min_[c]);
    max_[c] = std::max(max_[c], other.max_[c]);
  }
  samples_seen_ += other.samples_seen_;
}

double MinMaxObserver::min() const {
  if (min_.empty()) throw ConfigError("observer has seen no data");
  return *std::min_element(min_.begin(), min_.end());
}

double MinMaxObserver::max() const {
  if (max_.empty()) throw ConfigError("observer has seen no data");
  return *std::max_element(max_.begin(), max_.end());
}

QParams MinMaxObserver::asymmetric_params(int bits, bool* widened) const {
  return qparams_from_range_widened(max(), min(), bits, Scheme::kAsymmetric, widened);
}

MinMaxObserver observe(MinMaxObserver o, const Tensor& x) {
  o.observe(x);
  return o;
}

QTensor quantize_weights_per_channel(const Tensor& w, std::size_t axis, int bits) {
  const ChannelIndexer channel(w.dims(), axis);
  std::vector<double> bound(channel.extent, 0.0);
  const auto data = w.reals();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t c = channel(i);
    bound[c] = std::max<double>(bound[c], std::abs(data[i]));
  }
  for (double& b : bound) {
    if (!(b > 0.0)) b = std::numeric_limits<float>::min();
  }
  std::vector<double> neg(bound.size());
  std::transform(bound.begin(), bound.end(), neg.begin(), [](double b) { return -b; });
  return quantize(w, qparams_from_range(bound, neg, bits, Scheme::kSymmetric, axis));
}

}  // namespace intvit
