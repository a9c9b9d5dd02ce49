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

#include "intvit/unified_metric.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "intvit/errors.h"

namespace intvit {
namespace {

void check_same(const Tensor& x, const Tensor& y) {
  if (x.dims() != y.dims()) throw ShapeError("metric inputs differ in shape");
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

double sqnr_from_powers(double signal_power, double noise_power, DbConvention db) {
  if (noise_power == 0.0) return kSqnrExact;
  const double ratio = std::log10(signal_power / noise_power);
  return db == DbConvention::kPowerRatio ? 10.0 * ratio : 20.0 * ratio;
}

double sqnr(const Tensor& x, const Tensor& x_hat, DbConvention db) {
  check_same(x, x_hat);
  const auto a = x.reals();
  const auto b = x_hat.reals();
  double signal = 0.0;
  double noise = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    signal += static_cast<double>(a[i]) * a[i];
    const double d = static_cast<double>(a[i]) - b[i];
    noise += d * d;
  }
  const double n = static_cast<double>(a.size());
  return sqnr_from_powers(signal / n, noise / n, db);
}

double perturbation(const Tensor& x, const Tensor& x_hat) {
  check_same(x, x_hat);
  const auto a = x.reals();
  const auto b = x_hat.reals();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    sum += d * d;
  }
  return sum;
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double unified_score(double q_db, double p, double c) {
  const double inv_q = (std::isinf(q_db) && q_db > 0) ? 0.0 : 1.0 / softplus(q_db);
  return 3.0 / (inv_q + softplus(p) + softplus(c));
}

OpCost op_cost(ApproxKind kind) {
  switch (kind) {
    case ApproxKind::kLog2Softmax:
      return {35, 60, true};
    case ApproxKind::kIexpSoftmax:
      return {16, 0, true};
    case ApproxKind::kShiftmax:
      return {16, 0, true};
    case ApproxKind::kEfficientBitSoftmax:
      return {16 + kPhiOps, 0, true};
    case ApproxKind::kIbertGelu:
      return {26, 0, false};
    case ApproxKind::kShiftGelu:
      return {45, 0, false};
    case ApproxKind::kDataAwarePolyGelu:
      return {29, 0, false};
    case ApproxKind::kLog2Scale:
      return {16, 118, false};
    case ApproxKind::kPolySqrt:
      return {16, 44, false};
    case ApproxKind::kBitshiftNewton:
      return {16, 70, false};
  }
  throw ConfigError("unknown approximation kind");
}

std::int64_t op_count(ApproxKind kind, const Shape& layer_shape) {
  if (layer_shape.empty()) throw ShapeError("op_count needs a non-empty shape");
  for (std::size_t d : layer_shape) {
    if (d == 0) throw ShapeError("op_count needs positive extents");
  }
  const OpCost cost = op_cost(kind);
  const auto n = static_cast<std::int64_t>(layer_shape.back());
  const auto rows = static_cast<std::int64_t>(num_elements(layer_shape)) / n;
  const std::int64_t per_row = cost.per_element * n + cost.per_row + (cost.row_max ? n - 1 : 0);
  return rows * per_row;
}

std::string MetricTable::to_csv() const {
  std::ostringstream os;
  os << "layer_id,kind,candidate,q_db,p,c,score,chosen\n";
  for (const MetricEntry& e : entries) {
    os << e.layer_id << ',' << to_string(e.layer_kind) << ',' << to_string(e.candidate) << ','
       << fmt(e.metric.q_db) << ',' << fmt(e.metric.p) << ',' << e.metric.c << ','
       << fmt(e.metric.score) << ',' << (e.chosen ? 1 : 0) << '\n';
  }
  return os.str();
}

void score_table(MetricTable& table, const MetricOptions& opts) {
  struct Range {
    double p_lo = INFINITY, p_hi = -INFINITY, c_lo = INFINITY, c_hi = -INFINITY;
  };
  std::map<std::string, Range> ranges;
  if (opts.standardize) {
    for (const MetricEntry& e : table.entries) {
      if (e.failed) continue;
      Range& r = ranges[e.layer_id];
      r.p_lo = std::min(r.p_lo, e.metric.p);
      r.p_hi = std::max(r.p_hi, e.metric.p);
      r.c_lo = std::min(r.c_lo, static_cast<double>(e.metric.c));
      r.c_hi = std::max(r.c_hi, static_cast<double>(e.metric.c));
    }
  }
  auto unit = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };
  for (MetricEntry& e : table.entries) {
    if (e.failed) {
      e.metric.score = 0.0;
      continue;
    }
    double p = e.metric.p;
    double c = static_cast<double>(e.metric.c);
    if (opts.standardize) {
      const Range& r = ranges[e.layer_id];
      p = unit(p, r.p_lo, r.p_hi);
      c = unit(c, r.c_lo, r.c_hi);
    }
    e.metric.score = unified_score(e.metric.q_db, p, c);
  }
}

}  // namespace intvit
