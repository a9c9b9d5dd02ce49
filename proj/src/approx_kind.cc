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

#include "intvit/approx_kind.h"

#include <array>
#include <utility>

#include "intvit/errors.h"

namespace intvit {
namespace {

struct Entry {
  ApproxKind kind;
  const char* name;
  LayerKind layer;
};

constexpr std::array<Entry, 10> kEntries{{
    {ApproxKind::kLog2Softmax, "log2_softmax", LayerKind::kSoftmax},
    {ApproxKind::kIexpSoftmax, "iexp_softmax", LayerKind::kSoftmax},
    {ApproxKind::kShiftmax, "shiftmax", LayerKind::kSoftmax},
    {ApproxKind::kEfficientBitSoftmax, "efficient_bit_softmax", LayerKind::kSoftmax},
    {ApproxKind::kIbertGelu, "ibert_gelu", LayerKind::kGelu},
    {ApproxKind::kShiftGelu, "shift_gelu", LayerKind::kGelu},
    {ApproxKind::kDataAwarePolyGelu, "data_aware_poly_gelu", LayerKind::kGelu},
    {ApproxKind::kLog2Scale, "log2_scale", LayerKind::kLayerNorm},
    {ApproxKind::kPolySqrt, "poly_sqrt", LayerKind::kLayerNorm},
    {ApproxKind::kBitshiftNewton, "bitshift_newton", LayerKind::kLayerNorm},
}};

const Entry& entry(ApproxKind k) {
  for (const Entry& e : kEntries) {
    if (e.kind == k) return e;
  }
  throw ConfigError("unknown approximation kind");
}

}  // namespace

std::string to_string(LayerKind k) {
  switch (k) {
    case LayerKind::kGelu:
      return "GELU";
    case LayerKind::kSoftmax:
      return "Softmax";
    case LayerKind::kLayerNorm:
      return "LayerNorm";
  }
  return "unknown";
}

std::string to_string(ApproxKind k) { return entry(k).name; }

LayerKind layer_kind_from_string(const std::string& s) {
  for (LayerKind k : {LayerKind::kGelu, LayerKind::kSoftmax, LayerKind::kLayerNorm}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown layer kind '" + s + "'");
}

ApproxKind approx_kind_from_string(const std::string& s) {
  for (const Entry& e : kEntries) {
    if (s == e.name) return e.kind;
  }
  throw ConfigError("unknown approximation kind '" + s + "'");
}

LayerKind layer_kind_of(ApproxKind k) { return entry(k).layer; }

std::vector<ApproxKind> default_pool(LayerKind k) {
  std::vector<ApproxKind> pool;
  for (const Entry& e : kEntries) {
    if (e.layer == k) pool.push_back(e.kind);
  }
  return pool;
}

const std::vector<ApproxKind>& all_approx_kinds() {
  static const std::vector<ApproxKind> kinds = [] {
    std::vector<ApproxKind> v;
    for (const Entry& e : kEntries) v.push_back(e.kind);
    return v;
  }();
  return kinds;
}

}  // namespace intvit
