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

#ifndef INTVIT_APPROX_KIND_H_
#define INTVIT_APPROX_KIND_H_

#include <string>
#include <vector>

namespace intvit {

enum class LayerKind { kGelu, kSoftmax, kLayerNorm };

enum class ApproxKind {
  kLog2Softmax,
  kIexpSoftmax,
  kShiftmax,
  kEfficientBitSoftmax,
  kIbertGelu,
  kShiftGelu,
  kDataAwarePolyGelu,
  kLog2Scale,
  kPolySqrt,
  kBitshiftNewton,
};

// Canonical names ("efficient_bit_softmax", "GELU", ...).
std::string to_string(LayerKind k);
std::string to_string(ApproxKind k);
LayerKind layer_kind_from_string(const std::string& s);
ApproxKind approx_kind_from_string(const std::string& s);

LayerKind layer_kind_of(ApproxKind k);
// Default candidate pool for a layer kind, in declaration order.
std::vector<ApproxKind> default_pool(LayerKind k);
const std::vector<ApproxKind>& all_approx_kinds();

}  // namespace intvit

#endif  // INTVIT_APPROX_KIND_H_
