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

#ifndef INTVIT_PLAN_IO_H_
#define INTVIT_PLAN_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "intvit/approx_kind.h"
#include "intvit/quantizer.h"
#include "intvit/toy_vit.h"
#include "intvit/unified_metric.h"

namespace intvit {

struct LayerAssignment {
  std::string layer_id;
  LayerKind kind = LayerKind::kLayerNorm;
  ApproxKind candidate = ApproxKind::kBitshiftNewton;
  MetricScore metric;
};

// Quantization parameters of one named tensor site ("input", "b0.fc1",
// "b0.qkv.weight", ...).
struct SiteParams {
  std::string site;
  QParams params;
};

struct AssignmentPlan {
  ModelConfig model;
  std::uint64_t seed = 0;  // weight seed of the toy model
  int weight_bits = 8;
  int act_bits = 8;
  std::vector<LayerAssignment> assignments;  // one per non-linear layer, in order
  std::vector<SiteParams> qparams;           // empty until calibrated
  MetricTable metric_table;
  std::vector<std::string> warnings;

  bool calibrated() const { return !qparams.empty(); }
  // Throws ConfigError when the site is missing.
  const QParams& site(const std::string& name) const;
  std::vector<ApproxKind> kinds() const;
};

struct PipelineConfig {
  ModelConfig model;
  int weight_bits = 8;
  int act_bits = 8;
  CandidatePools pools = default_pools();
  MetricOptions metric;
  bool global_logits = false;  // stage-1 comparison on final logits instead of the layer output
  std::uint64_t seed = 0;       // model weights
  std::uint64_t calib_seed = 1; // calibration inputs
  std::size_t calib_batches = 4;
  std::size_t calib_batch_size = 8;

  void validate() const;
};

// JSON with snake_case keys. Parse errors throw ConfigError naming the field
// path, e.g. "model.blocks".
std::string plan_to_json(const AssignmentPlan& plan);
AssignmentPlan plan_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const std::string& text);

}  // namespace intvit

#endif  // INTVIT_PLAN_IO_H_
