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

#ifndef INTVIT_PIPELINE_H_
#define INTVIT_PIPELINE_H_

#include <cstddef>
#include <vector>

#include "intvit/plan_io.h"
#include "intvit/toy_vit.h"
#include "intvit/unified_metric.h"

namespace intvit {

struct Stage1Options {
  MetricOptions metric;
  bool global_logits = false;
  int act_bits = 8;
  unsigned jobs = 0;  // 0: hardware concurrency
};

// Scores every (layer, candidate) pair. Each candidate is evaluated with only
// its own layer quantized; by default it is compared on that layer's output,
// with `global_logits` on the model logits. A candidate that throws is kept
// with score 0.
MetricTable stage1_analyze(const ModelGraph& g, const std::vector<Tensor>& calib,
                           const Stage1Options& opts = {});

// Per-layer argmax of the score; ties go to the lexicographically smaller
// candidate name. Throws IncompleteTableError when a layer has no entries.
AssignmentPlan stage2_assign(const MetricTable& t);
// Also requires every candidate in each layer's pool to be present.
AssignmentPlan stage2_assign(const MetricTable& t, const ModelGraph& g);

// One calibration pass through the mixed-quantized graph; fills qparams.
AssignmentPlan stage3_calibrate(const ModelGraph& g, AssignmentPlan plan,
                                const std::vector<Tensor>& calib, int weight_bits = 8,
                                int act_bits = 8);

// Concatenates [b_i, tokens, dim] batches along the batch axis.
Tensor concat_batches(const std::vector<Tensor>& batches);
std::vector<Tensor> calibration_batches(const PipelineConfig& cfg);

// Stages 1-3 end to end.
AssignmentPlan run_pipeline(const PipelineConfig& cfg, unsigned jobs = 0);

}  // namespace intvit

#endif  // INTVIT_PIPELINE_H_
