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

#include "intvit/pipeline.h"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>

#include "intvit/errors.h"
#include "intvit/integer_forward.h"

namespace intvit {
namespace {

struct Capture {
  std::vector<Tensor> inputs;
  std::vector<Tensor> outputs;
};

const NormWeights* norm_for(const ModelGraph& g, std::size_t layer) {
  if (layer == 0) return &g.weights.ln0;
  const std::size_t block = (layer - 1) / 4;
  switch ((layer - 1) % 4) {
    case 0:
      return &g.weights.blocks[block].ln1;
    case 2:
      return &g.weights.blocks[block].ln2;
    default:
      return nullptr;
  }
}

}  // namespace

Tensor concat_batches(const std::vector<Tensor>& batches) {
  if (batches.empty()) throw ConfigError("calibration set is empty");
  Shape dims = batches[0].dims();
  if (dims.size() == 2) dims.insert(dims.begin(), 1);
  std::vector<float> data;
  std::size_t total = 0;
  for (const Tensor& b : batches) {
    const std::size_t lead = b.rank() == 2 ? 1 : b.dims()[0];
    if (b.size() != lead * dims[1] * dims[2]) throw ShapeError("calibration batches differ in shape");
    const auto v = b.reals();
    data.insert(data.end(), v.begin(), v.end());
    total += lead;
  }
  dims[0] = total;
  return Tensor::real(dims, std::move(data));
}

std::vector<Tensor> calibration_batches(const PipelineConfig& cfg) {
  std::vector<Tensor> out;
  for (std::size_t i = 0; i < cfg.calib_batches; ++i) {
    out.push_back(random_inputs(cfg.model, cfg.calib_batch_size, cfg.calib_seed * 1000003ULL + i));
  }
  return out;
}

MetricTable stage1_analyze(const ModelGraph& g, const std::vector<Tensor>& calib,
                           const Stage1Options& opts) {
  const Tensor x = concat_batches(calib);
  Capture cap;
  cap.inputs.resize(g.layers.size());
  cap.outputs.resize(g.layers.size());
  const Tensor logits = forward_fp(g, x, [&](std::size_t i, const Tensor& in, Tensor& out) {
    cap.inputs[i] = in;
    cap.outputs[i] = out;
  });

  MetricTable table;
  std::vector<QParams> in_params(g.layers.size());
  std::vector<QParams> out_params(g.layers.size());
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    const LayerRecord& rec = g.layers[i];
    in_params[i] = nonlinear_input_params(rec.kind, cap.inputs[i], opts.act_bits);
    out_params[i] = nonlinear_output_params(rec.kind, cap.outputs[i], opts.act_bits);
    for (ApproxKind k : rec.candidates) {
      MetricEntry e;
      e.layer_id = rec.layer_id;
      e.layer_kind = rec.kind;
      e.candidate = k;
      table.entries.push_back(e);
    }
  }
  std::vector<std::size_t> layer_of;
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    for (std::size_t j = 0; j < g.layers[i].candidates.size(); ++j) layer_of.push_back(i);
  }

  auto evaluate = [&](std::size_t idx) {
    MetricEntry& e = table.entries[idx];
    const std::size_t li = layer_of[idx];
    try {
      const NonlinearKernel k = prepare_nonlinear(e.candidate, in_params[li], out_params[li], norm_for(g, li));
      const Tensor codes = quantize(cap.inputs[li], in_params[li]).codes;
      const Tensor y_hat = dequantize(QTensor{run_nonlinear(k, codes), k.out});
      if (opts.global_logits) {
        const Tensor swapped = forward_fp(g, x, [&](std::size_t i, const Tensor&, Tensor& out) {
          if (i == li) out = y_hat;
        });
        e.metric.q_db = sqnr(logits, swapped, opts.metric.db);
        e.metric.p = perturbation(logits, swapped);
      } else {
        e.metric.q_db = sqnr(cap.outputs[li], y_hat, opts.metric.db);
        e.metric.p = perturbation(cap.outputs[li], y_hat);
      }
      e.metric.c = op_count(e.candidate, cap.inputs[li].dims());
    } catch (const Error& err) {
      e.failed = true;
      e.failure = err.what();
    }
  };

  unsigned jobs = opts.jobs ? opts.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(table.entries.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < table.entries.size(); i = next++) evaluate(i);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  score_table(table, opts.metric);
  return table;
}

AssignmentPlan stage2_assign(const MetricTable& t) {
  AssignmentPlan plan;
  plan.metric_table = t;
  std::vector<std::string> layers;
  std::map<std::string, std::size_t> best;
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const MetricEntry& e = t.entries[i];
    auto it = best.find(e.layer_id);
    if (it == best.end()) {
      layers.push_back(e.layer_id);
      best[e.layer_id] = i;
      continue;
    }
    const MetricEntry& cur = t.entries[it->second];
    if (cur.layer_kind != e.layer_kind) throw IncompleteTableError("layer " + e.layer_id + " has mixed kinds");
    const bool better = e.metric.score > cur.metric.score ||
                        (e.metric.score == cur.metric.score && to_string(e.candidate) < to_string(cur.candidate));
    if (better) it->second = i;
  }
  if (layers.empty()) throw IncompleteTableError("metric table is empty");
  for (MetricEntry& e : plan.metric_table.entries) e.chosen = false;
  double omega = 0.0;
  for (const std::string& id : layers) {
    const std::size_t i = best[id];
    const MetricEntry& e = t.entries[i];
    plan.metric_table.entries[i].chosen = true;
    plan.assignments.push_back({id, e.layer_kind, e.candidate, e.metric});
    omega += e.metric.score;
  }
  plan.metric_table.omega = omega;
  return plan;
}

AssignmentPlan stage2_assign(const MetricTable& t, const ModelGraph& g) {
  std::set<std::pair<std::string, ApproxKind>> present;
  for (const MetricEntry& e : t.entries) {
    if (!present.insert({e.layer_id, e.candidate}).second) {
      throw IncompleteTableError("duplicate entry for " + e.layer_id + "/" + to_string(e.candidate));
    }
  }
  for (const LayerRecord& rec : g.layers) {
    for (ApproxKind k : rec.candidates) {
      if (!present.count({rec.layer_id, k})) {
        throw IncompleteTableError("missing entry for " + rec.layer_id + "/" + to_string(k));
      }
    }
  }
  AssignmentPlan plan = stage2_assign(t);
  if (plan.assignments.size() != g.layers.size()) throw IncompleteTableError("table covers unknown layers");
  for (std::size_t i = 0; i < g.layers.size(); ++i) {
    if (plan.assignments[i].layer_id != g.layers[i].layer_id) {
      throw IncompleteTableError("table layer order does not match the graph");
    }
  }
  plan.model = g.config;
  plan.seed = g.seed;
  return plan;
}

AssignmentPlan stage3_calibrate(const ModelGraph& g, AssignmentPlan plan, const std::vector<Tensor>& calib,
                                int weight_bits, int act_bits) {
  if (plan.assignments.size() != g.layers.size()) throw ConfigError("plan assignments are incomplete");
  plan.model = g.config;
  plan.seed = g.seed;
  plan.weight_bits = weight_bits;
  plan.act_bits = act_bits;
  CalibrationResult r = calibrate_sites(g, plan.kinds(), concat_batches(calib), weight_bits, act_bits);
  plan.qparams = std::move(r.sites);
  plan.warnings.insert(plan.warnings.end(), r.warnings.begin(), r.warnings.end());
  return plan;
}

AssignmentPlan run_pipeline(const PipelineConfig& cfg, unsigned jobs) {
  cfg.validate();
  const ModelGraph g = build_toy_vit(cfg.model, cfg.seed, cfg.pools);
  const std::vector<Tensor> calib = calibration_batches(cfg);
  Stage1Options opts;
  opts.metric = cfg.metric;
  opts.global_logits = cfg.global_logits;
  opts.act_bits = cfg.act_bits;
  opts.jobs = jobs;
  const MetricTable table = stage1_analyze(g, calib, opts);
  AssignmentPlan plan = stage2_assign(table, g);
  return stage3_calibrate(g, std::move(plan), calib, cfg.weight_bits, cfg.act_bits);
}

}  // namespace intvit
