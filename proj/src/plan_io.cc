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

#include "intvit/plan_io.h"

#include <cmath>
#include <set>

#include "intvit/errors.h"
#include "json.hpp"

namespace intvit {
namespace {

using nlohmann::ordered_json;

// Reads typed fields from a JSON object and reports the offending path.
class Reader {
 public:
  Reader(const ordered_json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const ordered_json& at(const std::string& key) const {
    if (!j_.contains(key)) throw ConfigError("missing field " + where(key));
    seen_.insert(key);
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key) const {
    const ordered_json& v = at(key);
    try {
      return v.get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("wrong type for field " + where(key));
    }
  }

  std::size_t positive(const std::string& key) const {
    const ordered_json& v = at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
      throw ConfigError("field " + where(key) + " must be a positive integer");
    }
    return v.get<std::size_t>();
  }

  bool boolean(const std::string& key) const {
    const ordered_json& v = at(key);
    if (!v.is_boolean()) throw ConfigError("field " + where(key) + " must be a boolean");
    return v.get<bool>();
  }

  std::string where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown field " + where(it.key()));
    }
  }

 private:
  const ordered_json& j_;
  std::string path_;
  mutable std::set<std::string> seen_;
};

ordered_json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double read_number(const ordered_json& v, const std::string& path) {
  if (v.is_string()) {
    if (v == "inf") return INFINITY;
    if (v == "-inf") return -INFINITY;
  }
  if (!v.is_number()) throw ConfigError("field " + path + " must be a number");
  return v.get<double>();
}

ordered_json model_json(const ModelConfig& m) {
  return {{"blocks", m.blocks},       {"dim", m.dim},
          {"heads", m.heads},         {"tokens", m.tokens},
          {"mlp_ratio", m.mlp_ratio}, {"num_classes", m.num_classes}};
}

ModelConfig read_model(const ordered_json& j, const std::string& path) {
  Reader r(j, path);
  ModelConfig m;
  m.blocks = r.positive("blocks");
  m.dim = r.positive("dim");
  m.heads = r.positive("heads");
  m.tokens = r.positive("tokens");
  m.mlp_ratio = r.positive("mlp_ratio");
  if (r.has("num_classes")) m.num_classes = r.positive("num_classes");
  r.reject_unknown();
  try {
    m.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return m;
}

int read_bits(const Reader& r, const std::string& key) {
  const int b = r.get<int>(key);
  if (b < 2 || b > 16) throw ConfigError("field " + r.where(key) + " must lie in [2, 16]");
  return b;
}

}  // namespace

const QParams& AssignmentPlan::site(const std::string& name) const {
  for (const SiteParams& s : qparams) {
    if (s.site == name) return s.params;
  }
  throw ConfigError("plan has no quantization parameters for site '" + name + "'");
}

std::vector<ApproxKind> AssignmentPlan::kinds() const {
  std::vector<ApproxKind> k;
  for (const LayerAssignment& a : assignments) k.push_back(a.candidate);
  return k;
}

void PipelineConfig::validate() const {
  model.validate();
  if (weight_bits < 2 || weight_bits > 16 || act_bits < 2 || act_bits > 16) {
    throw ConfigError("bit-widths must lie in [2, 16]");
  }
  if (calib_batches == 0 || calib_batch_size == 0) throw ConfigError("calibration set is empty");
  for (const auto& [kind, pool] : pools) {
    const std::string where = "pools." + to_string(kind);
    if (pool.empty()) throw ConfigError(where + ": pool is empty");
    std::set<ApproxKind> seen;
    for (ApproxKind k : pool) {
      if (layer_kind_of(k) != kind) {
        throw ConfigError(where + ": " + to_string(k) + " is not a " + to_string(kind) + " candidate");
      }
      if (!seen.insert(k).second) throw ConfigError(where + ": duplicate " + to_string(k));
    }
  }
}

std::string plan_to_json(const AssignmentPlan& plan) {
  ordered_json j;
  j["model_config"] = model_json(plan.model);
  j["seed"] = plan.seed;
  j["weight_bits"] = plan.weight_bits;
  j["act_bits"] = plan.act_bits;
  ordered_json as = ordered_json::array();
  for (const LayerAssignment& a : plan.assignments) {
    as.push_back({{"layer_id", a.layer_id},
                  {"kind", to_string(a.kind)},
                  {"candidate", to_string(a.candidate)},
                  {"score", number(a.metric.score)},
                  {"q_db", number(a.metric.q_db)},
                  {"p", number(a.metric.p)},
                  {"c", a.metric.c}});
  }
  j["assignments"] = as;
  ordered_json qs = ordered_json::array();
  for (const SiteParams& s : plan.qparams) {
    ordered_json e;
    e["layer_id"] = s.site;
    if (s.params.per_channel()) {
      e["scale"] = s.params.scale;
      e["zero_point"] = s.params.zero_point;
    } else {
      e["scale"] = s.params.scale[0];
      e["zero_point"] = s.params.zero_point[0];
    }
    e["bits"] = s.params.bits;
    e["scheme"] = to_string(s.params.scheme);
    e["granularity"] = s.params.per_channel() ? "per_channel" : "per_tensor";
    if (s.params.per_channel()) e["channel_axis"] = *s.params.channel_axis;
    qs.push_back(e);
  }
  j["qparams"] = qs;
  j["omega"] = number(plan.metric_table.omega);
  j["warnings"] = plan.warnings;
  return j.dump(2) + "\n";
}

AssignmentPlan plan_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("plan is not valid JSON: ") + e.what());
  }
  Reader r(j, "");
  AssignmentPlan plan;
  plan.model = read_model(r.at("model_config"), "model_config");
  plan.seed = r.get<std::uint64_t>("seed");
  plan.weight_bits = read_bits(r, "weight_bits");
  plan.act_bits = read_bits(r, "act_bits");
  const ordered_json& as = r.at("assignments");
  if (!as.is_array()) throw ConfigError("field assignments must be an array");
  for (std::size_t i = 0; i < as.size(); ++i) {
    const std::string path = "assignments[" + std::to_string(i) + "]";
    Reader e(as[i], path);
    LayerAssignment a;
    a.layer_id = e.get<std::string>("layer_id");
    a.kind = layer_kind_from_string(e.get<std::string>("kind"));
    a.candidate = approx_kind_from_string(e.get<std::string>("candidate"));
    a.metric.score = read_number(e.at("score"), path + ".score");
    a.metric.q_db = read_number(e.at("q_db"), path + ".q_db");
    a.metric.p = read_number(e.at("p"), path + ".p");
    a.metric.c = e.get<std::int64_t>("c");
    e.reject_unknown();
    if (layer_kind_of(a.candidate) != a.kind) throw ConfigError(path + ": candidate does not match kind");
    plan.assignments.push_back(a);
  }
  const ordered_json& qs = r.at("qparams");
  if (!qs.is_array()) throw ConfigError("field qparams must be an array");
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const std::string path = "qparams[" + std::to_string(i) + "]";
    Reader e(qs[i], path);
    SiteParams s;
    s.site = e.get<std::string>("layer_id");
    s.params.bits = read_bits(e, "bits");
    s.params.scheme = scheme_from_string(e.get<std::string>("scheme"));
    const std::string gran = e.get<std::string>("granularity");
    if (gran == "per_channel") {
      s.params.scale = e.get<std::vector<double>>("scale");
      s.params.zero_point = e.get<std::vector<std::int32_t>>("zero_point");
      s.params.channel_axis = e.get<std::size_t>("channel_axis");
    } else if (gran == "per_tensor") {
      s.params.scale = {e.get<double>("scale")};
      s.params.zero_point = {e.get<std::int32_t>("zero_point")};
    } else {
      throw ConfigError("field " + path + ".granularity must be per_tensor or per_channel");
    }
    e.reject_unknown();
    try {
      s.params.validate();
    } catch (const ConfigError& err) {
      throw ConfigError(path + ": " + err.what());
    }
    plan.qparams.push_back(s);
  }
  if (r.has("omega")) plan.metric_table.omega = read_number(r.at("omega"), "omega");
  if (r.has("warnings")) plan.warnings = r.get<std::vector<std::string>>("warnings");
  r.reject_unknown();
  return plan;
}

std::string config_to_json(const PipelineConfig& cfg) {
  ordered_json j;
  j["model"] = model_json(cfg.model);
  j["weight_bits"] = cfg.weight_bits;
  j["act_bits"] = cfg.act_bits;
  ordered_json pools = ordered_json::object();
  for (const auto& [kind, list] : cfg.pools) {
    ordered_json names = ordered_json::array();
    for (ApproxKind k : list) names.push_back(to_string(k));
    pools[to_string(kind)] = names;
  }
  j["pools"] = pools;
  j["metric"] = {{"db_convention", cfg.metric.db == DbConvention::kPowerRatio ? "power_ratio" : "literal_20"},
                 {"standardize", cfg.metric.standardize}};
  j["global_logits"] = cfg.global_logits;
  j["seed"] = cfg.seed;
  j["calib_seed"] = cfg.calib_seed;
  j["calib_batches"] = cfg.calib_batches;
  j["calib_batch_size"] = cfg.calib_batch_size;
  return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Reader r(j, "");
  PipelineConfig cfg;
  cfg.model = read_model(r.at("model"), "model");
  if (r.has("weight_bits")) cfg.weight_bits = read_bits(r, "weight_bits");
  if (r.has("act_bits")) cfg.act_bits = read_bits(r, "act_bits");
  if (r.has("pools")) {
    Reader p(r.at("pools"), "pools");
    for (LayerKind kind : {LayerKind::kGelu, LayerKind::kSoftmax, LayerKind::kLayerNorm}) {
      const std::string key = to_string(kind);
      if (!p.has(key)) continue;
      std::vector<ApproxKind> list;
      for (const std::string& name : p.get<std::vector<std::string>>(key)) {
        ApproxKind a;
        try {
          a = approx_kind_from_string(name);
        } catch (const ConfigError&) {
          throw ConfigError("unknown candidate '" + name + "' in " + p.where(key));
        }
        if (layer_kind_of(a) != kind) throw ConfigError(name + " is not valid in " + p.where(key));
        list.push_back(a);
      }
      if (list.empty()) throw ConfigError("field " + p.where(key) + " must not be empty");
      cfg.pools[kind] = list;
    }
    p.reject_unknown();
  }
  if (r.has("metric")) {
    Reader m(r.at("metric"), "metric");
    if (m.has("db_convention")) {
      const std::string db = m.get<std::string>("db_convention");
      if (db == "power_ratio") {
        cfg.metric.db = DbConvention::kPowerRatio;
      } else if (db == "literal_20") {
        cfg.metric.db = DbConvention::kLiteral20;
      } else {
        throw ConfigError("field metric.db_convention must be power_ratio or literal_20");
      }
    }
    if (m.has("standardize")) cfg.metric.standardize = m.boolean("standardize");
    m.reject_unknown();
  }
  if (r.has("global_logits")) cfg.global_logits = r.boolean("global_logits");
  if (r.has("seed")) cfg.seed = r.get<std::uint64_t>("seed");
  if (r.has("calib_seed")) cfg.calib_seed = r.get<std::uint64_t>("calib_seed");
  if (r.has("calib_batches")) cfg.calib_batches = r.positive("calib_batches");
  if (r.has("calib_batch_size")) cfg.calib_batch_size = r.positive("calib_batch_size");
  r.reject_unknown();
  cfg.validate();
  return cfg;
}

}  // namespace intvit
