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

#include "cli.h"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "intvit/errors.h"
#include "intvit/gelu_approx.h"
#include "intvit/integer_forward.h"
#include "intvit/pipeline.h"
#include "intvit/softmax_approx.h"
#include "intvit/tensor_io.h"
#include "json.hpp"

namespace intvit::cli {
namespace {

using nlohmann::ordered_json;

// Raised for bad arguments that CLI11 cannot catch on its own.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct RunReport {
  std::string command;
  std::vector<std::string> args;
  ordered_json config = ordered_json::object();
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text, RunReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  out.close();
  if (!out) throw IoError("cannot write " + path);
  report.outputs.push_back(path);
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out, RunReport& report) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text, report);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(10) << v;
  return os.str();
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::vector<double> range{-3.0, 3.0};
  int degree = 4;
  std::size_t samples = kErrorGridPoints;
  std::string objective = "erf";
  std::string out;
};

int cmd_fit(const FitArgs& a, std::ostream& out, RunReport& report) {
  if (a.range.size() != 2 || !(a.range[0] < a.range[1])) {
    throw UsageError("--range needs LO HI with LO < HI");
  }
  if (a.degree < 2 || a.degree > 4) throw UsageError("--degree must be 2, 3 or 4");
  if (a.samples < 100) throw UsageError("--samples must be at least 100");
  report.config = {{"range", a.range}, {"degree", a.degree}, {"samples", a.samples}, {"objective", a.objective}};
  const gelu::FitResult r = a.objective == "gelu"
                                ? gelu::fit_gelu_poly(a.range[0], a.range[1], a.degree, a.samples)
                                : gelu::fit_erf_poly(a.range[0], a.range[1], a.degree, a.samples);
  ordered_json j;
  j["a"] = r.coeffs.a;
  j["b"] = r.coeffs.b;
  j["degree"] = r.coeffs.degree;
  j["range"] = a.range;
  j["l2_err"] = r.l2_err;
  j["linf_err"] = r.linf_err;
  j["objective"] = r.objective;
  j["samples"] = r.samples;
  emit(a.out, j.dump(2) + "\n", out, report);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct Row {
  std::string method;
  ErrorNorms e;
};

int cmd_eval_approx(const std::string& which, const std::string& path, std::ostream& out, RunReport& report) {
  report.config = {{"which", which}};
  std::vector<Row> rows;
  std::string range;
  auto erf = [](double x) { return std::erf(x); };
  if (which == "erf") {
    range = "(-3,3)";
    const gelu::ErfPolyCoeffs ib = gelu::ibert_coeffs();
    rows.push_back({"ibert_quadratic", approx_error(erf, [&](double x) { return gelu::erf_poly_eval(x, ib); }, -3, 3)});
    rows.push_back({"data_aware_quartic",
                    approx_error(erf, [](double x) { return gelu::erf_poly_eval(x, gelu::kVisionQuartic); }, -3, 3)});
  } else if (which == "gelu") {
    range = "(-3,3)";
    const gelu::ErfPolyCoeffs ib = gelu::ibert_coeffs();
    rows.push_back({"i_gelu", approx_error(gelu::exact_gelu, [&](double x) { return gelu::poly_gelu(x, ib); }, -3, 3)});
    rows.push_back({"data_aware_poly_gelu",
                    approx_error(gelu::exact_gelu, [](double x) { return gelu::poly_gelu(x, gelu::kVisionQuartic); }, -3, 3)});
    rows.push_back({"sigmoid_gelu", approx_error(gelu::exact_gelu, gelu::sigmoid_gelu, -3, 3)});
  } else if (which == "exp2") {
    range = "(-1,1)";
    rows.push_back({"ivit_linear", softmax::base2_frac_approx_error(softmax::Base2Approx::kIvitLinear)});
    rows.push_back({"ours_exact_ln2", softmax::base2_frac_approx_error(softmax::Base2Approx::kOursExactLn2)});
    rows.push_back({"ours_shift", softmax::base2_frac_approx_error(softmax::Base2Approx::kOursShift)});
  } else {
    throw UsageError("--which must be erf, gelu or exp2");
  }
  std::ostringstream csv;
  csv << "method,range,l2,linf\n";
  for (const Row& r : rows) csv << r.method << ",\"" << range << "\"," << fmt(r.e.l2) << ',' << fmt(r.e.linf) << '\n';
  emit(path, csv.str(), out, report);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct AssignArgs {
  std::string config;
  std::string out = "plan.json";
  std::string metrics = "metrics.csv";
  std::optional<std::uint64_t> calib_seed;
};

int cmd_assign(const AssignArgs& a, std::optional<std::uint64_t> seed, unsigned jobs, std::ostream& out,
               RunReport& report) {
  PipelineConfig cfg;
  try {
    cfg = config_from_json(read_file(a.config));
    if (seed) cfg.seed = *seed;
    if (a.calib_seed) cfg.calib_seed = *a.calib_seed;
    cfg.validate();
  } catch (const ConfigError& e) {
    throw UsageError(std::string("invalid config: ") + e.what());
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
  report.seed = cfg.seed;
  report.config = ordered_json::parse(config_to_json(cfg));
  const AssignmentPlan plan = run_pipeline(cfg, jobs);
  write_file(a.out, plan_to_json(plan), report);
  write_file(a.metrics, plan.metric_table.to_csv(), report);

  std::map<std::string, std::map<std::string, int>> summary;
  for (const LayerAssignment& la : plan.assignments) ++summary[to_string(la.kind)][to_string(la.candidate)];
  out << "layers: " << plan.assignments.size() << ", metric entries: " << plan.metric_table.entries.size() << '\n';
  for (const auto& [kind, counts] : summary) {
    out << kind << ':';
    for (const auto& [cand, n] : counts) out << ' ' << cand << " x" << n;
    out << '\n';
  }
  for (const std::string& w : plan.warnings) out << "warning: " << w << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct InferArgs {
  std::string plan;
  std::string input;
  std::string out = "logits.iptq";
  std::string ops_report;
};

int cmd_infer(const InferArgs& a, std::ostream& out, RunReport& report) {
  AssignmentPlan plan;
  Tensor x;
  try {
    plan = plan_from_json(read_file(a.plan));
    x = tensor_read(a.input);
  } catch (const ConfigError& e) {
    throw UsageError(std::string("invalid plan: ") + e.what());
  } catch (const FormatError& e) {
    throw UsageError(std::string("invalid input tensor: ") + e.what());
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
  report.seed = plan.seed;
  report.config = {{"plan", a.plan}, {"input", a.input}};
  const ModelConfig& m = plan.model;
  const bool shape_ok = x.dtype() == DType::kReal32 &&
                        ((x.rank() == 3 && x.dims()[1] == m.tokens && x.dims()[2] == m.dim) ||
                         (x.rank() == 2 && x.dims()[0] == m.tokens && x.dims()[1] == m.dim));
  if (!shape_ok) throw UsageError("input tensor shape does not match the plan's model");
  CandidatePools pools = default_pools();
  const ModelGraph g = build_toy_vit(plan.model, plan.seed, pools);
  const IntegerResult r = integer_forward(g, plan, x);
  tensor_write(r.logits, a.out);
  report.outputs.push_back(a.out);

  ordered_json ops = {{"adds", r.ops.adds},       {"muls", r.ops.muls},
                      {"divs", r.ops.divs},       {"shifts", r.ops.shifts},
                      {"compares", r.ops.compares}, {"total", r.ops.total()},
                      {"float_violations", r.ops.float_violations}};
  if (!a.ops_report.empty()) write_file(a.ops_report, ops.dump(2) + "\n", report);
  out << "integer ops: " << r.ops.total() << ", float violations: " << r.ops.float_violations << '\n';
  if (r.ops.float_violations > 0) {
    out << "error: floating-point operations detected in the integer path\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_report(const std::string& log, const std::string& path, std::ostream& out, RunReport& report) {
  report.config = {{"log", log}};
  std::ifstream in(log);
  if (!in) throw UsageError("cannot open report log " + log);
  std::ostringstream csv;
  csv << "index,command,exit_code,wall_time_s,seed,outputs\n";
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw Error("report log line " + std::to_string(i + 1) + " is not valid JSON");
    }
    std::string outputs;
    for (const auto& o : j.value("outputs", ordered_json::array())) {
      if (!outputs.empty()) outputs += ';';
      outputs += o.get<std::string>();
    }
    csv << i++ << ',' << j.value("command", "") << ',' << j.value("exit_code", -1) << ','
        << fmt(j.value("wall_time_s", 0.0)) << ',' << j.value("seed", std::uint64_t{0}) << ",\"" << outputs << "\"\n";
  }
  emit(path, csv.str(), out, report);
  return kExitOk;
}

void append_report(const std::string& path, const RunReport& r, int code, double seconds) {
  if (path.empty()) return;
  ordered_json j;
  j["command"] = r.command;
  j["args"] = r.args;
  j["config"] = r.config;
  j["outputs"] = r.outputs;
  j["wall_time_s"] = seconds;
  j["seed"] = r.seed;
  j["exit_code"] = code;
  std::ofstream log(path, std::ios::app);
  if (log) log << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Integer-only vision transformer quantization toolkit", "intvit"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned jobs = 0;
  std::string report_log = "intvit_runs.jsonl";
  app.add_option("--seed", seed, "Random seed (default 0)")->each([&](const std::string&) { seed_given = true; });
  app.add_option("--jobs", jobs, "Stage-1 worker threads (default: all cores)");
  app.add_option("--report-log", report_log, "Append-only run report log; empty disables");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the saturating erf polynomial");
  fit_cmd->add_option("--range", fit.range, "LO HI")->expected(2)->allow_extra_args(false);
  fit_cmd->add_option("--degree", fit.degree, "Polynomial degree (2-4)");
  fit_cmd->add_option("--samples", fit.samples, "Fit grid size");
  fit_cmd->add_option("--objective", fit.objective, "erf or gelu")->check(CLI::IsMember({"erf", "gelu"}));
  fit_cmd->add_option("--out", fit.out, "Output JSON (default stdout)");

  std::string which;
  std::string eval_out;
  auto* eval_cmd = app.add_subcommand("eval-approx", "Approximation error tables");
  eval_cmd->add_option("--which", which, "erf, gelu or exp2")->required();
  eval_cmd->add_option("--out", eval_out, "Output CSV (default stdout)");

  AssignArgs assign;
  auto* assign_cmd = app.add_subcommand("assign", "Run the three-stage assignment pipeline");
  assign_cmd->add_option("--config", assign.config, "Pipeline config JSON")->required();
  assign_cmd->add_option("--out", assign.out, "Plan JSON");
  assign_cmd->add_option("--metrics", assign.metrics, "Metric table CSV");
  assign_cmd->add_option("--calib-seed", assign.calib_seed, "Calibration input seed");

  InferArgs infer;
  auto* infer_cmd = app.add_subcommand("infer", "Integer-only inference with a calibrated plan");
  infer_cmd->add_option("--plan", infer.plan, "Plan JSON")->required();
  infer_cmd->add_option("--input", infer.input, "Input tensor file")->required();
  infer_cmd->add_option("--out", infer.out, "Output logits tensor file");
  infer_cmd->add_option("--ops-report", infer.ops_report, "Op-count report JSON");

  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Summarize the run report log as CSV");
  report_cmd->add_option("--out", report_out, "Output CSV (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  RunReport report;
  report.args = args;
  report.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  int code = kExitFailure;
  try {
    if (fit_cmd->parsed()) {
      report.command = "fit";
      code = cmd_fit(fit, out, report);
    } else if (eval_cmd->parsed()) {
      report.command = "eval-approx";
      code = cmd_eval_approx(which, eval_out, out, report);
    } else if (assign_cmd->parsed()) {
      report.command = "assign";
      code = cmd_assign(assign, seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt, jobs, out, report);
    } else if (infer_cmd->parsed()) {
      report.command = "infer";
      code = cmd_infer(infer, out, report);
    } else if (report_cmd->parsed()) {
      report.command = "report";
      code = cmd_report(report_log, report_out, out, report);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    code = kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = kExitFailure;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  append_report(report_log, report, code, seconds);
  return code;
}

}  // namespace intvit::cli
