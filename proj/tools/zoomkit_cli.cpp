// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

// zoomkit command-line front end. Flags override the config file, which
// defaults to $ZOOMKIT_CONFIG.
//
// Exit codes: 0 success, 1 failed records (or a fatal runtime error),
// 2 invalid configuration.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "zoomkit/zoomkit.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitFailures = 1;
constexpr int kExitInvalidConfig = 2;

struct Flags {
  std::string config;
  std::optional<std::string> method;
  std::optional<std::string> layer;
  std::optional<std::vector<double>> multipliers;
  std::optional<bool> high_res;
  std::optional<std::int64_t> high_res_limit;
  std::optional<double> eps;
  std::optional<std::int64_t> input_res;
  std::optional<std::string> metric;
  std::optional<int> parallelism;
  std::vector<std::pair<std::string, std::optional<std::string>>> paths{
      {"bundles_dir", {}}, {"images_dir", {}}, {"records_in", {}}, {"records_out", {}},
      {"errors_out", {}},  {"summary_out", {}}, {"svg_out", {}},  {"crops_dir", {}},
      {"maps_dir", {}}};
};

// "m,k", "m,k,averaged" or "averaged".
std::optional<json> parse_layer_flag(const std::string& text) {
  if (text == "averaged") return json("averaged");
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (parts.size() < 2 || parts.size() > 3) return std::nullopt;
  try {
    json l;
    l["m"] = std::stoll(parts[0]);
    l["k"] = std::stoll(parts[1]);
    l["mode"] = parts.size() == 3 ? parts[2] : "selected";
    return l;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void add_job_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config, "JSON config file (default: $ZOOMKIT_CONFIG)");
  cmd.add_option("--method", f.method, "rel_att | grad_att | pure_grad | raw_a_si | human_crop");
  cmd.add_option("--layer", f.layer, "m,k[,selected|averaged] or 'averaged'");
  cmd.add_option("--multipliers", f.multipliers, "window sizes relative to the input resolution")
      ->delimiter(',');
  cmd.add_option("--high-res", f.high_res, "tile images larger than --high-res-limit (true/false)");
  cmd.add_option("--high-res-limit", f.high_res_limit, "largest tile side in pixels");
  cmd.add_option("--eps", f.eps, "relative-attention denominator floor");
  cmd.add_option("--input-res", f.input_res, "model input resolution override");
  cmd.add_option("--metric", f.metric, "vqa | exact");
  cmd.add_option("--parallelism,-j", f.parallelism, "worker count");
  for (auto& [key, value] : f.paths) {
    std::string flag = "--" + key;
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    cmd.add_option(flag, value);
  }
}

// Config file contents overlaid with explicit flags.
std::optional<json> merged_config(const Flags& f, std::string& error) {
  json cfg = json::object();
  std::string path = f.config;
  if (path.empty()) {
    if (const char* env = std::getenv("ZOOMKIT_CONFIG")) path = env;
  }
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) {
      error = "cannot open config file " + path;
      return std::nullopt;
    }
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      error = "config file " + path + " is not valid JSON: " + e.what();
      return std::nullopt;
    }
    if (!cfg.is_object()) {
      error = "config file " + path + " must hold a JSON object";
      return std::nullopt;
    }
  }
  if (f.method) cfg["method"] = *f.method;
  if (f.layer) {
    auto l = parse_layer_flag(*f.layer);
    if (!l) {
      error = "--layer must be 'm,k', 'm,k,mode' or 'averaged'";
      return std::nullopt;
    }
    cfg["layer"] = *l;
  }
  if (f.multipliers) cfg["multipliers"] = *f.multipliers;
  if (f.high_res) cfg["high_res"] = *f.high_res;
  if (f.high_res_limit) cfg["high_res_limit"] = *f.high_res_limit;
  if (f.eps) cfg["eps"] = *f.eps;
  if (f.input_res) cfg["input_res"] = *f.input_res;
  if (f.metric) cfg["metric"] = *f.metric;
  if (f.parallelism) cfg["parallelism"] = *f.parallelism;
  for (const auto& [key, value] : f.paths) {
    if (value) cfg[key] = *value;
  }
  return cfg;
}

int run(const std::string& command, const Flags& f) {
  std::string error;
  const auto cfg = merged_config(f, error);
  if (!cfg) {
    std::fprintf(stderr, "zoomkit %s: %s\n", command.c_str(), error.c_str());
    return kExitInvalidConfig;
  }
  zk_job_report report{};
  const zk_status status = zk_job_run(command.c_str(), cfg->dump().c_str(), &report);
  if (status == ZK_OK || status == ZK_ERR_PARTIAL_FAILURE) {
    std::fprintf(stderr, "zoomkit %s: %zu/%zu records succeeded\n", command.c_str(), report.succeeded,
                 report.total);
    return status == ZK_OK ? kExitOk : kExitFailures;
  }
  std::fprintf(stderr, "zoomkit %s: %s: %s\n", command.c_str(), zk_status_name(status), zk_last_error());
  return status == ZK_ERR_INVALID_CONFIG ? kExitInvalidConfig : kExitFailures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training-free visual cropping toolkit for multimodal LLM attention maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(zk_version()));

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"crop", "compute crop directives (and optional crops and maps) for each record"},
      {"eval", "score predictions and summarize per method and partition"},
      {"ratio", "attention ratio of every layer pair, split by answer correctness"},
      {"partition", "label records small/medium/large by relative bbox size"},
  };
  Flags flags;
  std::string chosen;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_job_flags(*cmd, flags);
    cmd->callback([&chosen, name = s.name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidConfig;
  }
  return run(chosen, flags);
}
