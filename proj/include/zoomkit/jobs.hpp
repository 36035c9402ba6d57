// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

// Batch jobs behind the command-line subcommands.
//
// Directory conventions under `bundles_dir`:
//   <question_id>/                    bundle for the question
//   <question_id>/block_<i>/          per-tile bundles in high-resolution mode
//   generic/<image_id>/               generic-instruction bundle (rel_att)
//   generic/<image_id>/block_<i>/     its per-tile bundles
// Images live at `images_dir/<image_id>.{png,jpg,jpeg,ppm}`. Tiles are
// numbered in the row-major order produced by tile_blocks.
//
// Every job processes records independently on `parallelism` workers and
// writes results in input order. A record that fails is left out of the
// output and reported in the errors file (JSON lines with index,
// question_id, code and message).

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

#include "zoomkit/analysis.hpp"
#include "zoomkit/cropper.hpp"
#include "zoomkit/error.hpp"
#include "zoomkit/importance_map.hpp"
#include "zoomkit/records.hpp"
#include "zoomkit/types.hpp"

namespace zoomkit {

enum class EvalMetric { kVqaScore, kExactMatch };

struct JobConfig {
  MapMethod method = MapMethod::kRelAtt;
  std::optional<LayerChoice> layer;  // unset: per-model default
  std::vector<double> multipliers = default_multipliers();
  bool high_res = false;
  std::int64_t high_res_limit = kDefaultHighResLimit;
  double eps = 1e-8;
  std::optional<std::int64_t> input_res;  // unset: manifest input_resolution
  EvalMetric metric = EvalMetric::kVqaScore;
  int parallelism = 1;

  std::filesystem::path bundles_dir;
  std::filesystem::path images_dir;
  std::filesystem::path records_in;
  std::filesystem::path records_out;
  std::filesystem::path errors_out;   // default: <records_out>.errors.jsonl
  std::filesystem::path summary_out;  // eval/ratio/partition tables (.json, plus .csv)
  std::filesystem::path svg_out;      // optional chart
  std::filesystem::path crops_dir;    // optional resized crops (<question_id>.png)
  std::filesystem::path maps_dir;     // optional importance maps (<question_id>.json)
};

/// Parses a JSON object whose keys mirror JobConfig field names. `layer` is
/// {"m":..,"k":..,"mode":"selected"|"averaged"} or the string "averaged".
/// Throws InvalidConfig.
JobConfig config_from_json(std::string_view json_text, const JobConfig& base = {});

enum class JobKind { kCrop, kEval, kRatio, kPartition };
std::optional<JobKind> parse_job_kind(std::string_view name);

/// Throws InvalidConfig when the job cannot run with this configuration.
void validate_config(JobKind kind, const JobConfig& config);

struct RecordError {
  std::size_t index = 0;
  std::string question_id;
  ErrorCode code = ErrorCode::kOk;
  std::string message;
};

struct JobReport {
  std::size_t total = 0;
  std::size_t succeeded = 0;
  std::vector<RecordError> errors;
};

JobReport run_job(JobKind kind, const JobConfig& config);
JobReport run_crop(const JobConfig& config);
JobReport run_eval(const JobConfig& config);
JobReport run_ratio(const JobConfig& config);
JobReport run_partition(const JobConfig& config);

// Building blocks, usable without touching the record files.

/// Importance map for one record according to config.method, tiling the
/// image when high-resolution mode applies. `layer_used` receives the
/// resolved layer choice.
ImportanceMap build_importance_map(const JobConfig& config, const EvalRecord& record,
                                   LayerChoice* layer_used = nullptr);

CropDirective compute_crop(const JobConfig& config, const EvalRecord& record,
                           ImportanceMap* map_out = nullptr);

struct MethodMean {
  std::string method;
  double mean = 0.0;
  std::size_t n = 0;
};

struct EvalSummary {
  std::string metric;
  std::vector<MethodMean> overall;
  std::vector<std::pair<std::string, std::vector<MethodMean>>> by_partition;
};

/// Scores one record in place ("original" from prediction, "cropped" from
/// prediction_cropped). Throws MissingPredictions / DegenerateInput.
void score_record(EvalRecord& record, EvalMetric metric);

EvalSummary summarize_scores(std::span<const EvalRecord> scored, EvalMetric metric);

/// Attention ratio of the relative-attention map for every (m, k) of one
/// record, indexed m + k * L.
std::vector<double> record_layer_ratios(const JobConfig& config, const EvalRecord& record,
                                        std::int64_t* num_layers = nullptr,
                                        std::int64_t* connector_layers = nullptr);

/// Mean/CI per (m, k) and split. `correct` is unset for records without a
/// scorable prediction; those only count toward the "all" split.
std::vector<RatioStat> aggregate_ratio_table(std::span<const std::vector<double>> per_record,
                                             std::span<const std::optional<bool>> correct,
                                             std::int64_t num_layers, std::int64_t connector_layers);

std::string eval_summary_json(const EvalSummary& summary);
std::string eval_summary_csv(const EvalSummary& summary);
std::string ratio_table_json(std::span<const RatioStat> table);
std::string ratio_table_csv(std::span<const RatioStat> table);

std::string ratio_curve_svg(std::span<const RatioStat> table);
std::string eval_bars_svg(const EvalSummary& summary);

}  // namespace zoomkit
