// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/jobs.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "zoomkit/attention.hpp"
#include "zoomkit/exchange.hpp"
#include "zoomkit/image.hpp"
#include "zoomkit/saliency.hpp"

namespace zoomkit {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (threads <= 1) {
    drain();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(drain);
}

[[noreturn]] void bad_config(const std::string& message) { fail(ErrorCode::kInvalidConfig, message); }

// Runs `fn` per record, capturing failures. Returns per-index success flags.
template <typename Fn>
std::vector<bool> for_each_record(const JobConfig& cfg, const std::vector<EvalRecord>& records,
                                  JobReport& report, Fn&& fn) {
  std::vector<bool> ok(records.size(), false);
  std::vector<std::optional<RecordError>> errors(records.size());
  parallel_for(records.size(), cfg.parallelism, [&](std::size_t i) {
    try {
      fn(i);
      ok[i] = true;
    } catch (const Error& e) {
      errors[i] = RecordError{i, records[i].question_id, e.code(), e.what()};
    } catch (const std::exception& e) {
      errors[i] = RecordError{i, records[i].question_id, ErrorCode::kIoFailure, e.what()};
    }
  });
  report.total = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (ok[i]) {
      ++report.succeeded;
    } else {
      report.errors.push_back(*errors[i]);
    }
  }
  return ok;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIoFailure, "write failed for " + path.string());
}

void write_errors(const JobConfig& cfg, const JobReport& report, const fs::path& fallback) {
  fs::path path = cfg.errors_out;
  if (path.empty()) {
    if (fallback.empty()) return;
    path = fallback;
    path += ".errors.jsonl";
  }
  std::string text;
  for (const auto& e : report.errors) {
    json j;
    j["index"] = e.index;
    j["question_id"] = e.question_id;
    j["code"] = error_code_name(e.code);
    j["message"] = e.message;
    text += j.dump() + "\n";
  }
  write_text(path, text);
}

void write_output_records(const std::vector<EvalRecord>& records, const std::vector<bool>& ok,
                          const fs::path& path) {
  std::vector<EvalRecord> kept;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (ok[i]) kept.push_back(records[i]);
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_records(kept, path);
}

fs::path with_extension(fs::path p, const char* ext) {
  p.replace_extension(ext);
  return p;
}

std::string number(double v) { return json(v).dump(); }

fs::path question_dir(const JobConfig& cfg, const EvalRecord& r) { return cfg.bundles_dir / r.question_id; }
fs::path generic_dir(const JobConfig& cfg, const EvalRecord& r) {
  return cfg.bundles_dir / "generic" / r.image_id;
}
fs::path block_dir(const fs::path& base, std::size_t i) { return base / ("block_" + std::to_string(i)); }

struct Geometry {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::optional<std::int64_t> input_res;
  std::optional<RunManifest> manifest;
};

std::optional<Image> load_record_image(const JobConfig& cfg, const EvalRecord& r, bool required) {
  if (!cfg.images_dir.empty()) {
    const fs::path p = find_image(cfg.images_dir, r.image_id);
    if (!p.empty()) return read_image(p);
  }
  if (required) fail(ErrorCode::kIoFailure, "no image found for image_id '" + r.image_id + "'");
  return std::nullopt;
}

Geometry resolve_geometry(const JobConfig& cfg, const EvalRecord& r, const Image* image) {
  Geometry g;
  const fs::path qdir = question_dir(cfg, r);
  if (!cfg.bundles_dir.empty() && fs::exists(qdir / "manifest.json")) {
    g.manifest = load_manifest(qdir);
    g.width = g.manifest->image_width;
    g.height = g.manifest->image_height;
    g.input_res = g.manifest->input_resolution;
  }
  std::optional<Image> loaded;
  if (!image && !g.manifest) {
    loaded = load_record_image(cfg, r, true);
    image = &*loaded;
  }
  if (image) {
    if (g.manifest && (image->width != g.width || image->height != g.height)) {
      fail(ErrorCode::kDimensionMismatch, "image is " + std::to_string(image->width) + "x" +
                                              std::to_string(image->height) + " but manifest says " +
                                              std::to_string(g.width) + "x" + std::to_string(g.height));
    }
    g.width = image->width;
    g.height = image->height;
  }
  if (cfg.input_res) g.input_res = cfg.input_res;
  return g;
}

LayerChoice resolve_layer(const JobConfig& cfg, const RunManifest& m) {
  if (cfg.layer) return *cfg.layer;
  if (auto d = default_layer_choice_for(m.model_id)) return *d;
  fail(ErrorCode::kInvalidArgument,
       "no layer configured and no default for model '" + m.model_id + "'");
}

// Map of one bundle directory (a whole image or one tile).
ImportanceMap map_for_directory(const JobConfig& cfg, const fs::path& qdir, const fs::path& gdir,
                                const Image* image, LayerChoice* layer_used,
                                std::optional<std::int64_t>* input_res) {
  const AttentionBundle q = load_bundle(qdir);
  if (input_res && !*input_res) *input_res = q.manifest.input_resolution;
  if (cfg.method == MapMethod::kPureGrad) {
    if (!q.input_grad) fail(ErrorCode::kMissingGradients, qdir.string() + " has no input_grad");
    if (!image) fail(ErrorCode::kIoFailure, "pure_grad needs the image");
    if (layer_used) *layer_used = cfg.layer.value_or(LayerChoice{});
    return pure_grad_importance(*image, *q.input_grad, q.manifest.patch_grid);
  }
  const LayerChoice layer = resolve_layer(cfg, q.manifest);
  if (layer_used) *layer_used = layer;
  switch (cfg.method) {
    case MapMethod::kRelAtt: {
      if (!fs::exists(gdir / "manifest.json")) {
        fail(ErrorCode::kMissingGenericBundle, "no generic bundle at " + gdir.string());
      }
      const AttentionBundle g = load_bundle(gdir);
      return relative_attention(q, g, layer, cfg.eps);
    }
    case MapMethod::kGradAtt: return grad_weighted_attention(q, layer);
    case MapMethod::kRawAnswerToImage: return answer_to_image(q, layer);
    default: fail(ErrorCode::kInvalidArgument, "method has no importance map");
  }
}

ImportanceMap build_map_impl(const JobConfig& cfg, const EvalRecord& r, const Geometry& geo,
                             const Image* image, LayerChoice* layer_used,
                             std::optional<std::int64_t>* input_res) {
  const fs::path qdir = question_dir(cfg, r);
  const fs::path gdir = generic_dir(cfg, r);
  if (cfg.high_res && std::max(geo.width, geo.height) > cfg.high_res_limit) {
    const auto blocks = tile_blocks(geo.width, geo.height, cfg.high_res_limit);
    std::vector<ImportanceMap> maps;
    maps.reserve(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      std::optional<Image> tile;
      if (image) tile = crop_pixels(*image, blocks[i].x, blocks[i].y, blocks[i].w, blocks[i].h);
      ImportanceMap m = map_for_directory(cfg, block_dir(qdir, i), block_dir(gdir, i),
                                          tile ? &*tile : nullptr, i == 0 ? layer_used : nullptr,
                                          input_res);
      maps.push_back(std::move(m));
    }
    return stitch_maps(blocks, maps);
  }
  return map_for_directory(cfg, qdir, gdir, image, layer_used, input_res);
}

void check_record_ids(const EvalRecord& r) {
  auto safe = [](const std::string& id) {
    return !id.empty() && id != "." && id != ".." && id.find('/') == std::string::npos &&
           id.find('\\') == std::string::npos;
  };
  if (!safe(r.question_id) || !safe(r.image_id)) {
    fail(ErrorCode::kInvalidArgument, "question_id and image_id must be plain path components");
  }
}

std::vector<EvalRecord> load_input(const JobConfig& cfg) { return read_records(cfg.records_in); }

std::string metric_name(EvalMetric m) { return m == EvalMetric::kVqaScore ? "vqa" : "exact"; }

}  // namespace

std::optional<JobKind> parse_job_kind(std::string_view name) {
  if (name == "crop") return JobKind::kCrop;
  if (name == "eval") return JobKind::kEval;
  if (name == "ratio") return JobKind::kRatio;
  if (name == "partition") return JobKind::kPartition;
  return std::nullopt;
}

JobConfig config_from_json(std::string_view json_text, const JobConfig& base) {
  JobConfig cfg = base;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    bad_config(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad_config("config must be a JSON object");
  static const std::vector<std::string> kKnown = {
      "method", "layer", "multipliers", "high_res", "high_res_limit", "eps", "input_res",
      "metric", "parallelism", "bundles_dir", "images_dir", "records_in", "records_out",
      "errors_out", "summary_out", "svg_out", "crops_dir", "maps_dir"};
  try {
    for (const auto& [key, value] : j.items()) {
      if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
        bad_config("unknown config key '" + key + "'");
      }
      if (value.is_null()) continue;
      if (key == "method") {
        auto m = parse_method(value.get<std::string>());
        if (!m || *m == MapMethod::kRawAnswerToImage) bad_config("unknown method '" + value.get<std::string>() + "'");
        cfg.method = *m;
      } else if (key == "layer") {
        LayerChoice l;
        if (value.is_string()) {
          if (value.get<std::string>() != "averaged") bad_config("layer must be an object or \"averaged\"");
          l.mode = LayerMode::kAveraged;
        } else {
          l.m = value.value("m", std::int64_t{0});
          l.k = value.value("k", std::int64_t{0});
          auto mode = parse_layer_mode(value.value("mode", std::string("selected")));
          if (!mode) bad_config("layer mode must be 'selected' or 'averaged'");
          l.mode = *mode;
        }
        cfg.layer = l;
      } else if (key == "multipliers") {
        cfg.multipliers = value.get<std::vector<double>>();
      } else if (key == "high_res") {
        cfg.high_res = value.get<bool>();
      } else if (key == "high_res_limit") {
        cfg.high_res_limit = value.get<std::int64_t>();
      } else if (key == "eps") {
        cfg.eps = value.get<double>();
      } else if (key == "input_res") {
        cfg.input_res = value.get<std::int64_t>();
      } else if (key == "metric") {
        const auto name = value.get<std::string>();
        if (name == "vqa") {
          cfg.metric = EvalMetric::kVqaScore;
        } else if (name == "exact") {
          cfg.metric = EvalMetric::kExactMatch;
        } else {
          bad_config("metric must be 'vqa' or 'exact'");
        }
      } else if (key == "parallelism") {
        cfg.parallelism = value.get<int>();
      } else {
        const fs::path p = value.get<std::string>();
        if (key == "bundles_dir") cfg.bundles_dir = p;
        else if (key == "images_dir") cfg.images_dir = p;
        else if (key == "records_in") cfg.records_in = p;
        else if (key == "records_out") cfg.records_out = p;
        else if (key == "errors_out") cfg.errors_out = p;
        else if (key == "summary_out") cfg.summary_out = p;
        else if (key == "svg_out") cfg.svg_out = p;
        else if (key == "crops_dir") cfg.crops_dir = p;
        else if (key == "maps_dir") cfg.maps_dir = p;
      }
    }
  } catch (const json::exception& e) {
    bad_config(std::string("config has a value of the wrong type: ") + e.what());
  }
  return cfg;
}

void validate_config(JobKind kind, const JobConfig& cfg) {
  if (cfg.parallelism < 1) bad_config("parallelism must be >= 1");
  if (cfg.records_in.empty()) bad_config("records_in is required");
  if (!fs::exists(cfg.records_in)) bad_config("records_in does not exist: " + cfg.records_in.string());
  if (cfg.multipliers.empty()) bad_config("multipliers must not be empty");
  for (double m : cfg.multipliers) {
    if (!(m > 0.0)) bad_config("multipliers must be positive");
  }
  if (!(cfg.eps > 0.0)) bad_config("eps must be positive");
  if (cfg.high_res_limit < 1) bad_config("high_res_limit must be positive");
  if (cfg.input_res && *cfg.input_res < 1) bad_config("input_res must be positive");
  if (cfg.layer && cfg.layer->mode == LayerMode::kSelected && (cfg.layer->m < 0 || cfg.layer->k < 0)) {
    bad_config("layer indices must be nonnegative");
  }
  switch (kind) {
    case JobKind::kCrop:
      if (cfg.records_out.empty()) bad_config("records_out is required");
      if (cfg.method != MapMethod::kHumanCrop && cfg.bundles_dir.empty()) {
        bad_config("bundles_dir is required for method " + std::string(method_name(cfg.method)));
      }
      if (cfg.method == MapMethod::kPureGrad && cfg.images_dir.empty()) {
        bad_config("images_dir is required for pure_grad");
      }
      if (cfg.method == MapMethod::kHumanCrop && cfg.bundles_dir.empty() && cfg.images_dir.empty()) {
        bad_config("human_crop needs bundles_dir or images_dir to know image sizes");
      }
      if (!cfg.crops_dir.empty() && cfg.images_dir.empty()) bad_config("crops_dir needs images_dir");
      break;
    case JobKind::kEval:
      if (cfg.records_out.empty()) bad_config("records_out is required");
      break;
    case JobKind::kRatio:
      if (cfg.bundles_dir.empty()) bad_config("bundles_dir is required");
      if (cfg.summary_out.empty()) bad_config("summary_out is required");
      break;
    case JobKind::kPartition:
      if (cfg.records_out.empty()) bad_config("records_out is required");
      if (cfg.bundles_dir.empty() && cfg.images_dir.empty()) {
        bad_config("bundles_dir or images_dir is required to know image sizes");
      }
      break;
  }
}

ImportanceMap build_importance_map(const JobConfig& cfg, const EvalRecord& r, LayerChoice* layer_used) {
  check_record_ids(r);
  std::optional<Image> image = load_record_image(cfg, r, cfg.method == MapMethod::kPureGrad);
  const Geometry geo = resolve_geometry(cfg, r, image ? &*image : nullptr);
  std::optional<std::int64_t> input_res = geo.input_res;
  return build_map_impl(cfg, r, geo, image ? &*image : nullptr, layer_used, &input_res);
}

namespace {

CropDirective compute_crop_impl(const JobConfig& cfg, const EvalRecord& r, const Image* image,
                                ImportanceMap* map_out) {
  const Geometry geo = resolve_geometry(cfg, r, image);
  CropDirective d;
  d.method = cfg.method;
  std::optional<std::int64_t> input_res = geo.input_res;
  if (cfg.method == MapMethod::kHumanCrop) {
    if (!r.gt_bbox) fail(ErrorCode::kDegenerateInput, "human_crop needs gt_bbox");
    d.window = expand_to_square(*r.gt_bbox, geo.width, geo.height);
    d.layer = cfg.layer.value_or(LayerChoice{});
  } else {
    ImportanceMap map = build_map_impl(cfg, r, geo, image, &d.layer, &input_res);
    if (!input_res) fail(ErrorCode::kNonPositiveResolution, "input resolution unknown");
    const BBox box = select_bbox(map, geo.width, geo.height, *input_res, cfg.multipliers);
    d.window = expand_to_square(box, geo.width, geo.height);
    if (map_out) *map_out = std::move(map);
  }
  if (!input_res) fail(ErrorCode::kNonPositiveResolution, "input resolution unknown; set input_res");
  d.resize_to = *input_res;
  return d;
}

}  // namespace

CropDirective compute_crop(const JobConfig& cfg, const EvalRecord& r, ImportanceMap* map_out) {
  check_record_ids(r);
  std::optional<Image> image = load_record_image(cfg, r, cfg.method == MapMethod::kPureGrad);
  return compute_crop_impl(cfg, r, image ? &*image : nullptr, map_out);
}

JobReport run_crop(const JobConfig& cfg) {
  validate_config(JobKind::kCrop, cfg);
  std::vector<EvalRecord> records = load_input(cfg);
  if (!cfg.crops_dir.empty()) fs::create_directories(cfg.crops_dir);
  if (!cfg.maps_dir.empty()) fs::create_directories(cfg.maps_dir);
  JobReport report;
  const auto ok = for_each_record(cfg, records, report, [&](std::size_t i) {
    EvalRecord& r = records[i];
    check_record_ids(r);
    const bool need_image = cfg.method == MapMethod::kPureGrad || !cfg.crops_dir.empty();
    std::optional<Image> image = load_record_image(cfg, r, need_image);
    ImportanceMap map;
    const CropDirective d = compute_crop_impl(cfg, r, image ? &*image : nullptr,
                                              cfg.maps_dir.empty() ? nullptr : &map);
    if (!cfg.crops_dir.empty()) {
      write_image(cfg.crops_dir / (r.question_id + ".png"), crop_and_resize(*image, d.window, d.resize_to));
    }
    if (!cfg.maps_dir.empty() && !map.empty()) {
      write_text(cfg.maps_dir / (r.question_id + ".json"), map_to_json(map) + "\n");
    }
    r.crop = d;
  });
  write_output_records(records, ok, cfg.records_out);
  write_errors(cfg, report, cfg.records_out);
  return report;
}

void score_record(EvalRecord& r, EvalMetric metric) {
  if (!r.prediction) fail(ErrorCode::kMissingPredictions, "record has no prediction");
  if (r.gt_answers.empty()) fail(ErrorCode::kDegenerateInput, "record has no ground-truth answers");
  auto score = [&](const std::string& pred) {
    return metric == EvalMetric::kVqaScore ? vqa_score(pred, r.gt_answers)
                                           : static_cast<double>(exact_match(pred, r.gt_answers.front()));
  };
  r.scores["original"] = score(*r.prediction);
  if (r.prediction_cropped) r.scores["cropped"] = score(*r.prediction_cropped);
}

EvalSummary summarize_scores(std::span<const EvalRecord> scored, EvalMetric metric) {
  auto ordered_methods = [](const std::map<std::string, std::pair<double, std::size_t>>& acc) {
    std::vector<MethodMean> out;
    auto emit = [&](const std::string& name) {
      auto it = acc.find(name);
      if (it != acc.end()) out.push_back({name, it->second.first / static_cast<double>(it->second.second), it->second.second});
    };
    emit("original");
    emit("cropped");
    for (const auto& [name, v] : acc) {
      if (name != "original" && name != "cropped") emit(name);
    }
    return out;
  };
  std::map<std::string, std::pair<double, std::size_t>> overall;
  std::map<Partition, std::map<std::string, std::pair<double, std::size_t>>> parts;
  for (const auto& r : scored) {
    for (const auto& [name, v] : r.scores) {
      overall[name].first += v;
      ++overall[name].second;
      if (r.partition) {
        parts[*r.partition][name].first += v;
        ++parts[*r.partition][name].second;
      }
    }
  }
  EvalSummary s;
  s.metric = metric_name(metric);
  s.overall = ordered_methods(overall);
  for (const auto& [p, acc] : parts) s.by_partition.emplace_back(std::string(partition_name(p)), ordered_methods(acc));
  return s;
}

std::string eval_summary_json(const EvalSummary& s) {
  auto methods = [](const std::vector<MethodMean>& v) {
    json o = json::object();
    for (const auto& m : v) o[m.method] = {{"mean", m.mean}, {"n", m.n}};
    return o;
  };
  json j;
  j["metric"] = s.metric;
  j["overall"] = methods(s.overall);
  j["by_partition"] = json::object();
  for (const auto& [p, v] : s.by_partition) j["by_partition"][p] = methods(v);
  return j.dump(2) + "\n";
}

std::string eval_summary_csv(const EvalSummary& s) {
  std::string out = "group,method,mean,n\n";
  for (const auto& m : s.overall) out += "overall," + m.method + "," + number(m.mean) + "," + std::to_string(m.n) + "\n";
  for (const auto& [p, v] : s.by_partition) {
    for (const auto& m : v) out += p + "," + m.method + "," + number(m.mean) + "," + std::to_string(m.n) + "\n";
  }
  return out;
}

JobReport run_eval(const JobConfig& cfg) {
  validate_config(JobKind::kEval, cfg);
  std::vector<EvalRecord> records = load_input(cfg);
  JobReport report;
  const auto ok = for_each_record(cfg, records, report, [&](std::size_t i) { score_record(records[i], cfg.metric); });
  std::vector<EvalRecord> scored;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (ok[i]) scored.push_back(records[i]);
  }
  write_output_records(records, ok, cfg.records_out);
  write_errors(cfg, report, cfg.records_out);
  const EvalSummary summary = summarize_scores(scored, cfg.metric);
  const fs::path summary_path =
      cfg.summary_out.empty() ? with_extension(cfg.records_out, ".summary.json") : cfg.summary_out;
  write_text(summary_path, eval_summary_json(summary));
  write_text(with_extension(summary_path, ".csv"), eval_summary_csv(summary));
  if (!cfg.svg_out.empty()) write_text(cfg.svg_out, eval_bars_svg(summary));
  return report;
}

std::vector<double> record_layer_ratios(const JobConfig& cfg, const EvalRecord& r,
                                        std::int64_t* num_layers, std::int64_t* connector_layers) {
  check_record_ids(r);
  if (!r.gt_bbox) fail(ErrorCode::kDegenerateInput, "record has no gt_bbox");
  const fs::path gdir = generic_dir(cfg, r);
  if (!fs::exists(gdir / "manifest.json")) {
    fail(ErrorCode::kMissingGenericBundle, "no generic bundle at " + gdir.string());
  }
  const AttentionBundle q = load_bundle(question_dir(cfg, r));
  const AttentionBundle g = load_bundle(gdir);
  const std::int64_t layers = q.manifest.num_layers;
  const std::int64_t conn = std::max<std::int64_t>(q.manifest.num_connector_layers, 1);
  if (num_layers) *num_layers = layers;
  if (connector_layers) *connector_layers = conn;
  std::vector<double> ratios(static_cast<std::size_t>(layers * conn));
  for (std::int64_t k = 0; k < conn; ++k) {
    for (std::int64_t m = 0; m < layers; ++m) {
      const ImportanceMap map = relative_attention(q, g, {m, k, LayerMode::kSelected}, cfg.eps);
      ratios[static_cast<std::size_t>(m + k * layers)] =
          attention_ratio(map, *r.gt_bbox, q.manifest.image_width, q.manifest.image_height);
    }
  }
  return ratios;
}

std::vector<RatioStat> aggregate_ratio_table(std::span<const std::vector<double>> per_record,
                                             std::span<const std::optional<bool>> correct,
                                             std::int64_t num_layers, std::int64_t connector_layers) {
  std::vector<RatioStat> table;
  const std::int64_t count = num_layers * connector_layers;
  for (std::int64_t l = 0; l < count; ++l) {
    for (RatioSplit split : {RatioSplit::kCorrect, RatioSplit::kIncorrect, RatioSplit::kAll}) {
      std::vector<double> values;
      for (std::size_t i = 0; i < per_record.size(); ++i) {
        if (split == RatioSplit::kCorrect && correct[i] != std::optional<bool>(true)) continue;
        if (split == RatioSplit::kIncorrect && correct[i] != std::optional<bool>(false)) continue;
        values.push_back(per_record[i][static_cast<std::size_t>(l)]);
      }
      if (values.empty()) continue;
      const MeanCi ci = mean_ci(values);
      table.push_back({l % num_layers, l / num_layers, l, split, ci.mean, ci.half_width, ci.n});
    }
  }
  return table;
}

std::string ratio_table_json(std::span<const RatioStat> table) {
  json rows = json::array();
  for (const auto& s : table) {
    rows.push_back({{"layer_index", s.layer_index},
                    {"m", s.m},
                    {"k", s.k},
                    {"split", split_name(s.split)},
                    {"mean", s.mean},
                    {"ci95_half_width", s.ci95_half_width},
                    {"n", s.n}});
  }
  return rows.dump(2) + "\n";
}

std::string ratio_table_csv(std::span<const RatioStat> table) {
  std::string out = "layer_index,m,k,split,mean,ci95_half_width,n\n";
  for (const auto& s : table) {
    out += std::to_string(s.layer_index) + "," + std::to_string(s.m) + "," + std::to_string(s.k) + "," +
           std::string(split_name(s.split)) + "," + number(s.mean) + "," + number(s.ci95_half_width) + "," +
           std::to_string(s.n) + "\n";
  }
  return out;
}

JobReport run_ratio(const JobConfig& cfg) {
  validate_config(JobKind::kRatio, cfg);
  std::vector<EvalRecord> records = load_input(cfg);
  std::vector<std::vector<double>> ratios(records.size());
  std::vector<std::pair<std::int64_t, std::int64_t>> dims(records.size());
  JobReport report;
  auto ok = for_each_record(cfg, records, report, [&](std::size_t i) {
    ratios[i] = record_layer_ratios(cfg, records[i], &dims[i].first, &dims[i].second);
  });

  // All records must share the layer layout of the first successful one.
  std::optional<std::pair<std::int64_t, std::int64_t>> layout;
  std::vector<std::vector<double>> kept;
  std::vector<std::optional<bool>> correct;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!ok[i]) continue;
    if (!layout) layout = dims[i];
    if (dims[i] != *layout) {
      ok[i] = false;
      --report.succeeded;
      report.errors.push_back({i, records[i].question_id, ErrorCode::kGeometryMismatch,
                               "layer layout differs from the first record"});
      continue;
    }
    kept.push_back(std::move(ratios[i]));
    const auto& r = records[i];
    std::optional<bool> c;
    if (r.prediction && !r.gt_answers.empty()) {
      const double s = cfg.metric == EvalMetric::kVqaScore
                           ? vqa_score(*r.prediction, r.gt_answers)
                           : static_cast<double>(exact_match(*r.prediction, r.gt_answers.front()));
      c = s > 0.0;
    }
    correct.push_back(c);
  }
  std::sort(report.errors.begin(), report.errors.end(),
            [](const RecordError& a, const RecordError& b) { return a.index < b.index; });

  std::vector<RatioStat> table;
  if (layout) table = aggregate_ratio_table(kept, correct, layout->first, layout->second);
  write_text(cfg.summary_out, ratio_table_json(table));
  write_text(with_extension(cfg.summary_out, ".csv"), ratio_table_csv(table));
  if (!cfg.svg_out.empty()) write_text(cfg.svg_out, ratio_curve_svg(table));
  write_errors(cfg, report, cfg.summary_out);
  return report;
}

JobReport run_partition(const JobConfig& cfg) {
  validate_config(JobKind::kPartition, cfg);
  std::vector<EvalRecord> records = load_input(cfg);
  JobReport report;
  const auto ok = for_each_record(cfg, records, report, [&](std::size_t i) {
    EvalRecord& r = records[i];
    check_record_ids(r);
    if (!r.gt_bbox) fail(ErrorCode::kDegenerateInput, "record has no gt_bbox");
    const Geometry geo = resolve_geometry(cfg, r, nullptr);
    r.partition = size_partition(*r.gt_bbox, geo.width, geo.height);
  });
  write_output_records(records, ok, cfg.records_out);
  write_errors(cfg, report, cfg.records_out);
  std::map<Partition, std::size_t> counts;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (ok[i]) ++counts[*records[i].partition];
  }
  json summary;
  summary["records"] = report.succeeded;
  summary["counts"] = json::object();
  for (Partition p : {Partition::kSmall, Partition::kMedium, Partition::kLarge}) {
    summary["counts"][std::string(partition_name(p))] = counts[p];
  }
  const fs::path summary_path =
      cfg.summary_out.empty() ? with_extension(cfg.records_out, ".summary.json") : cfg.summary_out;
  write_text(summary_path, summary.dump(2) + "\n");
  std::string csv = "partition,count\n";
  for (Partition p : {Partition::kSmall, Partition::kMedium, Partition::kLarge}) {
    csv += std::string(partition_name(p)) + "," + std::to_string(counts[p]) + "\n";
  }
  write_text(with_extension(summary_path, ".csv"), csv);
  return report;
}

JobReport run_job(JobKind kind, const JobConfig& cfg) {
  switch (kind) {
    case JobKind::kCrop: return run_crop(cfg);
    case JobKind::kEval: return run_eval(cfg);
    case JobKind::kRatio: return run_ratio(cfg);
    case JobKind::kPartition: return run_partition(cfg);
  }
  bad_config("unknown job");
}

}  // namespace zoomkit
