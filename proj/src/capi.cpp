// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/zoomkit.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "zoomkit/analysis.hpp"
#include "zoomkit/attention.hpp"
#include "zoomkit/cropper.hpp"
#include "zoomkit/exchange.hpp"
#include "zoomkit/image.hpp"
#include "zoomkit/jobs.hpp"
#include "zoomkit/saliency.hpp"

struct zk_bundle {
  zoomkit::AttentionBundle value;
};
struct zk_map {
  zoomkit::ImportanceMap value;
};
struct zk_image {
  zoomkit::Image value;
};

namespace {

thread_local std::string g_last_error;

zk_status set_error(zk_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
zk_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const zoomkit::Error& e) {
    return set_error(static_cast<zk_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ZK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ZK_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(ZK_ERR_INTERNAL, "unknown exception");
  }
}

zk_status null_argument(const char* name) {
  return set_error(ZK_ERR_INVALID_ARGUMENT, (std::string(name) + " must not be NULL").c_str());
}

zoomkit::LayerChoice to_layer(zk_layer l) {
  return {l.m, l.k, l.mode == ZK_LAYER_AVERAGED ? zoomkit::LayerMode::kAveraged : zoomkit::LayerMode::kSelected};
}

zoomkit::BBox to_bbox(zk_bbox b) { return {b.x, b.y, b.w, b.h}; }
zk_bbox from_bbox(const zoomkit::BBox& b) { return {b.x, b.y, b.w, b.h}; }

zk_status emit_map(zoomkit::ImportanceMap map, zk_map** out) {
  *out = new zk_map{std::move(map)};
  return ZK_OK;
}

}  // namespace

extern "C" {

const char* zk_version(void) { return "0.1.0"; }

const char* zk_status_name(zk_status status) {
  switch (status) {
    case ZK_ERR_PARTIAL_FAILURE: return "PartialFailure";
    case ZK_ERR_INTERNAL: return "Internal";
    default: break;
  }
  // error_code_name returns views of string literals.
  return zoomkit::error_code_name(static_cast<zoomkit::ErrorCode>(status)).data();
}

const char* zk_last_error(void) { return g_last_error.c_str(); }

zk_status zk_bundle_load(const char* dir, zk_bundle** out) {
  if (!dir) return null_argument("dir");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new zk_bundle{zoomkit::load_bundle(dir)};
    return ZK_OK;
  });
}

zk_status zk_bundle_save(const zk_bundle* bundle, const char* dir) {
  if (!bundle) return null_argument("bundle");
  if (!dir) return null_argument("dir");
  return guarded([&] {
    zoomkit::write_bundle(dir, bundle->value);
    return ZK_OK;
  });
}

zk_status zk_bundle_info_get(const zk_bundle* bundle, zk_bundle_info* out) {
  if (!bundle) return null_argument("bundle");
  if (!out) return null_argument("out");
  const auto& b = bundle->value;
  const auto& m = b.manifest;
  *out = zk_bundle_info{m.num_layers,
                        m.num_heads,
                        m.num_connector_layers,
                        m.num_connector_heads,
                        m.num_image_tokens,
                        m.patch_grid,
                        m.input_resolution,
                        m.image_width,
                        m.image_height,
                        m.is_generic_instruction ? 1 : 0,
                        b.ans_attn_grad ? 1 : 0,
                        b.conn_attn ? 1 : 0,
                        b.conn_attn_grad ? 1 : 0,
                        b.input_grad ? 1 : 0};
  return ZK_OK;
}

void zk_bundle_free(zk_bundle* bundle) { delete bundle; }

zk_status zk_map_raw(const zk_bundle* bundle, zk_layer layer, zk_map** out) {
  if (!bundle) return null_argument("bundle");
  if (!out) return null_argument("out");
  return guarded([&] { return emit_map(zoomkit::answer_to_image(bundle->value, to_layer(layer)), out); });
}

zk_status zk_map_rel_att(const zk_bundle* question, const zk_bundle* generic, zk_layer layer, double eps,
                         zk_map** out) {
  if (!question) return null_argument("question");
  if (!generic) return null_argument("generic");
  if (!out) return null_argument("out");
  return guarded([&] {
    return emit_map(zoomkit::relative_attention(question->value, generic->value, to_layer(layer), eps), out);
  });
}

zk_status zk_map_grad_att(const zk_bundle* bundle, zk_layer layer, zk_map** out) {
  if (!bundle) return null_argument("bundle");
  if (!out) return null_argument("out");
  return guarded(
      [&] { return emit_map(zoomkit::grad_weighted_attention(bundle->value, to_layer(layer)), out); });
}

zk_status zk_map_pure_grad(const zk_image* image, const zk_bundle* bundle, zk_map** out) {
  if (!image) return null_argument("image");
  if (!bundle) return null_argument("bundle");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto& b = bundle->value;
    if (!b.input_grad) zoomkit::fail(zoomkit::ErrorCode::kMissingGradients, "bundle has no input_grad");
    return emit_map(zoomkit::pure_grad_importance(image->value, *b.input_grad, b.manifest.patch_grid), out);
  });
}

zk_status zk_map_from_values(int64_t rows, int64_t cols, const double* values, double width, double height,
                             zk_map** out) {
  if (!values) return null_argument("values");
  if (!out) return null_argument("out");
  if (rows <= 0 || cols <= 0) return set_error(ZK_ERR_EMPTY_MAP, "map must have at least one cell");
  if (!(width > 0.0) || !(height > 0.0)) {
    return set_error(ZK_ERR_INVALID_ARGUMENT, "map extent must be positive");
  }
  return guarded([&] {
    auto map = zoomkit::ImportanceMap::uniform(rows, cols, width, height);
    map.values.assign(values, values + rows * cols);
    return emit_map(std::move(map), out);
  });
}

zk_status zk_map_shape(const zk_map* map, int64_t* rows, int64_t* cols) {
  if (!map) return null_argument("map");
  if (rows) *rows = map->value.rows;
  if (cols) *cols = map->value.cols;
  return ZK_OK;
}

zk_status zk_map_values(const zk_map* map, double* out, size_t capacity) {
  if (!map) return null_argument("map");
  if (!out) return null_argument("out");
  const auto& v = map->value.values;
  if (capacity < v.size()) return set_error(ZK_ERR_INVALID_ARGUMENT, "output buffer too small");
  std::memcpy(out, v.data(), v.size() * sizeof(double));
  return ZK_OK;
}

zk_status zk_map_edges(const zk_map* map, double* col_edges, size_t col_capacity, double* row_edges,
                       size_t row_capacity) {
  if (!map) return null_argument("map");
  const auto& m = map->value;
  if ((col_edges && col_capacity < m.col_edges.size()) || (row_edges && row_capacity < m.row_edges.size())) {
    return set_error(ZK_ERR_INVALID_ARGUMENT, "output buffer too small");
  }
  if (col_edges) std::memcpy(col_edges, m.col_edges.data(), m.col_edges.size() * sizeof(double));
  if (row_edges) std::memcpy(row_edges, m.row_edges.data(), m.row_edges.size() * sizeof(double));
  return ZK_OK;
}

zk_status zk_map_stitch(const zk_bbox* blocks, const zk_map* const* maps, size_t count, zk_map** out) {
  if (!blocks) return null_argument("blocks");
  if (!maps) return null_argument("maps");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::vector<zoomkit::BBox> b;
    std::vector<zoomkit::ImportanceMap> m;
    for (size_t i = 0; i < count; ++i) {
      if (!maps[i]) zoomkit::fail(zoomkit::ErrorCode::kInvalidArgument, "maps contains NULL");
      b.push_back(to_bbox(blocks[i]));
      m.push_back(maps[i]->value);
    }
    return emit_map(zoomkit::stitch_maps(b, m), out);
  });
}

void zk_map_free(zk_map* map) { delete map; }

zk_status zk_image_load(const char* path, zk_image** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new zk_image{zoomkit::read_image(path)};
    return ZK_OK;
  });
}

zk_status zk_image_save(const zk_image* image, const char* path) {
  if (!image) return null_argument("image");
  if (!path) return null_argument("path");
  return guarded([&] {
    zoomkit::write_image(path, image->value);
    return ZK_OK;
  });
}

zk_status zk_image_size(const zk_image* image, int64_t* width, int64_t* height) {
  if (!image) return null_argument("image");
  if (width) *width = image->value.width;
  if (height) *height = image->value.height;
  return ZK_OK;
}

zk_status zk_image_crop_resize(const zk_image* image, zk_bbox square, int64_t resize_to, zk_image** out) {
  if (!image) return null_argument("image");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new zk_image{zoomkit::crop_and_resize(image->value, to_bbox(square), resize_to)};
    return ZK_OK;
  });
}

void zk_image_free(zk_image* image) { delete image; }

zk_status zk_select_bbox(const zk_map* map, int64_t image_w, int64_t image_h, int64_t input_res,
                         const double* multipliers, size_t multiplier_count, zk_bbox* out) {
  if (!map) return null_argument("map");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::vector<double> mult = multipliers ? std::vector<double>(multipliers, multipliers + multiplier_count)
                                           : zoomkit::default_multipliers();
    *out = from_bbox(zoomkit::select_bbox(map->value, image_w, image_h, input_res, mult));
    return ZK_OK;
  });
}

zk_status zk_expand_to_square(zk_bbox bbox, int64_t image_w, int64_t image_h, zk_bbox* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = from_bbox(zoomkit::expand_to_square(to_bbox(bbox), image_w, image_h));
    return ZK_OK;
  });
}

zk_status zk_tile_blocks(int64_t image_w, int64_t image_h, int64_t limit, zk_bbox* out, size_t capacity,
                         size_t* count) {
  if (!count) return null_argument("count");
  return guarded([&] {
    const auto blocks = zoomkit::tile_blocks(image_w, image_h, limit);
    *count = blocks.size();
    if (out) {
      for (size_t i = 0; i < blocks.size() && i < capacity; ++i) out[i] = from_bbox(blocks[i]);
    }
    return ZK_OK;
  });
}

zk_status zk_size_partition(zk_bbox gt, int64_t image_w, int64_t image_h, zk_partition* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = static_cast<zk_partition>(zoomkit::size_partition(to_bbox(gt), image_w, image_h));
    return ZK_OK;
  });
}

zk_status zk_attention_ratio(const zk_map* map, zk_bbox gt, int64_t image_w, int64_t image_h, double* out) {
  if (!map) return null_argument("map");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = zoomkit::attention_ratio(map->value, to_bbox(gt), image_w, image_h);
    return ZK_OK;
  });
}

zk_status zk_vqa_score(const char* prediction, const char* const* gt_answers, size_t count, double* out) {
  if (!prediction) return null_argument("prediction");
  if (!gt_answers && count > 0) return null_argument("gt_answers");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::vector<std::string> gts;
    for (size_t i = 0; i < count; ++i) {
      if (!gt_answers[i]) zoomkit::fail(zoomkit::ErrorCode::kInvalidArgument, "gt_answers contains NULL");
      gts.emplace_back(gt_answers[i]);
    }
    *out = zoomkit::vqa_score(prediction, gts);
    return ZK_OK;
  });
}

zk_status zk_exact_match(const char* prediction, const char* gt_answer, int* out) {
  if (!prediction) return null_argument("prediction");
  if (!gt_answer) return null_argument("gt_answer");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = zoomkit::exact_match(prediction, gt_answer);
    return ZK_OK;
  });
}

zk_status zk_mean_ci(const double* values, size_t count, double* mean, double* half_width) {
  if (!values && count > 0) return null_argument("values");
  return guarded([&] {
    const auto ci = zoomkit::mean_ci(std::span<const double>(values, count));
    if (mean) *mean = ci.mean;
    if (half_width) *half_width = ci.half_width;
    return ZK_OK;
  });
}

zk_status zk_job_run(const char* command, const char* config_json, zk_job_report* report) {
  if (!command) return null_argument("command");
  if (!config_json) return null_argument("config_json");
  return guarded([&] {
    const auto kind = zoomkit::parse_job_kind(command);
    if (!kind) zoomkit::fail(zoomkit::ErrorCode::kInvalidConfig, std::string("unknown command '") + command + "'");
    const auto config = zoomkit::config_from_json(config_json);
    const auto result = zoomkit::run_job(*kind, config);
    if (report) *report = zk_job_report{result.total, result.succeeded, result.errors.size()};
    if (result.errors.empty()) return ZK_OK;
    return set_error(ZK_ERR_PARTIAL_FAILURE, (std::to_string(result.errors.size()) + " of " +
                                              std::to_string(result.total) + " records failed")
                                                 .c_str());
  });
}

}  // extern "C"
