/* Copyright 2026 The zoomkit Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the zoomkit shared library.
 *
 * Every function returns a zk_status. On failure the out-parameters are left
 * untouched and zk_last_error() returns a message for the calling thread.
 * Objects behind opaque handles are owned by the caller once returned and
 * must be released with the matching *_free function (which accepts NULL).
 */
#ifndef ZOOMKIT_ZOOMKIT_H_
#define ZOOMKIT_ZOOMKIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ZOOMKIT_BUILDING_LIBRARY)
#    define ZK_API __declspec(dllexport)
#  else
#    define ZK_API __declspec(dllimport)
#  endif
#else
#  define ZK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zk_status {
  ZK_OK = 0,
  ZK_ERR_INVALID_ARGUMENT = 1,
  ZK_ERR_IO = 2,
  ZK_ERR_PARSE = 3,
  ZK_ERR_MISSING_MANIFEST = 10,
  ZK_ERR_SHAPE_MISMATCH = 11,
  ZK_ERR_MISSING_MANDATORY_ROLE = 12,
  ZK_ERR_NEGATIVE_ATTENTION = 13,
  ZK_ERR_ATTENTION_MASS_EXCEEDED = 14,
  ZK_ERR_EMPTY_HEAD_AXIS = 20,
  ZK_ERR_TOKEN_GRID_MISMATCH = 21,
  ZK_ERR_LAYER_OUT_OF_RANGE = 22,
  ZK_ERR_GEOMETRY_MISMATCH = 23,
  ZK_ERR_GENERIC_FLAG_MISSING = 24,
  ZK_ERR_MISSING_GRADIENTS = 25,
  ZK_ERR_MISSING_CONNECTOR_ATTENTION = 26,
  ZK_ERR_WRONG_CHANNEL_COUNT = 30,
  ZK_ERR_GRID_SMALLER_THAN_PATCHES = 31,
  ZK_ERR_DIMENSION_MISMATCH = 32,
  ZK_ERR_EMPTY_MAP = 40,
  ZK_ERR_NON_POSITIVE_RESOLUTION = 41,
  ZK_ERR_DEGENERATE_BBOX = 42,
  ZK_ERR_OUT_OF_BOUNDS = 43,
  ZK_ERR_BLOCK_MAP_MISMATCH = 44,
  ZK_ERR_DEGENERATE_INPUT = 50,
  ZK_ERR_EMPTY_INPUT = 51,
  ZK_ERR_MISSING_PREDICTIONS = 52,
  ZK_ERR_MISSING_GENERIC_BUNDLE = 53,
  ZK_ERR_INVALID_CONFIG = 60,
  /* zk_job_run only: the job ran but some records failed. */
  ZK_ERR_PARTIAL_FAILURE = 70,
  ZK_ERR_INTERNAL = 99
} zk_status;

typedef struct zk_bundle zk_bundle;
typedef struct zk_map zk_map;
typedef struct zk_image zk_image;

typedef struct zk_bbox {
  int64_t x, y, w, h;
} zk_bbox;

typedef enum zk_layer_mode { ZK_LAYER_SELECTED = 0, ZK_LAYER_AVERAGED = 1 } zk_layer_mode;

typedef struct zk_layer {
  int64_t m; /* LLM layer */
  int64_t k; /* connector layer, ignored for identity connectors */
  zk_layer_mode mode;
} zk_layer;

typedef struct zk_bundle_info {
  int64_t num_layers, num_heads;
  int64_t num_connector_layers, num_connector_heads;
  int64_t num_image_tokens, patch_grid;
  int64_t input_resolution, image_width, image_height;
  int is_generic_instruction;
  int has_ans_attn_grad, has_conn_attn, has_conn_attn_grad, has_input_grad;
} zk_bundle_info;

typedef enum zk_partition { ZK_SMALL = 0, ZK_MEDIUM = 1, ZK_LARGE = 2 } zk_partition;

typedef struct zk_job_report {
  size_t total;
  size_t succeeded;
  size_t failed;
} zk_job_report;

ZK_API const char* zk_version(void);
ZK_API const char* zk_status_name(zk_status status);
/* Message of the last failure on this thread; "" when none. */
ZK_API const char* zk_last_error(void);

/* Bundles */
ZK_API zk_status zk_bundle_load(const char* dir, zk_bundle** out);
ZK_API zk_status zk_bundle_save(const zk_bundle* bundle, const char* dir);
ZK_API zk_status zk_bundle_info_get(const zk_bundle* bundle, zk_bundle_info* out);
ZK_API void zk_bundle_free(zk_bundle* bundle);

/* Importance maps */
ZK_API zk_status zk_map_raw(const zk_bundle* bundle, zk_layer layer, zk_map** out);
ZK_API zk_status zk_map_rel_att(const zk_bundle* question, const zk_bundle* generic, zk_layer layer,
                                double eps, zk_map** out);
ZK_API zk_status zk_map_grad_att(const zk_bundle* bundle, zk_layer layer, zk_map** out);
ZK_API zk_status zk_map_pure_grad(const zk_image* image, const zk_bundle* bundle, zk_map** out);
/* rows x cols map over a width x height pixel rectangle at the origin. */
ZK_API zk_status zk_map_from_values(int64_t rows, int64_t cols, const double* values, double width,
                                    double height, zk_map** out);
ZK_API zk_status zk_map_shape(const zk_map* map, int64_t* rows, int64_t* cols);
/* Copies rows*cols row-major values; `capacity` is in elements. */
ZK_API zk_status zk_map_values(const zk_map* map, double* out, size_t capacity);
/* Edges have cols+1 (x) and rows+1 (y) entries. */
ZK_API zk_status zk_map_edges(const zk_map* map, double* col_edges, size_t col_capacity,
                              double* row_edges, size_t row_capacity);
ZK_API zk_status zk_map_stitch(const zk_bbox* blocks, const zk_map* const* maps, size_t count,
                               zk_map** out);
ZK_API void zk_map_free(zk_map* map);

/* Images (png, jpeg or binary ppm; png or ppm on save) */
ZK_API zk_status zk_image_load(const char* path, zk_image** out);
ZK_API zk_status zk_image_save(const zk_image* image, const char* path);
ZK_API zk_status zk_image_size(const zk_image* image, int64_t* width, int64_t* height);
ZK_API zk_status zk_image_crop_resize(const zk_image* image, zk_bbox square, int64_t resize_to,
                                      zk_image** out);
ZK_API void zk_image_free(zk_image* image);

/* Cropping geometry. `multipliers` may be NULL for the defaults. */
ZK_API zk_status zk_select_bbox(const zk_map* map, int64_t image_w, int64_t image_h, int64_t input_res,
                                const double* multipliers, size_t multiplier_count, zk_bbox* out);
ZK_API zk_status zk_expand_to_square(zk_bbox bbox, int64_t image_w, int64_t image_h, zk_bbox* out);
/* Writes up to `capacity` blocks; `count` always receives the block count. */
ZK_API zk_status zk_tile_blocks(int64_t image_w, int64_t image_h, int64_t limit, zk_bbox* out,
                                size_t capacity, size_t* count);

/* Analysis */
ZK_API zk_status zk_size_partition(zk_bbox gt, int64_t image_w, int64_t image_h, zk_partition* out);
ZK_API zk_status zk_attention_ratio(const zk_map* map, zk_bbox gt, int64_t image_w, int64_t image_h,
                                    double* out);
ZK_API zk_status zk_vqa_score(const char* prediction, const char* const* gt_answers, size_t count,
                              double* out);
ZK_API zk_status zk_exact_match(const char* prediction, const char* gt_answer, int* out);
ZK_API zk_status zk_mean_ci(const double* values, size_t count, double* mean, double* half_width);

/* Batch jobs. `command` is "crop", "eval", "ratio" or "partition";
 * `config_json` is a JSON object with JobConfig keys. Returns ZK_OK,
 * ZK_ERR_PARTIAL_FAILURE when some records failed, or the fatal error. */
ZK_API zk_status zk_job_run(const char* command, const char* config_json, zk_job_report* report);

#ifdef __cplusplus
}
#endif

#endif /* ZOOMKIT_ZOOMKIT_H_ */
