// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zoomkit/image.hpp"
#include "zoomkit/importance_map.hpp"
#include "zoomkit/types.hpp"

namespace zoomkit {

inline constexpr std::int64_t kDefaultHighResLimit = 1024;

/// Window sizes as multiples of the model input resolution.
std::vector<double> default_multipliers();

/// Per-multiplier outcome of the window search, in map-cell units.
struct WindowCandidate {
  double multiplier = 0.0;
  std::int64_t side_px = 0;
  std::int64_t cells_w = 0;
  std::int64_t cells_h = 0;
  std::int64_t cell_x = 0;
  std::int64_t cell_y = 0;
  double internal_sum = 0.0;
  double score = 0.0;
  BBox pixels;
};

/// Multi-scale sliding-window search.
///
/// For each multiplier a, the window side is round(a * input_res) pixels
/// (clamped to the image's shorter side), converted per axis to
/// max(1, round(side / cell size)) cells. The window slides at one-cell
/// stride; its best position maximizes the internal sum (ties: topmost, then
/// leftmost). Its score is that sum minus the mean sum of the existing
/// one-cell-shifted positions (up, down, left, right); with no such position
/// the score is the sum itself. The highest score wins, ties going to the
/// smaller multiplier.
std::vector<WindowCandidate> score_windows(const ImportanceMap& map, std::int64_t image_w,
                                           std::int64_t image_h, std::int64_t input_res,
                                           std::span<const double> multipliers);

BBox select_bbox(const ImportanceMap& map, std::int64_t image_w, std::int64_t image_h,
                 std::int64_t input_res, std::span<const double> multipliers);

/// Smallest square around the bbox center with side max(w, h) (clamped to the
/// image's shorter side), translated minimally to lie inside the image. The
/// input is first clipped to the image.
BBox expand_to_square(const BBox& bbox, std::int64_t image_w, std::int64_t image_h);

/// Crops `square` and resizes it bilinearly to resize_to x resize_to.
/// Sampling is corner-aligned: output pixel i reads source coordinate
/// i * (side - 1) / (resize_to - 1); a 1-pixel output reads the center.
/// Channels are rounded to nearest.
Image crop_and_resize(const Image& image, const BBox& square, std::int64_t resize_to);

/// Splits the image into a grid of blocks no larger than `limit` per side.
/// Blocks are returned row-major; sizes along an axis differ by at most one
/// pixel.
std::vector<BBox> tile_blocks(std::int64_t image_w, std::int64_t image_h,
                              std::int64_t limit = kDefaultHighResLimit);

/// Reassembles per-block maps (block-local or already placed) into one map
/// over the full image.
ImportanceMap stitch_maps(std::span<const BBox> blocks, std::span<const ImportanceMap> maps);

}  // namespace zoomkit
