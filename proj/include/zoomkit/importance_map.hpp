// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zoomkit/types.hpp"

namespace zoomkit {

/// Nonnegative relevance grid tied to image pixels.
///
/// Cell (r, c) covers [col_edges[c], col_edges[c+1]) x [row_edges[r],
/// row_edges[r+1]) in image pixel coordinates. A map computed for one image
/// has uniform edges; a map stitched from tiles carries each tile's own cell
/// size, so edges are only piecewise uniform.
struct ImportanceMap {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> values;     // row-major, rows * cols
  std::vector<double> col_edges;  // cols + 1 entries, increasing
  std::vector<double> row_edges;  // rows + 1 entries, increasing
  MapMethod source = MapMethod::kRawAnswerToImage;

  /// rows x cols zero grid whose cells evenly split a width x height
  /// rectangle placed at (origin_x, origin_y).
  static ImportanceMap uniform(std::int64_t rows, std::int64_t cols, double width,
                               double height, double origin_x = 0.0, double origin_y = 0.0);

  bool empty() const { return rows == 0 || cols == 0; }
  double& at(std::int64_t r, std::int64_t c) { return values[static_cast<std::size_t>(r * cols + c)]; }
  double at(std::int64_t r, std::int64_t c) const {
    return values[static_cast<std::size_t>(r * cols + c)];
  }

  double origin_x() const { return col_edges.front(); }
  double origin_y() const { return row_edges.front(); }
  double extent_width() const { return col_edges.back() - col_edges.front(); }
  double extent_height() const { return row_edges.back() - row_edges.front(); }
  // Mean cell size; exact for uniform maps.
  double patch_width() const { return extent_width() / static_cast<double>(cols); }
  double patch_height() const { return extent_height() / static_cast<double>(rows); }

  double sum() const;
  double max() const;

  /// Same map with its pixel geometry shifted by (dx, dy).
  ImportanceMap translated(double dx, double dy) const;
};

/// {"rows","cols","source","col_edges","row_edges","values": [[...], ...]}
std::string map_to_json(const ImportanceMap& map);

}  // namespace zoomkit
