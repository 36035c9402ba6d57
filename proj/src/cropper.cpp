// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/cropper.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "zoomkit/error.hpp"

namespace zoomkit {

namespace {

// Summed-area table with a zero guard row and column.
class WindowSums {
 public:
  explicit WindowSums(const ImportanceMap& map)
      : cols_(map.cols), table_(static_cast<std::size_t>((map.rows + 1) * (map.cols + 1)), 0.0) {
    for (std::int64_t r = 0; r < map.rows; ++r) {
      for (std::int64_t c = 0; c < map.cols; ++c) {
        cell(r + 1, c + 1) = map.at(r, c) + cell(r, c + 1) + cell(r + 1, c) - cell(r, c);
      }
    }
  }

  double sum(std::int64_t x, std::int64_t y, std::int64_t w, std::int64_t h) const {
    return cell(y + h, x + w) - cell(y, x + w) - cell(y + h, x) + cell(y, x);
  }

 private:
  double& cell(std::int64_t r, std::int64_t c) { return table_[static_cast<std::size_t>(r * (cols_ + 1) + c)]; }
  double cell(std::int64_t r, std::int64_t c) const {
    return table_[static_cast<std::size_t>(r * (cols_ + 1) + c)];
  }

  std::int64_t cols_;
  std::vector<double> table_;
};

std::int64_t round_to_int(double v) { return static_cast<std::int64_t>(std::llround(v)); }

bool near(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); }

}  // namespace

std::vector<double> default_multipliers() { return {1.0, 1.2, 1.4, 1.6, 1.8, 2.0}; }

std::vector<WindowCandidate> score_windows(const ImportanceMap& map, std::int64_t image_w,
                                           std::int64_t image_h, std::int64_t input_res,
                                           std::span<const double> multipliers) {
  if (map.empty()) fail(ErrorCode::kEmptyMap, "importance map is empty");
  if (input_res <= 0 || image_w <= 0 || image_h <= 0) {
    fail(ErrorCode::kNonPositiveResolution, "input resolution and image size must be positive");
  }
  if (multipliers.empty()) fail(ErrorCode::kInvalidArgument, "no window multipliers given");

  const WindowSums sums(map);
  const double cell_w = map.patch_width();
  const double cell_h = map.patch_height();

  std::vector<WindowCandidate> out;
  out.reserve(multipliers.size());
  for (double alpha : multipliers) {
    if (!(alpha > 0.0)) fail(ErrorCode::kInvalidArgument, "window multipliers must be positive");
    WindowCandidate cand;
    cand.multiplier = alpha;
    cand.side_px = std::clamp<std::int64_t>(round_to_int(alpha * static_cast<double>(input_res)), 1,
                                            std::min(image_w, image_h));
    cand.cells_w = std::clamp<std::int64_t>(round_to_int(static_cast<double>(cand.side_px) / cell_w), 1, map.cols);
    cand.cells_h = std::clamp<std::int64_t>(round_to_int(static_cast<double>(cand.side_px) / cell_h), 1, map.rows);

    const std::int64_t max_x = map.cols - cand.cells_w;
    const std::int64_t max_y = map.rows - cand.cells_h;
    bool first = true;
    for (std::int64_t y = 0; y <= max_y; ++y) {
      for (std::int64_t x = 0; x <= max_x; ++x) {
        const double s = sums.sum(x, y, cand.cells_w, cand.cells_h);
        if (first || s > cand.internal_sum) {
          cand.internal_sum = s;
          cand.cell_x = x;
          cand.cell_y = y;
          first = false;
        }
      }
    }

    double neighbor_total = 0.0;
    int neighbors = 0;
    const std::int64_t offsets[4][2] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};
    for (const auto& off : offsets) {
      const std::int64_t nx = cand.cell_x + off[0];
      const std::int64_t ny = cand.cell_y + off[1];
      if (nx < 0 || ny < 0 || nx > max_x || ny > max_y) continue;
      neighbor_total += sums.sum(nx, ny, cand.cells_w, cand.cells_h);
      ++neighbors;
    }
    cand.score = neighbors == 0 ? cand.internal_sum
                                : cand.internal_sum - neighbor_total / static_cast<double>(neighbors);

    const std::int64_t left = std::clamp<std::int64_t>(round_to_int(map.col_edges[cand.cell_x]), 0, image_w - 1);
    const std::int64_t top = std::clamp<std::int64_t>(round_to_int(map.row_edges[cand.cell_y]), 0, image_h - 1);
    const std::int64_t right = std::clamp<std::int64_t>(
        round_to_int(map.col_edges[cand.cell_x + cand.cells_w]), left + 1, image_w);
    const std::int64_t bottom = std::clamp<std::int64_t>(
        round_to_int(map.row_edges[cand.cell_y + cand.cells_h]), top + 1, image_h);
    cand.pixels = {left, top, right - left, bottom - top};
    out.push_back(cand);
  }
  return out;
}

BBox select_bbox(const ImportanceMap& map, std::int64_t image_w, std::int64_t image_h,
                 std::int64_t input_res, std::span<const double> multipliers) {
  const auto candidates = score_windows(map, image_w, image_h, input_res, multipliers);
  const WindowCandidate* best = nullptr;
  for (const auto& c : candidates) {
    if (!best || c.score > best->score ||
        (c.score == best->score && c.multiplier < best->multiplier)) {
      best = &c;
    }
  }
  return best->pixels;
}

BBox expand_to_square(const BBox& bbox, std::int64_t image_w, std::int64_t image_h) {
  if (bbox.w <= 0 || bbox.h <= 0) fail(ErrorCode::kDegenerateBBox, "bbox has non-positive size");
  if (image_w <= 0 || image_h <= 0) fail(ErrorCode::kDegenerateInput, "image has non-positive size");
  const std::int64_t x0 = std::max<std::int64_t>(bbox.x, 0);
  const std::int64_t y0 = std::max<std::int64_t>(bbox.y, 0);
  const std::int64_t x1 = std::min(bbox.right(), image_w);
  const std::int64_t y1 = std::min(bbox.bottom(), image_h);
  if (x1 <= x0 || y1 <= y0) fail(ErrorCode::kOutOfBounds, "bbox does not intersect the image");
  const std::int64_t w = x1 - x0;
  const std::int64_t h = y1 - y0;

  const std::int64_t side = std::min(std::max(w, h), std::min(image_w, image_h));
  auto place = [side](std::int64_t start, std::int64_t extent, std::int64_t limit) {
    // floor((extent - side) / 2) keeps the bbox inside whenever side >= extent.
    const std::int64_t diff = extent - side;
    const std::int64_t offset = diff >= 0 ? diff / 2 : -((-diff + 1) / 2);
    return std::clamp<std::int64_t>(start + offset, 0, limit - side);
  };
  return {place(x0, w, image_w), place(y0, h, image_h), side, side};
}

Image crop_and_resize(const Image& image, const BBox& square, std::int64_t resize_to) {
  if (resize_to <= 0) fail(ErrorCode::kNonPositiveResolution, "resize target must be positive");
  if (square.w <= 0 || square.h <= 0) fail(ErrorCode::kDegenerateBBox, "crop has non-positive size");
  if (square.x < 0 || square.y < 0 || square.right() > image.width || square.bottom() > image.height) {
    fail(ErrorCode::kOutOfBounds, "crop window lies outside the image");
  }
  auto source_coord = [resize_to](std::int64_t i, std::int64_t extent) {
    if (resize_to == 1) return static_cast<double>(extent - 1) / 2.0;
    return static_cast<double>(i) * static_cast<double>(extent - 1) / static_cast<double>(resize_to - 1);
  };
  Image out(resize_to, resize_to);
  for (std::int64_t oy = 0; oy < resize_to; ++oy) {
    const double sy = source_coord(oy, square.h);
    const std::int64_t y0 = static_cast<std::int64_t>(std::floor(sy));
    const std::int64_t y1 = std::min(y0 + 1, square.h - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::int64_t ox = 0; ox < resize_to; ++ox) {
      const double sx = source_coord(ox, square.w);
      const std::int64_t x0 = static_cast<std::int64_t>(std::floor(sx));
      const std::int64_t x1 = std::min(x0 + 1, square.w - 1);
      const double fx = sx - static_cast<double>(x0);
      for (int ch = 0; ch < 3; ++ch) {
        auto px = [&](std::int64_t x, std::int64_t y) {
          return static_cast<double>(image.at(square.x + x, square.y + y, ch));
        };
        const double top = px(x0, y0) * (1.0 - fx) + px(x1, y0) * fx;
        const double bottom = px(x0, y1) * (1.0 - fx) + px(x1, y1) * fx;
        const double v = top * (1.0 - fy) + bottom * fy;
        out.at(ox, oy, ch) = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
      }
    }
  }
  return out;
}

std::vector<BBox> tile_blocks(std::int64_t image_w, std::int64_t image_h, std::int64_t limit) {
  if (image_w <= 0 || image_h <= 0) fail(ErrorCode::kDegenerateInput, "image has non-positive size");
  if (limit <= 0) fail(ErrorCode::kInvalidArgument, "tile limit must be positive");
  const std::int64_t rows = (image_h + limit - 1) / limit;
  const std::int64_t cols = (image_w + limit - 1) / limit;
  auto elongation = [&](std::int64_t r, std::int64_t c) {
    const double aspect = (static_cast<double>(image_w) / static_cast<double>(c)) /
                          (static_cast<double>(image_h) / static_cast<double>(r));
    return std::abs(std::log(aspect));
  };
  // The minimal grid is kept unless its blocks are more elongated than 2:1;
  // then one extra row or column may bring them closer to square.
  std::int64_t best_r = rows;
  std::int64_t best_c = cols;
  if (elongation(rows, cols) > std::log(2.0)) {
    const std::int64_t alternatives[2][2] = {{rows + 1, cols}, {rows, cols + 1}};
    for (const auto& alt : alternatives) {
      if (alt[0] > image_h || alt[1] > image_w) continue;
      if (elongation(alt[0], alt[1]) < elongation(best_r, best_c)) {
        best_r = alt[0];
        best_c = alt[1];
      }
    }
  }
  std::vector<BBox> blocks;
  blocks.reserve(static_cast<std::size_t>(best_r * best_c));
  for (std::int64_t r = 0; r < best_r; ++r) {
    const std::int64_t y0 = r * image_h / best_r;
    const std::int64_t y1 = (r + 1) * image_h / best_r;
    for (std::int64_t c = 0; c < best_c; ++c) {
      const std::int64_t x0 = c * image_w / best_c;
      const std::int64_t x1 = (c + 1) * image_w / best_c;
      blocks.push_back({x0, y0, x1 - x0, y1 - y0});
    }
  }
  return blocks;
}

ImportanceMap stitch_maps(std::span<const BBox> blocks, std::span<const ImportanceMap> maps) {
  if (blocks.empty() || blocks.size() != maps.size()) {
    fail(ErrorCode::kBlockMapMismatch, "need exactly one map per block");
  }
  // Block grid: distinct x offsets are columns, distinct y offsets are rows.
  std::map<std::int64_t, std::int64_t> col_width;
  std::map<std::int64_t, std::int64_t> row_height;
  for (const auto& b : blocks) {
    if (b.w <= 0 || b.h <= 0) fail(ErrorCode::kBlockMapMismatch, "block with non-positive size");
    auto [cw, new_col] = col_width.emplace(b.x, b.w);
    auto [rh, new_row] = row_height.emplace(b.y, b.h);
    if ((!new_col && cw->second != b.w) || (!new_row && rh->second != b.h)) {
      fail(ErrorCode::kBlockMapMismatch, "blocks do not form a grid");
    }
  }
  if (col_width.size() * row_height.size() != blocks.size()) {
    fail(ErrorCode::kBlockMapMismatch, "blocks do not form a complete grid");
  }
  auto check_contiguous = [](const std::map<std::int64_t, std::int64_t>& spans) {
    std::int64_t expect = spans.begin()->first;
    for (const auto& [start, len] : spans) {
      if (start != expect) fail(ErrorCode::kBlockMapMismatch, "blocks leave gaps or overlap");
      expect = start + len;
    }
  };
  check_contiguous(col_width);
  check_contiguous(row_height);

  std::map<std::int64_t, std::size_t> col_index;
  std::map<std::int64_t, std::size_t> row_index;
  for (const auto& [x, w] : col_width) col_index.emplace(x, col_index.size());
  for (const auto& [y, h] : row_height) row_index.emplace(y, row_index.size());

  std::vector<std::vector<const ImportanceMap*>> grid(row_index.size(),
                                                      std::vector<const ImportanceMap*>(col_index.size()));
  std::vector<ImportanceMap> placed;
  placed.reserve(maps.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const auto& m = maps[i];
    if (m.empty()) fail(ErrorCode::kBlockMapMismatch, "empty block map");
    if (!near(m.extent_width(), static_cast<double>(b.w)) || !near(m.extent_height(), static_cast<double>(b.h))) {
      fail(ErrorCode::kBlockMapMismatch, "map extent does not match block " + std::to_string(i));
    }
    if (near(m.origin_x(), 0.0) && near(m.origin_y(), 0.0)) {
      placed.push_back(m.translated(static_cast<double>(b.x), static_cast<double>(b.y)));
    } else if (near(m.origin_x(), static_cast<double>(b.x)) && near(m.origin_y(), static_cast<double>(b.y))) {
      placed.push_back(m);
    } else {
      fail(ErrorCode::kBlockMapMismatch, "map origin does not match block " + std::to_string(i));
    }
    auto& slot = grid[row_index[b.y]][col_index[b.x]];
    if (slot) fail(ErrorCode::kBlockMapMismatch, "duplicate block");
    slot = &placed.back();  // stable: capacity reserved above
  }

  ImportanceMap out;
  out.source = maps[0].source;
  // Rows of cells come from the first block of each block-row, columns from
  // the first block of each block-column; every other block must agree.
  for (std::size_t br = 0; br < grid.size(); ++br) {
    const ImportanceMap& ref = *grid[br][0];
    for (const auto* m : grid[br]) {
      if (m->rows != ref.rows) fail(ErrorCode::kBlockMapMismatch, "block row with differing map heights");
    }
    out.rows += ref.rows;
    const std::size_t skip = out.row_edges.empty() ? 0 : 1;
    out.row_edges.insert(out.row_edges.end(), ref.row_edges.begin() + static_cast<std::ptrdiff_t>(skip),
                         ref.row_edges.end());
  }
  for (std::size_t bc = 0; bc < grid[0].size(); ++bc) {
    const ImportanceMap& ref = *grid[0][bc];
    for (const auto& row : grid) {
      if (row[bc]->cols != ref.cols) fail(ErrorCode::kBlockMapMismatch, "block column with differing map widths");
    }
    out.cols += ref.cols;
    const std::size_t skip = out.col_edges.empty() ? 0 : 1;
    out.col_edges.insert(out.col_edges.end(), ref.col_edges.begin() + static_cast<std::ptrdiff_t>(skip),
                         ref.col_edges.end());
  }
  out.values.assign(static_cast<std::size_t>(out.rows * out.cols), 0.0);
  std::int64_t row0 = 0;
  for (const auto& brow : grid) {
    std::int64_t col0 = 0;
    for (const auto* m : brow) {
      for (std::int64_t r = 0; r < m->rows; ++r) {
        for (std::int64_t c = 0; c < m->cols; ++c) out.at(row0 + r, col0 + c) = m->at(r, c);
      }
      col0 += m->cols;
    }
    row0 += brow[0]->rows;
  }
  return out;
}

}  // namespace zoomkit
