// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/saliency.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "zoomkit/error.hpp"

namespace zoomkit {

namespace {

std::int64_t clamp_index(std::int64_t i, std::int64_t size) {
  return std::clamp<std::int64_t>(i, 0, size - 1);
}

}  // namespace

PixelGrid grad_magnitude(const Tensor& input_grad) {
  if (input_grad.rank() != 3 || input_grad.dim(0) != 3) {
    fail(ErrorCode::kWrongChannelCount, "input gradient must have shape [3, H, W]");
  }
  const std::int64_t h = input_grad.dim(1);
  const std::int64_t w = input_grad.dim(2);
  const std::size_t plane = static_cast<std::size_t>(h * w);
  PixelGrid out(w, h);
  for (std::size_t i = 0; i < plane; ++i) {
    const double r = input_grad.data[i];
    const double g = input_grad.data[plane + i];
    const double b = input_grad.data[2 * plane + i];
    out.values[i] = std::sqrt(r * r + g * g + b * b);
  }
  return out;
}

PixelGrid grayscale(const Image& image) {
  PixelGrid out(image.width, image.height);
  for (std::int64_t y = 0; y < image.height; ++y) {
    for (std::int64_t x = 0; x < image.width; ++x) {
      out.at(x, y) = (static_cast<double>(image.at(x, y, 0)) + image.at(x, y, 1) + image.at(x, y, 2)) / 3.0;
    }
  }
  return out;
}

PixelGrid gaussian_blur3(const PixelGrid& grid) {
  static constexpr std::array<double, 3> kTap = {1.0, 2.0, 1.0};
  PixelGrid out(grid.width, grid.height);
  for (std::int64_t y = 0; y < grid.height; ++y) {
    for (std::int64_t x = 0; x < grid.width; ++x) {
      double acc = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          acc += kTap[dy + 1] * kTap[dx + 1] *
                 grid.at(clamp_index(x + dx, grid.width), clamp_index(y + dy, grid.height));
        }
      }
      out.at(x, y) = acc / 16.0;
    }
  }
  return out;
}

PixelGrid median3(const PixelGrid& grid) {
  PixelGrid out(grid.width, grid.height);
  std::array<double, 9> window{};
  for (std::int64_t y = 0; y < grid.height; ++y) {
    for (std::int64_t x = 0; x < grid.width; ++x) {
      std::size_t n = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          window[n++] = grid.at(clamp_index(x + dx, grid.width), clamp_index(y + dy, grid.height));
        }
      }
      std::nth_element(window.begin(), window.begin() + 4, window.end());
      out.at(x, y) = window[4];
    }
  }
  return out;
}

double spatial_median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return (lower + upper) / 2.0;
}

EdgeMask edge_mask(const Image& image) {
  if (image.empty()) fail(ErrorCode::kInvalidArgument, "edge_mask needs a nonempty image");
  const PixelGrid gray = grayscale(image);
  const PixelGrid blur = gaussian_blur3(gray);
  PixelGrid high(gray.width, gray.height);
  for (std::size_t i = 0; i < high.values.size(); ++i) {
    high.values[i] = std::abs(gray.values[i] - blur.values[i]);
  }
  const PixelGrid filtered = median3(high);
  const double threshold = spatial_median(filtered.values);
  EdgeMask mask{image.width, image.height, std::vector<std::uint8_t>(filtered.values.size(), 0)};
  for (std::size_t i = 0; i < filtered.values.size(); ++i) {
    mask.mask[i] = filtered.values[i] > threshold ? 1 : 0;
  }
  return mask;
}

std::vector<std::int64_t> patch_boundaries(std::int64_t size, std::int64_t n) {
  std::vector<std::int64_t> edges(static_cast<std::size_t>(n + 1));
  const std::int64_t cell = (size + n - 1) / n;
  const bool ceil_layout_fills = (n - 1) * cell < size;
  for (std::int64_t i = 0; i <= n; ++i) {
    edges[i] = ceil_layout_fills ? std::min(i * cell, size) : (i * size) / n;
  }
  return edges;
}

ImportanceMap pool_to_patches(const PixelGrid& grid, std::int64_t n) {
  if (n <= 0) fail(ErrorCode::kInvalidArgument, "patch grid side must be positive");
  if (grid.height < n || grid.width < n) {
    fail(ErrorCode::kGridSmallerThanPatches,
         std::to_string(grid.width) + "x" + std::to_string(grid.height) + " grid is smaller than " +
             std::to_string(n) + "x" + std::to_string(n) + " patches");
  }
  const auto xs = patch_boundaries(grid.width, n);
  const auto ys = patch_boundaries(grid.height, n);
  ImportanceMap map;
  map.rows = n;
  map.cols = n;
  map.values.assign(static_cast<std::size_t>(n * n), 0.0);
  map.col_edges.assign(xs.begin(), xs.end());
  map.row_edges.assign(ys.begin(), ys.end());
  map.source = MapMethod::kPureGrad;
  for (std::int64_t r = 0; r < n; ++r) {
    for (std::int64_t c = 0; c < n; ++c) {
      double acc = 0.0;
      for (std::int64_t y = ys[r]; y < ys[r + 1]; ++y) {
        for (std::int64_t x = xs[c]; x < xs[c + 1]; ++x) acc += grid.at(x, y);
      }
      map.at(r, c) = acc / static_cast<double>((ys[r + 1] - ys[r]) * (xs[c + 1] - xs[c]));
    }
  }
  return map;
}

ImportanceMap pure_grad_importance(const Image& image, const Tensor& input_grad, std::int64_t n) {
  PixelGrid magnitude = grad_magnitude(input_grad);
  if (magnitude.width != image.width || magnitude.height != image.height) {
    fail(ErrorCode::kDimensionMismatch,
         "image is " + std::to_string(image.width) + "x" + std::to_string(image.height) +
             " but gradient is " + std::to_string(magnitude.width) + "x" +
             std::to_string(magnitude.height));
  }
  const EdgeMask mask = edge_mask(image);
  for (std::size_t i = 0; i < magnitude.values.size(); ++i) {
    if (!mask.mask[i]) magnitude.values[i] = 0.0;
  }
  return pool_to_patches(magnitude, n);
}

}  // namespace zoomkit
