// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

// Input-gradient importance with edge emphasis.
//
// The edge mask is computed on the grayscale image (unweighted channel mean):
//   1. high-pass = |gray - blur|, blur kernel [1,2,1] x [1,2,1] / 16
//   2. 3x3 median filter
//   3. mask = filtered > spatial median of filtered (strict)
// Both 3x3 stages replicate edge pixels. The mask gates the per-pixel L2 norm
// of the input gradient over channels, then the result is average-pooled
// into N x N cells.

#pragma once

#include <cstdint>
#include <vector>

#include "zoomkit/exchange.hpp"
#include "zoomkit/image.hpp"
#include "zoomkit/importance_map.hpp"

namespace zoomkit {

struct EdgeMask {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::uint8_t> mask;  // 0 or 1, row-major

  std::uint8_t at(std::int64_t x, std::int64_t y) const {
    return mask[static_cast<std::size_t>(y * width + x)];
  }
};

/// Per-pixel sqrt(r^2 + g^2 + b^2) of a [3, H, W] gradient.
PixelGrid grad_magnitude(const Tensor& input_grad);

PixelGrid grayscale(const Image& image);
PixelGrid gaussian_blur3(const PixelGrid& grid);
PixelGrid median3(const PixelGrid& grid);
/// Median of all values; mean of the two middle values for even counts.
double spatial_median(std::vector<double> values);

EdgeMask edge_mask(const Image& image);

/// Cells of ceil(H/N) x ceil(W/N) pixels, the last row and column taking the
/// remainder. When that layout would leave a trailing cell without pixels,
/// boundaries fall at floor(i * size / N) instead.
ImportanceMap pool_to_patches(const PixelGrid& grid, std::int64_t n);

/// Cell boundaries used by pool_to_patches along one axis (n + 1 entries).
std::vector<std::int64_t> patch_boundaries(std::int64_t size, std::int64_t n);

ImportanceMap pure_grad_importance(const Image& image, const Tensor& input_grad, std::int64_t n);

}  // namespace zoomkit
