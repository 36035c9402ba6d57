// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace zoomkit {

/// 8-bit interleaved RGB raster, row-major.
struct Image {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(std::int64_t w, std::int64_t h) : width(w), height(h), rgb(static_cast<std::size_t>(w * h * 3), 0) {}

  bool empty() const { return width == 0 || height == 0; }
  std::uint8_t& at(std::int64_t x, std::int64_t y, int c) {
    return rgb[static_cast<std::size_t>((y * width + x) * 3 + c)];
  }
  std::uint8_t at(std::int64_t x, std::int64_t y, int c) const {
    return rgb[static_cast<std::size_t>((y * width + x) * 3 + c)];
  }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Single-channel double grid, row-major (height rows of width values).
struct PixelGrid {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<double> values;

  PixelGrid() = default;
  PixelGrid(std::int64_t w, std::int64_t h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w * h), fill) {}

  double& at(std::int64_t x, std::int64_t y) { return values[static_cast<std::size_t>(y * width + x)]; }
  double at(std::int64_t x, std::int64_t y) const {
    return values[static_cast<std::size_t>(y * width + x)];
  }
};

/// Decodes .png, .jpg/.jpeg and binary .ppm (P6). Grayscale and alpha
/// inputs are expanded or dropped to RGB.
Image read_image(const std::filesystem::path& path);

/// Encodes by extension: .png or .ppm.
void write_image(const std::filesystem::path& path, const Image& image);

/// Finds `<dir>/<stem>.{png,jpg,jpeg,ppm}`; empty path when none exists.
std::filesystem::path find_image(const std::filesystem::path& dir, const std::string& stem);

/// Pixel copy of the rectangle (x, y, w, h); the caller checks bounds.
Image crop_pixels(const Image& image, std::int64_t x, std::int64_t y, std::int64_t w, std::int64_t h);

}  // namespace zoomkit
