// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

// Small value types shared across modules.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace zoomkit {

/// Axis-aligned pixel rectangle; (x, y) is the top-left corner.
struct BBox {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t w = 0;
  std::int64_t h = 0;

  std::int64_t right() const { return x + w; }
  std::int64_t bottom() const { return y + h; }
  std::int64_t area() const { return w * h; }
  bool contains(const BBox& other) const {
    return other.x >= x && other.y >= y && other.right() <= right() &&
           other.bottom() <= bottom();
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

enum class LayerMode { kSelected, kAveraged };

/// LLM layer `m` and connector layer `k`. `k` is ignored for identity
/// connectors.
struct LayerChoice {
  std::int64_t m = 0;
  std::int64_t k = 0;
  LayerMode mode = LayerMode::kSelected;

  friend bool operator==(const LayerChoice&, const LayerChoice&) = default;
};

enum class MapMethod { kRelAtt, kGradAtt, kPureGrad, kRawAnswerToImage, kHumanCrop };

std::string_view method_name(MapMethod method);
std::optional<MapMethod> parse_method(std::string_view name);

std::string_view layer_mode_name(LayerMode mode);
std::optional<LayerMode> parse_layer_mode(std::string_view name);

enum class Partition { kSmall, kMedium, kLarge };

std::string_view partition_name(Partition partition);
std::optional<Partition> parse_partition(std::string_view name);

struct CropDirective {
  BBox window;
  MapMethod method = MapMethod::kRelAtt;
  LayerChoice layer;
  std::int64_t resize_to = 0;

  friend bool operator==(const CropDirective&, const CropDirective&) = default;
};

}  // namespace zoomkit
