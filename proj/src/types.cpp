// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/types.hpp"

namespace zoomkit {

std::string_view method_name(MapMethod method) {
  switch (method) {
    case MapMethod::kRelAtt: return "rel_att";
    case MapMethod::kGradAtt: return "grad_att";
    case MapMethod::kPureGrad: return "pure_grad";
    case MapMethod::kRawAnswerToImage: return "raw_a_si";
    case MapMethod::kHumanCrop: return "human_crop";
  }
  return "unknown";
}

std::optional<MapMethod> parse_method(std::string_view name) {
  for (auto m : {MapMethod::kRelAtt, MapMethod::kGradAtt, MapMethod::kPureGrad,
                 MapMethod::kRawAnswerToImage, MapMethod::kHumanCrop}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view layer_mode_name(LayerMode mode) {
  return mode == LayerMode::kSelected ? "selected" : "averaged";
}

std::optional<LayerMode> parse_layer_mode(std::string_view name) {
  if (name == "selected") return LayerMode::kSelected;
  if (name == "averaged") return LayerMode::kAveraged;
  return std::nullopt;
}

std::string_view partition_name(Partition partition) {
  switch (partition) {
    case Partition::kSmall: return "small";
    case Partition::kMedium: return "medium";
    case Partition::kLarge: return "large";
  }
  return "unknown";
}

std::optional<Partition> parse_partition(std::string_view name) {
  if (name == "small") return Partition::kSmall;
  if (name == "medium") return Partition::kMedium;
  if (name == "large") return Partition::kLarge;
  return std::nullopt;
}

}  // namespace zoomkit
