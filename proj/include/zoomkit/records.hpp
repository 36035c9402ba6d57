// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

// JSON-lines record files. One EvalRecord per line, UTF-8:
//
//   {"question_id": "q1", "image_id": "img1", "question": "...",
//    "gt_answers": ["..."], "gt_bbox": {"x":..,"y":..,"w":..,"h":..},
//    "prediction": "...", "prediction_cropped": "...",
//    "partition": "small" | "medium" | "large",
//    "score": {"original": 1.0, "cropped": 0.333},
//    "crop": {"x":..,"y":..,"w":..,"h":.., "method": "rel_att",
//             "layer": {"m": 14, "k": 0, "mode": "selected"},
//             "resize_to": 336}}
//
// Optional keys are omitted when absent. Numeric ids are accepted on input
// and kept as their decimal string.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zoomkit/types.hpp"

namespace zoomkit {

struct EvalRecord {
  std::string question_id;
  std::string image_id;
  std::string question;
  std::vector<std::string> gt_answers;
  std::optional<BBox> gt_bbox;
  std::optional<std::string> prediction;
  std::optional<std::string> prediction_cropped;
  std::optional<Partition> partition;
  std::map<std::string, double> scores;
  std::optional<CropDirective> crop;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

std::string record_to_json_line(const EvalRecord& record);
EvalRecord record_from_json_line(const std::string& line);

/// Writes one line per record, in order. Throws IoFailure.
void write_records(std::span<const EvalRecord> records, const std::filesystem::path& path);

/// Reads a record file; blank lines are skipped. Throws IoFailure/ParseError.
std::vector<EvalRecord> read_records(const std::filesystem::path& path);

}  // namespace zoomkit
