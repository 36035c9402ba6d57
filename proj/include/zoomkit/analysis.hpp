// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zoomkit/importance_map.hpp"
#include "zoomkit/types.hpp"

namespace zoomkit {

/// Relative-size thresholds on S = bbox area / image area.
inline constexpr double kSmallUpperBound = 0.005;
inline constexpr double kMediumUpperBound = 0.05;

/// small: S < 0.005, medium: 0.005 <= S < 0.05, large: S >= 0.05.
Partition size_partition(const BBox& gt_bbox, std::int64_t image_w, std::int64_t image_h);

/// Map mass inside `gt_bbox` over the mean mass of every same-size window
/// placed at one-cell stride. Pixel boxes meet cells with fractional overlap
/// weights. Returns 1 when the mean is zero.
double attention_ratio(const ImportanceMap& map, const BBox& gt_bbox, std::int64_t image_w,
                       std::int64_t image_h);

/// Sum of map values weighted by overlap with the cell-space rectangle
/// [x0, x1) x [y0, y1).
double fractional_window_sum(const ImportanceMap& map, double x0, double x1, double y0, double y1);

/// Answer normalization of the standard VQA evaluation:
///   1. newlines and tabs become spaces; surrounding whitespace is trimmed
///   2. for each of ; / [ ] " { } ( ) = + \ _ - > < @ ` , ? !
///      the character is deleted if the text has it next to a space or
///      contains a digit,digit group, otherwise it becomes a space
///   3. periods not followed by a digit are deleted
///   4. lowercase, split on whitespace, number words zero..ten (and "none")
///      become digits, articles a/an/the are dropped
///   5. unpunctuated contractions are restored ("dont" -> "don't")
///   6. words are joined with single spaces
std::string normalize_answer(std::string_view answer);

/// min(matches / 3, 1) over normalized ground-truth answers.
double vqa_score(std::string_view prediction, std::span<const std::string> gt_answers);

/// 1 when the normalized strings are equal, else 0.
int exact_match(std::string_view prediction, std::string_view gt_answer);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

/// Mean and 95% half-width 1.96 * s / sqrt(n) with the ddof=1 sample
/// standard deviation; n = 1 gives half-width 0. Throws EmptyInput.
MeanCi mean_ci(std::span<const double> values);

enum class RatioSplit { kCorrect, kIncorrect, kAll };
std::string_view split_name(RatioSplit split);

struct RatioStat {
  std::int64_t m = 0;
  std::int64_t k = 0;
  std::int64_t layer_index = 0;  // m + k * L
  RatioSplit split = RatioSplit::kAll;
  double mean = 0.0;
  double ci95_half_width = 0.0;
  std::size_t n = 0;
};

}  // namespace zoomkit
