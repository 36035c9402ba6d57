// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

// Attention-derived importance maps.
//
// For LLM layer m and connector layer k the answer-to-image map is the
// head-averaged answer-to-token row (1 x T) times the head-averaged
// token-to-patch matrix (T x N^2), reshaped to N x N. Models whose connector
// is an MLP export no connector attention (Lc = 0); the token row is then
// the map itself and T must equal N^2.

#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "zoomkit/exchange.hpp"
#include "zoomkit/importance_map.hpp"
#include "zoomkit/types.hpp"

namespace zoomkit {

/// Denominator floor for relative attention.
inline constexpr double kDefaultRelativeEps = 1e-8;

/// Fixed instruction used for the normalizing bundle of relative attention.
inline constexpr std::string_view kGenericInstruction = "Write a general description of the image.";

/// Mean over axis 1 of a [layers, heads, ...] tensor. Throws EmptyHeadAxis.
Tensor head_average(const Tensor& raw);

/// Answer-to-image map for one (m, k), or the mean over every (m, k) when
/// choice.mode is averaged.
ImportanceMap answer_to_image(const AttentionBundle& bundle, const LayerChoice& choice);

/// Element-wise ratio of the question map to the generic-instruction map,
/// denominator floored at eps. In averaged mode the per-layer ratios are
/// averaged.
ImportanceMap relative_attention(const AttentionBundle& question_bundle,
                                 const AttentionBundle& generic_bundle, const LayerChoice& choice,
                                 double eps = kDefaultRelativeEps);

/// Answer-to-image map with every attention weight scaled by the positive
/// part of its gradient before head averaging.
ImportanceMap grad_weighted_attention(const AttentionBundle& bundle, const LayerChoice& choice);

/// Mean of the per-(m, k) maps of `method` (rel_att, grad_att or raw_a_si)
/// over all m in [0, L) and k in [0, max(Lc, 1)). rel_att needs `generic`.
ImportanceMap layer_average(const AttentionBundle& bundle, MapMethod method,
                            const AttentionBundle* generic = nullptr,
                            double eps = kDefaultRelativeEps);

/// Flat answer-to-image values (length N^2) before reshaping; `gradient_gated`
/// selects the grad-weighted variant.
std::vector<double> answer_to_image_flat(const AttentionBundle& bundle, std::int64_t m,
                                         std::int64_t k, bool gradient_gated);

/// Tuned layers: LLaVA-1.5 style (m=14, identity connector) and
/// InstructBLIP style (m=15, k=2).
enum class ModelFamily { kLlava15, kInstructBlip };
LayerChoice default_layer_choice(ModelFamily family);

/// Guesses the family from a model id ("llava..." or "...instructblip...").
std::optional<LayerChoice> default_layer_choice_for(std::string_view model_id);

/// Throws LayerOutOfRange unless the choice is valid for the bundle.
void check_layer_choice(const RunManifest& manifest, const LayerChoice& choice);

}  // namespace zoomkit
