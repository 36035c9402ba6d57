// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/attention.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "zoomkit/error.hpp"

namespace zoomkit {

namespace {

std::vector<double> head_mean(const Tensor& t, std::int64_t layer, const Tensor* grad) {
  const std::int64_t heads = t.dim(1);
  const std::size_t inner = t.data.size() / static_cast<std::size_t>(t.dim(0) * heads);
  std::vector<double> out(inner, 0.0);
  for (std::int64_t h = 0; h < heads; ++h) {
    const std::size_t base = static_cast<std::size_t>(layer * heads + h) * inner;
    for (std::size_t i = 0; i < inner; ++i) {
      double v = t.data[base + i];
      if (grad) v *= std::max(0.0, static_cast<double>(grad->data[base + i]));
      out[i] += v;
    }
  }
  for (auto& v : out) v /= static_cast<double>(heads);
  return out;
}

// Head-averaged rows for every LLM layer and every connector layer.
struct LayerSignals {
  std::int64_t tokens = 0;
  std::int64_t patches = 0;
  bool identity = true;
  std::vector<std::vector<double>> answer_to_token;  // [L][T]
  std::vector<std::vector<double>> token_to_patch;   // [Lc][T * N^2]

  std::vector<double> product(std::int64_t m, std::int64_t k) const {
    const auto& st = answer_to_token[static_cast<std::size_t>(m)];
    if (identity) return st;
    const auto& ti = token_to_patch[static_cast<std::size_t>(k)];
    std::vector<double> out(static_cast<std::size_t>(patches), 0.0);
    for (std::int64_t t = 0; t < tokens; ++t) {
      const double w = st[static_cast<std::size_t>(t)];
      if (w == 0.0) continue;
      const double* row = ti.data() + t * patches;
      for (std::int64_t p = 0; p < patches; ++p) out[static_cast<std::size_t>(p)] += w * row[p];
    }
    return out;
  }
};

void require_connector(const AttentionBundle& b) {
  const auto& m = b.manifest;
  if (m.identity_connector()) {
    if (m.num_image_tokens != m.patch_count()) {
      fail(ErrorCode::kTokenGridMismatch,
           "identity connector needs T == N^2, got T=" + std::to_string(m.num_image_tokens) +
               ", N=" + std::to_string(m.patch_grid));
    }
  } else if (!b.conn_attn) {
    fail(ErrorCode::kMissingConnectorAttention, "bundle has Lc > 0 but no conn_attn");
  }
}

LayerSignals collect(const AttentionBundle& b, bool gated, std::optional<std::int64_t> only_m = {},
                     std::optional<std::int64_t> only_k = {}) {
  require_connector(b);
  const auto& m = b.manifest;
  if (gated) {
    if (!b.ans_attn_grad) fail(ErrorCode::kMissingGradients, "bundle has no ans_attn_grad");
    if (!m.identity_connector() && !b.conn_attn_grad) {
      fail(ErrorCode::kMissingGradients, "bundle has no conn_attn_grad");
    }
  }
  LayerSignals s;
  s.tokens = m.num_image_tokens;
  s.patches = m.patch_count();
  s.identity = m.identity_connector();
  s.answer_to_token.resize(static_cast<std::size_t>(m.num_layers));
  for (std::int64_t l = 0; l < m.num_layers; ++l) {
    if (only_m && *only_m != l) continue;
    s.answer_to_token[l] = head_mean(b.ans_attn, l, gated ? &*b.ans_attn_grad : nullptr);
  }
  if (!s.identity) {
    s.token_to_patch.resize(static_cast<std::size_t>(m.num_connector_layers));
    for (std::int64_t l = 0; l < m.num_connector_layers; ++l) {
      if (only_k && *only_k != l) continue;
      s.token_to_patch[l] = head_mean(*b.conn_attn, l, gated ? &*b.conn_attn_grad : nullptr);
    }
  }
  return s;
}

std::int64_t connector_layers(const RunManifest& m) {
  return std::max<std::int64_t>(m.num_connector_layers, 1);
}

ImportanceMap to_map(const RunManifest& m, std::vector<double> flat, MapMethod source) {
  ImportanceMap map = ImportanceMap::uniform(m.patch_grid, m.patch_grid,
                                             static_cast<double>(m.image_width),
                                             static_cast<double>(m.image_height));
  map.values = std::move(flat);
  map.source = source;
  return map;
}

// Mean over all (m, k) of per-layer flat maps produced by `layer_map`.
template <typename LayerMap>
std::vector<double> average_layers(const RunManifest& m, LayerMap&& layer_map) {
  std::vector<double> acc(static_cast<std::size_t>(m.patch_count()), 0.0);
  const std::int64_t lc = connector_layers(m);
  for (std::int64_t l = 0; l < m.num_layers; ++l) {
    for (std::int64_t k = 0; k < lc; ++k) {
      const auto flat = layer_map(l, k);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += flat[i];
    }
  }
  const double count = static_cast<double>(m.num_layers * lc);
  for (auto& v : acc) v /= count;
  return acc;
}

void check_pair(const AttentionBundle& q, const AttentionBundle& g) {
  const auto& a = q.manifest;
  const auto& b = g.manifest;
  if (a.patch_grid != b.patch_grid || a.num_image_tokens != b.num_image_tokens ||
      a.num_layers != b.num_layers || a.num_connector_layers != b.num_connector_layers ||
      a.image_width != b.image_width || a.image_height != b.image_height) {
    fail(ErrorCode::kGeometryMismatch, "question and generic bundles differ in geometry");
  }
  if (!b.is_generic_instruction) {
    fail(ErrorCode::kGenericFlagMissing, "normalizing bundle is not flagged as generic instruction");
  }
}

std::vector<double> ratio(const std::vector<double>& num, const std::vector<double>& den, double eps) {
  std::vector<double> out(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) out[i] = std::max(0.0, num[i]) / std::max(den[i], eps);
  return out;
}

}  // namespace

Tensor head_average(const Tensor& raw) {
  if (raw.rank() < 2) fail(ErrorCode::kInvalidArgument, "head_average needs [layers, heads, ...]");
  if (raw.dim(1) < 1) fail(ErrorCode::kEmptyHeadAxis, "head axis is empty");
  std::vector<std::int64_t> shape = raw.shape;
  shape.erase(shape.begin() + 1);
  Tensor out(shape);
  const std::size_t inner = out.data.size() / static_cast<std::size_t>(std::max<std::int64_t>(raw.dim(0), 1));
  for (std::int64_t l = 0; l < raw.dim(0); ++l) {
    const auto mean = head_mean(raw, l, nullptr);
    for (std::size_t i = 0; i < inner; ++i) out.data[l * inner + i] = static_cast<float>(mean[i]);
  }
  return out;
}

void check_layer_choice(const RunManifest& m, const LayerChoice& choice) {
  if (choice.mode == LayerMode::kAveraged) return;
  if (choice.m < 0 || choice.m >= m.num_layers) {
    fail(ErrorCode::kLayerOutOfRange, "LLM layer " + std::to_string(choice.m) + " outside [0, " +
                                          std::to_string(m.num_layers) + ")");
  }
  const std::int64_t k = m.identity_connector() ? 0 : choice.k;
  if (k < 0 || k >= connector_layers(m)) {
    fail(ErrorCode::kLayerOutOfRange, "connector layer " + std::to_string(choice.k) +
                                          " outside [0, " + std::to_string(connector_layers(m)) + ")");
  }
}

std::vector<double> answer_to_image_flat(const AttentionBundle& bundle, std::int64_t m,
                                         std::int64_t k, bool gradient_gated) {
  const LayerChoice choice{m, k, LayerMode::kSelected};
  check_layer_choice(bundle.manifest, choice);
  const std::int64_t kk = bundle.identity_connector() ? 0 : k;
  return collect(bundle, gradient_gated, m, kk).product(m, kk);
}

ImportanceMap answer_to_image(const AttentionBundle& bundle, const LayerChoice& choice) {
  const auto& m = bundle.manifest;
  if (choice.mode == LayerMode::kAveraged) return layer_average(bundle, MapMethod::kRawAnswerToImage);
  return to_map(m, answer_to_image_flat(bundle, choice.m, choice.k, false),
                MapMethod::kRawAnswerToImage);
}

ImportanceMap grad_weighted_attention(const AttentionBundle& bundle, const LayerChoice& choice) {
  if (choice.mode == LayerMode::kAveraged) return layer_average(bundle, MapMethod::kGradAtt);
  return to_map(bundle.manifest, answer_to_image_flat(bundle, choice.m, choice.k, true),
                MapMethod::kGradAtt);
}

ImportanceMap relative_attention(const AttentionBundle& question_bundle,
                                 const AttentionBundle& generic_bundle, const LayerChoice& choice,
                                 double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::kInvalidArgument, "relative attention eps must be positive");
  check_pair(question_bundle, generic_bundle);
  if (choice.mode == LayerMode::kAveraged) {
    return layer_average(question_bundle, MapMethod::kRelAtt, &generic_bundle, eps);
  }
  const auto num = answer_to_image_flat(question_bundle, choice.m, choice.k, false);
  const auto den = answer_to_image_flat(generic_bundle, choice.m, choice.k, false);
  return to_map(question_bundle.manifest, ratio(num, den, eps), MapMethod::kRelAtt);
}

ImportanceMap layer_average(const AttentionBundle& bundle, MapMethod method,
                            const AttentionBundle* generic, double eps) {
  const auto& m = bundle.manifest;
  switch (method) {
    case MapMethod::kRawAnswerToImage:
    case MapMethod::kGradAtt: {
      const auto signals = collect(bundle, method == MapMethod::kGradAtt);
      return to_map(m, average_layers(m, [&](auto l, auto k) { return signals.product(l, k); }),
                    method);
    }
    case MapMethod::kRelAtt: {
      if (!generic) fail(ErrorCode::kMissingGenericBundle, "rel_att averaging needs a generic bundle");
      if (!(eps > 0.0)) fail(ErrorCode::kInvalidArgument, "relative attention eps must be positive");
      check_pair(bundle, *generic);
      const auto num = collect(bundle, false);
      const auto den = collect(*generic, false);
      return to_map(m,
                    average_layers(m, [&](auto l, auto k) {
                      return ratio(num.product(l, k), den.product(l, k), eps);
                    }),
                    method);
    }
    default:
      fail(ErrorCode::kInvalidArgument,
           "layer averaging is not defined for '" + std::string(method_name(method)) + "'");
  }
}

LayerChoice default_layer_choice(ModelFamily family) {
  switch (family) {
    case ModelFamily::kLlava15: return {14, 0, LayerMode::kSelected};
    case ModelFamily::kInstructBlip: return {15, 2, LayerMode::kSelected};
  }
  return {};
}

std::optional<LayerChoice> default_layer_choice_for(std::string_view model_id) {
  std::string id(model_id);
  std::transform(id.begin(), id.end(), id.begin(), [](unsigned char c) { return std::tolower(c); });
  if (id.find("instructblip") != std::string::npos) return default_layer_choice(ModelFamily::kInstructBlip);
  if (id.find("llava") != std::string::npos) return default_layer_choice(ModelFamily::kLlava15);
  return std::nullopt;
}

}  // namespace zoomkit
