// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic inputs shared by the unit and acceptance tests.

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "zoomkit/exchange.hpp"
#include "zoomkit/image.hpp"
#include "zoomkit/importance_map.hpp"
#include "zoomkit/records.hpp"

namespace zktest {

namespace fs = std::filesystem;
using Rng = std::mt19937_64;

struct BundleDims {
  std::int64_t layers = 1;
  std::int64_t heads = 1;
  std::int64_t connector_layers = 0;
  std::int64_t connector_heads = 0;
  std::int64_t tokens = 1;
  std::int64_t grid = 1;
  std::int64_t image_w = 32;
  std::int64_t image_h = 32;
  std::int64_t input_res = 16;
};

/// Random dims with every count in [1, max_dim]; an identity connector is
/// picked half the time, which forces T = N^2.
BundleDims random_dims(Rng& rng, std::int64_t max_dim);

/// Nonnegative row of `n` values summing to `mass`.
std::vector<float> random_row(Rng& rng, std::int64_t n, double mass);

struct BundleOptions {
  bool gradients = false;
  bool input_grad = false;
  bool generic = false;
};

/// Valid bundle with random attention rows (mass in [0.5, 1]) and, on
/// request, signed gradients. Tensor entries are synced.
zoomkit::AttentionBundle random_bundle(Rng& rng, const BundleDims& dims, const BundleOptions& opts = {});

/// Identity-connector bundle whose answer attention is `weights` (length
/// N^2, mass <= 1) in every head and layer.
zoomkit::AttentionBundle bundle_from_weights(const std::vector<float>& weights, std::int64_t grid,
                                             std::int64_t layers, std::int64_t image_w,
                                             std::int64_t image_h, std::int64_t input_res, bool generic);

/// Map over a width x height image; values are k/16 with k in [0, 64) when
/// `dyadic`, so sums are exact in double precision.
zoomkit::ImportanceMap random_map(Rng& rng, std::int64_t rows, std::int64_t cols, std::int64_t width,
                                  std::int64_t height, bool dyadic);

zoomkit::Image constant_image(std::int64_t w, std::int64_t h, std::uint8_t value);
/// Columns < step_col are black, the rest white.
zoomkit::Image step_edge_image(std::int64_t w, std::int64_t h, std::int64_t step_col);
zoomkit::Image random_image(Rng& rng, std::int64_t w, std::int64_t h);

/// Empty directory unique to `name`, under the system temp dir.
fs::path fresh_dir(const std::string& name);

struct Corpus {
  fs::path root;
  fs::path bundles;
  fs::path images;
  fs::path records;
  std::vector<zoomkit::EvalRecord> entries;
  std::vector<std::int64_t> hot_patch;  // index of the attention peak per record
};

/// Image/question pairs laid out per the jobs directory conventions. Each
/// question bundle concentrates attention on one patch whose pixel box is
/// the record's gt_bbox; the generic bundle is near uniform. Every bundle
/// carries gradients and input_grad, and every image is a PNG.
Corpus write_corpus(const fs::path& root, int pairs, std::uint64_t seed);

std::string read_file(const fs::path& path);

}  // namespace zktest
