// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

// Tensor exchange format.
//
// A bundle directory holds `manifest.json` plus one headerless file per
// tensor. Tensor files are raw IEEE-754 binary32, little-endian, row-major;
// all shape and role information lives in the manifest:
//
//   {
//     "model_id": "llava-1.5-7b", "L": 32, "H": 32, "Lc": 0, "Hc": 0,
//     "T": 576, "N": 24, "input_resolution": 336,
//     "image_width": 640, "image_height": 480,
//     "question": "what is written on the sign?",
//     "is_generic_instruction": false,
//     "tensors": [ {"role": "ans_attn", "shape": [32, 32, 576],
//                   "path": "ans_attn.bin"}, ... ]
//   }
//
// Roles and required shapes:
//   ans_attn        [L, H, T]          mandatory
//   ans_attn_grad   [L, H, T]
//   conn_attn       [Lc, Hc, T, N*N]   only when Lc > 0
//   conn_attn_grad  [Lc, Hc, T, N*N]   only when Lc > 0
//   input_grad      [3, image_height, image_width]

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zoomkit {

/// Dense row-major float32 tensor.
struct Tensor {
  std::vector<std::int64_t> shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::int64_t> dims);
  Tensor(std::vector<std::int64_t> dims, std::vector<float> values);

  std::size_t rank() const { return shape.size(); }
  std::int64_t dim(std::size_t axis) const { return shape.at(axis); }
  std::size_t size() const { return data.size(); }

  std::span<const float> slice(std::size_t leading_index) const;

  /// Bitwise equality of shape and payload; NaN payloads compare by bits.
  bool bit_equal(const Tensor& other) const;
};

std::size_t element_count(std::span<const std::int64_t> shape);

enum class TensorRole { kAnsAttn, kAnsAttnGrad, kConnAttn, kConnAttnGrad, kInputGrad };

std::string_view role_name(TensorRole role);
std::optional<TensorRole> parse_role(std::string_view name);

struct TensorEntry {
  TensorRole role = TensorRole::kAnsAttn;
  std::vector<std::int64_t> shape;
  std::string path;

  friend bool operator==(const TensorEntry&, const TensorEntry&) = default;
};

struct RunManifest {
  std::string model_id;
  std::int64_t num_layers = 0;            // L
  std::int64_t num_heads = 0;             // H
  std::int64_t num_connector_layers = 0;  // Lc, 0 means identity connector
  std::int64_t num_connector_heads = 0;   // Hc
  std::int64_t num_image_tokens = 0;      // T
  std::int64_t patch_grid = 0;            // N, the ViT grid is N x N
  std::int64_t input_resolution = 0;
  std::int64_t image_width = 0;
  std::int64_t image_height = 0;
  std::string question;
  bool is_generic_instruction = false;
  std::vector<TensorEntry> tensors;

  bool identity_connector() const { return num_connector_layers == 0; }
  std::int64_t patch_count() const { return patch_grid * patch_grid; }
  const TensorEntry* find(TensorRole role) const;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

struct AttentionBundle {
  RunManifest manifest;
  Tensor ans_attn;                       // [L, H, T]
  std::optional<Tensor> ans_attn_grad;   // [L, H, T]
  std::optional<Tensor> conn_attn;       // [Lc, Hc, T, N^2]
  std::optional<Tensor> conn_attn_grad;  // [Lc, Hc, T, N^2]
  std::optional<Tensor> input_grad;      // [3, image_height, image_width]

  bool identity_connector() const { return manifest.identity_connector(); }
  const std::optional<Tensor>& tensor(TensorRole role) const;

  bool bit_equal(const AttentionBundle& other) const;
};

/// Negative values below this are rejected as NegativeAttention.
inline constexpr double kAttentionNegativityTolerance = 1e-6;
/// Per-row attention mass may exceed 1 by at most this much.
inline constexpr double kAttentionMassTolerance = 1e-3;

/// Loads and fully validates a bundle directory.
AttentionBundle load_bundle(const std::filesystem::path& dir);

/// Reads only `manifest.json` without touching tensor files.
RunManifest load_manifest(const std::filesystem::path& dir);

/// Writes `manifest.json` and every present tensor. The manifest's tensor
/// entries must describe exactly the present tensors (see
/// sync_tensor_entries).
void write_bundle(const std::filesystem::path& dir, const AttentionBundle& bundle);

/// Rebuilds manifest.tensors from the present tensors in role order, keeping
/// the path of any existing entry and defaulting to `<role>.bin`.
void sync_tensor_entries(AttentionBundle& bundle);

/// Checks shape, role and value invariants of an in-memory bundle.
void validate_bundle(const AttentionBundle& bundle);

Tensor read_tensor_file(const std::filesystem::path& file, std::vector<std::int64_t> shape);
void write_tensor_file(const std::filesystem::path& file, const Tensor& tensor);

}  // namespace zoomkit
