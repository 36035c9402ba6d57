// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/exchange.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include <nlohmann/json.hpp>

#include "zoomkit/error.hpp"

namespace zoomkit {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::array kRoleOrder = {TensorRole::kAnsAttn, TensorRole::kAnsAttnGrad,
                                   TensorRole::kConnAttn, TensorRole::kConnAttnGrad,
                                   TensorRole::kInputGrad};

std::string shape_string(std::span<const std::int64_t> shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::vector<std::int64_t> expected_shape(const RunManifest& m, TensorRole role) {
  switch (role) {
    case TensorRole::kAnsAttn:
    case TensorRole::kAnsAttnGrad:
      return {m.num_layers, m.num_heads, m.num_image_tokens};
    case TensorRole::kConnAttn:
    case TensorRole::kConnAttnGrad:
      return {m.num_connector_layers, m.num_connector_heads, m.num_image_tokens,
              m.patch_count()};
    case TensorRole::kInputGrad:
      return {3, m.image_height, m.image_width};
  }
  return {};
}

void validate_dimensions(const RunManifest& m) {
  auto positive = [](std::int64_t v, const char* key) {
    if (v <= 0) fail(ErrorCode::kParseError, std::string("manifest: '") + key + "' must be positive");
  };
  positive(m.num_layers, "L");
  positive(m.num_heads, "H");
  positive(m.num_image_tokens, "T");
  positive(m.patch_grid, "N");
  positive(m.input_resolution, "input_resolution");
  positive(m.image_width, "image_width");
  positive(m.image_height, "image_height");
  if (m.num_connector_layers < 0) fail(ErrorCode::kParseError, "manifest: 'Lc' must be >= 0");
  if (m.num_connector_layers > 0) positive(m.num_connector_heads, "Hc");
}

void check_attention_values(const Tensor& t, std::string_view role) {
  const std::size_t row = static_cast<std::size_t>(t.shape.back());
  for (std::size_t start = 0; start < t.data.size(); start += row) {
    double mass = 0.0;
    for (std::size_t i = start; i < start + row; ++i) {
      const float v = t.data[i];
      if (!std::isfinite(v)) {
        fail(ErrorCode::kInvalidArgument,
             std::string(role) + ": non-finite attention at flat index " + std::to_string(i));
      }
      if (v < -kAttentionNegativityTolerance) {
        fail(ErrorCode::kNegativeAttention,
             std::string(role) + ": value " + std::to_string(v) + " at flat index " +
                 std::to_string(i));
      }
      mass += v;
    }
    if (mass > 1.0 + kAttentionMassTolerance) {
      fail(ErrorCode::kAttentionMassExceeded,
           std::string(role) + ": row starting at flat index " + std::to_string(start) +
               " sums to " + std::to_string(mass));
    }
  }
}

json manifest_to_json(const RunManifest& m) {
  json j;
  j["model_id"] = m.model_id;
  j["L"] = m.num_layers;
  j["H"] = m.num_heads;
  j["Lc"] = m.num_connector_layers;
  j["Hc"] = m.num_connector_heads;
  j["T"] = m.num_image_tokens;
  j["N"] = m.patch_grid;
  j["input_resolution"] = m.input_resolution;
  j["image_width"] = m.image_width;
  j["image_height"] = m.image_height;
  j["question"] = m.question;
  j["is_generic_instruction"] = m.is_generic_instruction;
  j["tensors"] = json::array();
  for (const auto& e : m.tensors) {
    j["tensors"].push_back({{"role", role_name(e.role)}, {"shape", e.shape}, {"path", e.path}});
  }
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.model_id = j.at("model_id").get<std::string>();
    m.num_layers = j.at("L").get<std::int64_t>();
    m.num_heads = j.at("H").get<std::int64_t>();
    m.num_connector_layers = j.at("Lc").get<std::int64_t>();
    m.num_connector_heads = j.at("Hc").get<std::int64_t>();
    m.num_image_tokens = j.at("T").get<std::int64_t>();
    m.patch_grid = j.at("N").get<std::int64_t>();
    m.input_resolution = j.at("input_resolution").get<std::int64_t>();
    m.image_width = j.at("image_width").get<std::int64_t>();
    m.image_height = j.at("image_height").get<std::int64_t>();
    m.question = j.at("question").get<std::string>();
    m.is_generic_instruction = j.at("is_generic_instruction").get<bool>();
    for (const auto& e : j.at("tensors")) {
      TensorEntry entry;
      const auto name = e.at("role").get<std::string>();
      auto role = parse_role(name);
      if (!role) fail(ErrorCode::kParseError, "manifest: unknown tensor role '" + name + "'");
      entry.role = *role;
      entry.shape = e.at("shape").get<std::vector<std::int64_t>>();
      entry.path = e.at("path").get<std::string>();
      m.tensors.push_back(std::move(entry));
    }
  } catch (const json::exception& ex) {
    fail(ErrorCode::kParseError, std::string("manifest: ") + ex.what());
  }
  return m;
}

// Checks entries against the declared dimensions; returns nothing, throws on
// the first violation.
void validate_entries(const RunManifest& m) {
  std::set<TensorRole> seen;
  for (const auto& e : m.tensors) {
    if (!seen.insert(e.role).second) {
      fail(ErrorCode::kParseError, "manifest: duplicate role '" + std::string(role_name(e.role)) + "'");
    }
    if ((e.role == TensorRole::kConnAttn || e.role == TensorRole::kConnAttnGrad) &&
        m.identity_connector()) {
      fail(ErrorCode::kShapeMismatch,
           std::string(role_name(e.role)) + " declared but Lc = 0 (identity connector)");
    }
    const auto want = expected_shape(m, e.role);
    if (e.shape != want) {
      fail(ErrorCode::kShapeMismatch, std::string(role_name(e.role)) + ": declared shape " +
                                          shape_string(e.shape) + ", expected " +
                                          shape_string(want));
    }
  }
  if (!seen.contains(TensorRole::kAnsAttn)) {
    fail(ErrorCode::kMissingMandatoryRole, "manifest: missing mandatory role 'ans_attn'");
  }
}

std::optional<Tensor>* mutable_slot(AttentionBundle& b, TensorRole role) {
  switch (role) {
    case TensorRole::kAnsAttnGrad: return &b.ans_attn_grad;
    case TensorRole::kConnAttn: return &b.conn_attn;
    case TensorRole::kConnAttnGrad: return &b.conn_attn_grad;
    case TensorRole::kInputGrad: return &b.input_grad;
    case TensorRole::kAnsAttn: break;
  }
  return nullptr;
}

}  // namespace

Tensor::Tensor(std::vector<std::int64_t> dims)
    : shape(std::move(dims)), data(element_count(shape), 0.0f) {}

Tensor::Tensor(std::vector<std::int64_t> dims, std::vector<float> values)
    : shape(std::move(dims)), data(std::move(values)) {
  if (data.size() != element_count(shape)) {
    fail(ErrorCode::kShapeMismatch, "tensor payload has " + std::to_string(data.size()) +
                                        " values for shape " + shape_string(shape));
  }
}

std::span<const float> Tensor::slice(std::size_t leading_index) const {
  const std::size_t stride = shape.empty() ? 0 : data.size() / static_cast<std::size_t>(shape[0]);
  return std::span<const float>(data).subspan(leading_index * stride, stride);
}

bool Tensor::bit_equal(const Tensor& other) const {
  return shape == other.shape && data.size() == other.data.size() &&
         (data.empty() ||
          std::memcmp(data.data(), other.data.data(), data.size() * sizeof(float)) == 0);
}

std::size_t element_count(std::span<const std::int64_t> shape) {
  std::size_t n = 1;
  for (auto d : shape) {
    if (d < 0) fail(ErrorCode::kShapeMismatch, "negative dimension in " + shape_string(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string_view role_name(TensorRole role) {
  switch (role) {
    case TensorRole::kAnsAttn: return "ans_attn";
    case TensorRole::kAnsAttnGrad: return "ans_attn_grad";
    case TensorRole::kConnAttn: return "conn_attn";
    case TensorRole::kConnAttnGrad: return "conn_attn_grad";
    case TensorRole::kInputGrad: return "input_grad";
  }
  return "unknown";
}

std::optional<TensorRole> parse_role(std::string_view name) {
  for (auto role : kRoleOrder) {
    if (role_name(role) == name) return role;
  }
  return std::nullopt;
}

const TensorEntry* RunManifest::find(TensorRole role) const {
  auto it = std::find_if(tensors.begin(), tensors.end(),
                         [role](const TensorEntry& e) { return e.role == role; });
  return it == tensors.end() ? nullptr : &*it;
}

const std::optional<Tensor>& AttentionBundle::tensor(TensorRole role) const {
  static const std::optional<Tensor> kNone;
  switch (role) {
    case TensorRole::kAnsAttnGrad: return ans_attn_grad;
    case TensorRole::kConnAttn: return conn_attn;
    case TensorRole::kConnAttnGrad: return conn_attn_grad;
    case TensorRole::kInputGrad: return input_grad;
    case TensorRole::kAnsAttn: break;
  }
  return kNone;
}

bool AttentionBundle::bit_equal(const AttentionBundle& other) const {
  if (!(manifest == other.manifest) || !ans_attn.bit_equal(other.ans_attn)) return false;
  for (auto role : kRoleOrder) {
    if (role == TensorRole::kAnsAttn) continue;
    const auto& a = tensor(role);
    const auto& b = other.tensor(role);
    if (a.has_value() != b.has_value()) return false;
    if (a && !a->bit_equal(*b)) return false;
  }
  return true;
}

Tensor read_tensor_file(const fs::path& file, std::vector<std::int64_t> shape) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open tensor file " + file.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::size_t count = element_count(shape);
  if (bytes.size() != count * 4) {
    fail(ErrorCode::kShapeMismatch, file.filename().string() + ": " + std::to_string(bytes.size()) +
                                        " bytes, shape " + shape_string(shape) + " needs " +
                                        std::to_string(count * 4));
  }
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* p = bytes.data() + 4 * i;
    const std::uint32_t bits = std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) |
                               (std::uint32_t{p[2]} << 16) | (std::uint32_t{p[3]} << 24);
    values[i] = std::bit_cast<float>(bits);
  }
  return Tensor(std::move(shape), std::move(values));
}

void write_tensor_file(const fs::path& file, const Tensor& tensor) {
  std::vector<unsigned char> bytes(tensor.data.size() * 4);
  for (std::size_t i = 0; i < tensor.data.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(tensor.data[i]);
    for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot create tensor file " + file.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIoFailure, "write failed for " + file.string());
}

RunManifest load_manifest(const fs::path& dir) {
  const fs::path file = dir / "manifest.json";
  std::ifstream in(file);
  if (!in) fail(ErrorCode::kMissingManifest, "no manifest.json in " + dir.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    fail(ErrorCode::kParseError, file.string() + ": " + ex.what());
  }
  RunManifest m = manifest_from_json(j);
  validate_dimensions(m);
  validate_entries(m);
  return m;
}

void validate_bundle(const AttentionBundle& b) {
  const RunManifest& m = b.manifest;
  validate_dimensions(m);
  validate_entries(m);
  for (auto role : kRoleOrder) {
    const Tensor* t = role == TensorRole::kAnsAttn
                          ? &b.ans_attn
                          : (b.tensor(role) ? &*b.tensor(role) : nullptr);
    const TensorEntry* e = m.find(role);
    if ((t == nullptr) != (e == nullptr)) {
      fail(ErrorCode::kShapeMismatch,
           std::string(role_name(role)) + ": manifest entry and tensor presence disagree");
    }
    if (!t) continue;
    if (t->shape != e->shape || t->data.size() != element_count(t->shape)) {
      fail(ErrorCode::kShapeMismatch, std::string(role_name(role)) + ": tensor shape " +
                                          shape_string(t->shape) + " vs declared " +
                                          shape_string(e->shape));
    }
    if (role == TensorRole::kAnsAttn || role == TensorRole::kConnAttn) {
      check_attention_values(*t, role_name(role));
    }
  }
}

AttentionBundle load_bundle(const fs::path& dir) {
  AttentionBundle b;
  b.manifest = load_manifest(dir);
  for (const auto& e : b.manifest.tensors) {
    Tensor t = read_tensor_file(dir / e.path, e.shape);
    if (e.role == TensorRole::kAnsAttn) {
      b.ans_attn = std::move(t);
    } else {
      *mutable_slot(b, e.role) = std::move(t);
    }
  }
  validate_bundle(b);
  return b;
}

void sync_tensor_entries(AttentionBundle& b) {
  std::vector<TensorEntry> entries;
  for (auto role : kRoleOrder) {
    const Tensor* t = role == TensorRole::kAnsAttn
                          ? &b.ans_attn
                          : (b.tensor(role) ? &*b.tensor(role) : nullptr);
    if (!t) continue;
    const TensorEntry* old = b.manifest.find(role);
    entries.push_back({role, t->shape, old ? old->path : std::string(role_name(role)) + ".bin"});
  }
  b.manifest.tensors = std::move(entries);
}

void write_bundle(const fs::path& dir, const AttentionBundle& b) {
  validate_bundle(b);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& e : b.manifest.tensors) {
    const Tensor& t = e.role == TensorRole::kAnsAttn ? b.ans_attn : *b.tensor(e.role);
    write_tensor_file(dir / e.path, t);
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot write manifest in " + dir.string());
  out << manifest_to_json(b.manifest).dump(2) << '\n';
  if (!out) fail(ErrorCode::kIoFailure, "write failed for manifest in " + dir.string());
}

}  // namespace zoomkit
