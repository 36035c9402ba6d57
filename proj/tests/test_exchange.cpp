// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <functional>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "zoomkit/error.hpp"
#include "zoomkit/exchange.hpp"

using namespace zoomkit;
using zktest::fs::path;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

AttentionBundle small_identity_bundle() {
  // L=2, H=2, T=4, N=2 with uniform rows of mass 1.
  AttentionBundle b;
  b.manifest.model_id = "tiny";
  b.manifest.num_layers = 2;
  b.manifest.num_heads = 2;
  b.manifest.num_image_tokens = 4;
  b.manifest.patch_grid = 2;
  b.manifest.input_resolution = 8;
  b.manifest.image_width = 8;
  b.manifest.image_height = 8;
  b.ans_attn = Tensor({2, 2, 4}, std::vector<float>(16, 0.25f));
  sync_tensor_entries(b);
  return b;
}

void rewrite_manifest(const path& dir, const std::function<void(nlohmann::json&)>& edit) {
  nlohmann::json j;
  {
    std::ifstream in(dir / "manifest.json");
    in >> j;
  }
  edit(j);
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  out << j.dump(2);
}

}  // namespace

TEST_CASE("a 64-byte [2,2,4] ans_attn loads as L=2, H=2, T=4") {
  const path dir = zktest::fresh_dir("exchange_basic");
  write_bundle(dir, small_identity_bundle());
  CHECK(zktest::fs::file_size(dir / "ans_attn.bin") == 64);
  const AttentionBundle b = load_bundle(dir);
  CHECK(b.manifest.num_layers == 2);
  CHECK(b.manifest.num_heads == 2);
  CHECK(b.manifest.num_image_tokens == 4);
  CHECK(b.identity_connector());
  CHECK_FALSE(b.conn_attn.has_value());
}

TEST_CASE("tensor files are little-endian binary32") {
  const path dir = zktest::fresh_dir("exchange_le");
  AttentionBundle b = small_identity_bundle();
  b.ans_attn.data[0] = 1.0f;  // 0x3f800000
  b.ans_attn.data[1] = 0.0f;
  b.ans_attn.data[2] = 0.0f;
  b.ans_attn.data[3] = 0.0f;
  write_bundle(dir, b);
  const std::string bytes = zktest::read_file(dir / "ans_attn.bin");
  REQUIRE(bytes.size() == 64);
  CHECK(static_cast<unsigned char>(bytes[0]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[1]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[2]) == 0x80);
  CHECK(static_cast<unsigned char>(bytes[3]) == 0x3f);
}

TEST_CASE("truncated tensor file is a shape mismatch") {
  const path dir = zktest::fresh_dir("exchange_trunc");
  write_bundle(dir, small_identity_bundle());
  const std::string bytes = zktest::read_file(dir / "ans_attn.bin");
  std::ofstream(dir / "ans_attn.bin", std::ios::binary | std::ios::trunc).write(bytes.data(), 60);
  CHECK(code_of([&] { load_bundle(dir); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("load errors") {
  SUBCASE("missing manifest") {
    const path dir = zktest::fresh_dir("exchange_nomanifest");
    CHECK(code_of([&] { load_bundle(dir); }) == ErrorCode::kMissingManifest);
  }
  SUBCASE("missing ans_attn role") {
    const path dir = zktest::fresh_dir("exchange_norole");
    write_bundle(dir, small_identity_bundle());
    rewrite_manifest(dir, [](nlohmann::json& j) { j["tensors"] = nlohmann::json::array(); });
    CHECK(code_of([&] { load_bundle(dir); }) == ErrorCode::kMissingMandatoryRole);
  }
  SUBCASE("declared shape disagrees with L, H, T") {
    const path dir = zktest::fresh_dir("exchange_badshape");
    write_bundle(dir, small_identity_bundle());
    rewrite_manifest(dir, [](nlohmann::json& j) { j["tensors"][0]["shape"] = {4, 4}; });
    CHECK(code_of([&] { load_bundle(dir); }) == ErrorCode::kShapeMismatch);
  }
  SUBCASE("negative attention beyond tolerance") {
    const path dir = zktest::fresh_dir("exchange_negative");
    AttentionBundle b = small_identity_bundle();
    b.ans_attn.data[5] = -1e-3f;
    write_bundle(dir, small_identity_bundle());
    write_tensor_file(dir / "ans_attn.bin", b.ans_attn);
    CHECK(code_of([&] { load_bundle(dir); }) == ErrorCode::kNegativeAttention);
  }
  SUBCASE("tiny negative noise is tolerated") {
    const path dir = zktest::fresh_dir("exchange_noise");
    AttentionBundle b = small_identity_bundle();
    b.ans_attn.data[5] = -5e-7f;
    write_bundle(dir, small_identity_bundle());
    write_tensor_file(dir / "ans_attn.bin", b.ans_attn);
    CHECK_NOTHROW(load_bundle(dir));
  }
  SUBCASE("row mass above one") {
    AttentionBundle b = small_identity_bundle();
    b.ans_attn.data[0] = 0.3f;
    CHECK(code_of([&] { validate_bundle(b); }) == ErrorCode::kAttentionMassExceeded);
  }
  SUBCASE("unknown role") {
    const path dir = zktest::fresh_dir("exchange_unknownrole");
    write_bundle(dir, small_identity_bundle());
    rewrite_manifest(dir, [](nlohmann::json& j) { j["tensors"][0]["role"] = "logits"; });
    CHECK(code_of([&] { load_bundle(dir); }) == ErrorCode::kParseError);
  }
  SUBCASE("missing tensor file") {
    const path dir = zktest::fresh_dir("exchange_nofile");
    write_bundle(dir, small_identity_bundle());
    zktest::fs::remove(dir / "ans_attn.bin");
    CHECK(code_of([&] { load_bundle(dir); }) == ErrorCode::kIoFailure);
  }
}

TEST_CASE("gradients may be negative") {
  zktest::Rng rng(7);
  zktest::BundleDims d = zktest::random_dims(rng, 3);
  AttentionBundle b = zktest::random_bundle(rng, d, {true, true, false});
  b.ans_attn_grad->data[0] = -5.0f;
  CHECK_NOTHROW(validate_bundle(b));
}

TEST_CASE("randomized bundles round-trip bit-exactly and reload deterministically") {
  zktest::Rng rng(11);
  for (int i = 0; i < 25; ++i) {
    const auto dims = zktest::random_dims(rng, 4);
    const AttentionBundle b = zktest::random_bundle(rng, dims, {i % 2 == 0, i % 3 == 0, i % 5 == 0});
    const path dir = zktest::fresh_dir("exchange_rt_" + std::to_string(i));
    write_bundle(dir, b);
    const AttentionBundle again = load_bundle(dir);
    CHECK(again.bit_equal(b));
    CHECK(again.manifest == b.manifest);
    CHECK(load_bundle(dir).bit_equal(again));
  }
}

TEST_CASE("connector bundle requires conn_attn of shape [Lc, Hc, T, N^2]") {
  zktest::Rng rng(3);
  zktest::BundleDims d;
  d.layers = 2;
  d.heads = 1;
  d.connector_layers = 2;
  d.connector_heads = 2;
  d.tokens = 3;
  d.grid = 2;
  AttentionBundle b = zktest::random_bundle(rng, d);
  CHECK_NOTHROW(validate_bundle(b));
  b.conn_attn->shape = {2, 2, 4, 3};
  CHECK(code_of([&] { validate_bundle(b); }) == ErrorCode::kShapeMismatch);
}

TEST_CASE("manifest keys") {
  const path dir = zktest::fresh_dir("exchange_keys");
  write_bundle(dir, small_identity_bundle());
  nlohmann::json j;
  std::ifstream(dir / "manifest.json") >> j;
  for (const char* key : {"model_id", "L", "H", "Lc", "Hc", "T", "N", "input_resolution", "image_width",
                          "image_height", "question", "is_generic_instruction", "tensors"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  CHECK(j["tensors"][0]["role"] == "ans_attn");
  CHECK(j["tensors"][0]["path"] == "ans_attn.bin");
  CHECK(j["tensors"][0]["shape"] == nlohmann::json({2, 2, 4}));
}
