// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "zoomkit/attention.hpp"
#include "zoomkit/error.hpp"

using namespace zoomkit;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

AttentionBundle identity_bundle(std::vector<float> st, std::int64_t grid) {
  const auto t = static_cast<std::int64_t>(st.size());
  AttentionBundle b;
  b.manifest.model_id = "m";
  b.manifest.num_layers = 1;
  b.manifest.num_heads = 1;
  b.manifest.num_image_tokens = t;
  b.manifest.patch_grid = grid;
  b.manifest.input_resolution = 4;
  b.manifest.image_width = 4 * grid;
  b.manifest.image_height = 4 * grid;
  b.ans_attn = Tensor({1, 1, t}, std::move(st));
  sync_tensor_entries(b);
  return b;
}

AttentionBundle as_generic(AttentionBundle b) {
  b.manifest.is_generic_instruction = true;
  return b;
}

}  // namespace

TEST_CASE("head_average") {
  SUBCASE("two heads") {
    const Tensor raw({1, 2, 2}, {1, 3, 2, 2});
    const Tensor avg = head_average(raw);
    CHECK(avg.shape == std::vector<std::int64_t>{1, 2});
    CHECK(avg.data == std::vector<float>{1.5f, 2.5f});
  }
  SUBCASE("single head drops the axis") {
    const Tensor raw({2, 1, 3}, {1, 2, 3, 4, 5, 6});
    const Tensor avg = head_average(raw);
    CHECK(avg.shape == std::vector<std::int64_t>{2, 3});
    CHECK(avg.data == raw.data);
  }
  SUBCASE("equal heads") {
    const Tensor raw({1, 3, 2}, {0.25f, 0.5f, 0.25f, 0.5f, 0.25f, 0.5f});
    CHECK(head_average(raw).data == std::vector<float>{0.25f, 0.5f});
  }
  SUBCASE("no heads") { CHECK(code_of([] { head_average(Tensor({1, 0, 2})); }) == ErrorCode::kEmptyHeadAxis); }
}

TEST_CASE("answer_to_image") {
  SUBCASE("identity connector with uniform attention") {
    const auto b = identity_bundle(std::vector<float>(9, 1.0f / 9.0f), 3);
    const auto map = answer_to_image(b, {0, 0, LayerMode::kSelected});
    CHECK(map.rows == 3);
    CHECK(map.cols == 3);
    for (double v : map.values) CHECK(v == doctest::Approx(1.0 / 9.0).epsilon(1e-7));
  }
  SUBCASE("hand matrix product through a connector") {
    AttentionBundle b;
    b.manifest.num_layers = 1;
    b.manifest.num_heads = 1;
    b.manifest.num_connector_layers = 1;
    b.manifest.num_connector_heads = 1;
    b.manifest.num_image_tokens = 2;
    b.manifest.patch_grid = 2;
    b.manifest.input_resolution = 2;
    b.manifest.image_width = 2;
    b.manifest.image_height = 2;
    b.ans_attn = Tensor({1, 1, 2}, {0.5f, 0.5f});
    b.conn_attn = Tensor({1, 1, 2, 4}, {1, 0, 0, 0, 0, 0, 0, 1});
    sync_tensor_entries(b);
    const auto map = answer_to_image(b, {0, 0, LayerMode::kSelected});
    CHECK(map.values == std::vector<double>{0.5, 0.0, 0.0, 0.5});
  }
  SUBCASE("single (m, k) averaged equals selected") {
    zktest::Rng rng(5);
    zktest::BundleDims d;
    d.layers = 1;
    d.heads = 3;
    d.connector_layers = 1;
    d.connector_heads = 2;
    d.tokens = 3;
    d.grid = 2;
    const auto b = zktest::random_bundle(rng, d);
    CHECK(answer_to_image(b, {0, 0, LayerMode::kAveraged}).values ==
          answer_to_image(b, {0, 0, LayerMode::kSelected}).values);
  }
  SUBCASE("identity connector needs T = N^2") {
    const auto b = identity_bundle({0.5f, 0.5f}, 2);
    CHECK(code_of([&] { answer_to_image(b, {}); }) == ErrorCode::kTokenGridMismatch);
  }
  SUBCASE("layer bounds") {
    const auto b = identity_bundle({0.25f, 0.25f, 0.25f, 0.25f}, 2);
    CHECK(code_of([&] { answer_to_image(b, {1, 0, LayerMode::kSelected}); }) == ErrorCode::kLayerOutOfRange);
    CHECK(code_of([&] { answer_to_image(b, {-1, 0, LayerMode::kSelected}); }) == ErrorCode::kLayerOutOfRange);
    // k is ignored for identity connectors.
    CHECK(code_of([&] { answer_to_image(b, {0, 5, LayerMode::kSelected}); }) == ErrorCode::kOk);
  }
  SUBCASE("map geometry covers the image") {
    const auto b = identity_bundle(std::vector<float>(4, 0.25f), 2);
    const auto map = answer_to_image(b, {});
    CHECK(map.col_edges == std::vector<double>{0, 4, 8});
    CHECK(map.row_edges == std::vector<double>{0, 4, 8});
    CHECK(map.source == MapMethod::kRawAnswerToImage);
  }
}

TEST_CASE("answer_to_image and layer averages match the loop oracle") {
  zktest::Rng rng(101);
  for (int i = 0; i < 60; ++i) {
    const auto d = zktest::random_dims(rng, 4);
    const auto b = zktest::random_bundle(rng, d, {true, false, false});
    for (std::int64_t m = 0; m < d.layers; ++m) {
      for (std::int64_t k = 0; k < std::max<std::int64_t>(d.connector_layers, 1); ++k) {
        const auto got = answer_to_image(b, {m, k, LayerMode::kSelected}).values;
        const auto want = zktest::oracle::answer_to_image(b, m, k, false);
        for (std::size_t p = 0; p < got.size(); ++p) CHECK(std::abs(got[p] - want[p]) <= 1e-6);
        const auto gg = grad_weighted_attention(b, {m, k, LayerMode::kSelected}).values;
        const auto gw = zktest::oracle::answer_to_image(b, m, k, true);
        for (std::size_t p = 0; p < gg.size(); ++p) CHECK(std::abs(gg[p] - gw[p]) <= 1e-6);
      }
    }
    const auto avg = layer_average(b, MapMethod::kRawAnswerToImage).values;
    const auto want = zktest::oracle::layer_average(b, false);
    for (std::size_t p = 0; p < avg.size(); ++p) CHECK(std::abs(avg[p] - want[p]) <= 1e-6);
  }
}

TEST_CASE("layer_average") {
  SUBCASE("two layers with maps M and 3M average to 2M") {
    AttentionBundle b = identity_bundle({0.1f, 0.2f, 0.0f, 0.05f}, 2);
    b.manifest.num_layers = 2;
    b.ans_attn = Tensor({2, 1, 4}, {0.1f, 0.2f, 0.0f, 0.05f, 0.3f, 0.6f, 0.0f, 0.15f});
    sync_tensor_entries(b);
    const auto avg = layer_average(b, MapMethod::kRawAnswerToImage).values;
    const double expect[] = {0.2, 0.4, 0.0, 0.1};
    for (int i = 0; i < 4; ++i) CHECK(avg[i] == doctest::Approx(expect[i]).epsilon(1e-6));
  }
  SUBCASE("L=2, Lc=2 equals the mean of its four (m, k) maps") {
    zktest::Rng rng(9);
    zktest::BundleDims d;
    d.layers = 2;
    d.heads = 2;
    d.connector_layers = 2;
    d.connector_heads = 3;
    d.tokens = 3;
    d.grid = 3;
    const auto b = zktest::random_bundle(rng, d);
    std::vector<double> mean(9, 0.0);
    for (int m = 0; m < 2; ++m) {
      for (int k = 0; k < 2; ++k) {
        const auto v = answer_to_image(b, {m, k, LayerMode::kSelected}).values;
        for (int p = 0; p < 9; ++p) mean[p] += v[p] / 4.0;
      }
    }
    const auto avg = layer_average(b, MapMethod::kRawAnswerToImage).values;
    for (int p = 0; p < 9; ++p) CHECK(avg[p] == doctest::Approx(mean[p]).epsilon(1e-12));
  }
  SUBCASE("rel_att averaging averages the ratios") {
    zktest::Rng rng(10);
    zktest::BundleDims d;
    d.layers = 3;
    d.heads = 2;
    d.tokens = 4;
    d.grid = 2;
    const auto q = zktest::random_bundle(rng, d);
    const auto g = zktest::random_bundle(rng, d, {false, false, true});
    const auto got = relative_attention(q, g, {0, 0, LayerMode::kAveraged}).values;
    const auto want = zktest::oracle::layer_average(q, false, &g);
    for (int p = 0; p < 4; ++p) CHECK(got[p] == doctest::Approx(want[p]).epsilon(1e-9));
  }
  SUBCASE("rel_att averaging needs the generic bundle") {
    const auto b = identity_bundle(std::vector<float>(4, 0.25f), 2);
    CHECK(code_of([&] { layer_average(b, MapMethod::kRelAtt); }) == ErrorCode::kMissingGenericBundle);
  }
}

TEST_CASE("relative_attention") {
  SUBCASE("identical maps give ones") {
    zktest::Rng rng(1);
    const auto d = zktest::random_dims(rng, 4);
    const auto b = zktest::random_bundle(rng, d);
    const auto map = relative_attention(b, as_generic(b), {0, 0, LayerMode::kSelected});
    for (double v : map.values) CHECK(v == 1.0);
  }
  SUBCASE("unit denominator leaves the numerator") {
    const auto q = identity_bundle({0.5f, 0.0f, 0.0f, 0.0f}, 2);
    const auto g = as_generic(identity_bundle({0.25f, 0.25f, 0.25f, 0.25f}, 2));
    const auto map = relative_attention(q, g, {});
    CHECK(map.values == std::vector<double>{2.0, 0.0, 0.0, 0.0});
  }
  SUBCASE("zero denominator is floored at eps") {
    const auto q = identity_bundle({0.75f, 0.25f, 0.0f, 0.0f}, 2);
    const auto g = as_generic(identity_bundle({0.0f, 0.25f, 0.5f, 0.25f}, 2));
    const auto map = relative_attention(q, g, {}, 1e-8);
    CHECK(map.values[0] == doctest::Approx(0.75e8));
    CHECK(std::isfinite(map.values[0]));
    CHECK(map.values[1] == 1.0);
    CHECK(map.values[2] == 0.0);
  }
  SUBCASE("errors") {
    const auto q = identity_bundle(std::vector<float>(4, 0.25f), 2);
    CHECK(code_of([&] { relative_attention(q, q, {}); }) == ErrorCode::kGenericFlagMissing);
    const auto other = as_generic(identity_bundle(std::vector<float>(9, 0.1f), 3));
    CHECK(code_of([&] { relative_attention(q, other, {}); }) == ErrorCode::kGeometryMismatch);
  }
}

TEST_CASE("grad_weighted_attention") {
  SUBCASE("negative gradients zero the map") {
    zktest::Rng rng(2);
    const auto d = zktest::random_dims(rng, 4);
    auto b = zktest::random_bundle(rng, d, {true, false, false});
    for (auto& v : b.ans_attn_grad->data) v = -std::abs(v);
    if (b.conn_attn_grad) {
      for (auto& v : b.conn_attn_grad->data) v = -std::abs(v);
    }
    for (double v : grad_weighted_attention(b, {}).values) CHECK(v == 0.0);
  }
  SUBCASE("unit gradients reproduce the raw map") {
    zktest::Rng rng(3);
    zktest::BundleDims d;
    d.layers = 2;
    d.heads = 2;
    d.connector_layers = 2;
    d.connector_heads = 2;
    d.tokens = 3;
    d.grid = 2;
    auto b = zktest::random_bundle(rng, d, {true, false, false});
    std::fill(b.ans_attn_grad->data.begin(), b.ans_attn_grad->data.end(), 1.0f);
    std::fill(b.conn_attn_grad->data.begin(), b.conn_attn_grad->data.end(), 1.0f);
    CHECK(grad_weighted_attention(b, {1, 1, LayerMode::kSelected}).values ==
          answer_to_image(b, {1, 1, LayerMode::kSelected}).values);
  }
  SUBCASE("hand example with T=4, N=2") {
    auto b = identity_bundle({0.4f, 0.6f, 0.0f, 0.0f}, 2);
    b.ans_attn_grad = Tensor({1, 1, 4}, {-1.0f, 2.0f, 0.0f, 0.0f});
    sync_tensor_entries(b);
    const auto map = grad_weighted_attention(b, {});
    CHECK(map.values[0] == 0.0);
    CHECK(map.values[1] == doctest::Approx(1.2).epsilon(1e-7));
    CHECK(map.values[2] == 0.0);
    CHECK(map.values[3] == 0.0);
  }
  SUBCASE("missing gradients") {
    const auto b = identity_bundle(std::vector<float>(4, 0.25f), 2);
    CHECK(code_of([&] { grad_weighted_attention(b, {}); }) == ErrorCode::kMissingGradients);
  }
}

TEST_CASE("properties") {
  zktest::Rng rng(77);
  for (int i = 0; i < 30; ++i) {
    const auto d = zktest::random_dims(rng, 4);
    auto b = zktest::random_bundle(rng, d, {true, false, false});
    const auto base = answer_to_image(b, {}).values;
    {  // scale covariance
      auto scaled = b;
      for (auto& v : scaled.ans_attn.data) v *= 0.5f;
      const auto half = answer_to_image(scaled, {}).values;
      for (std::size_t p = 0; p < base.size(); ++p) CHECK(half[p] == doctest::Approx(base[p] * 0.5).epsilon(1e-6));
    }
    {  // a row-stochastic connector preserves mass
      if (b.conn_attn) {
        const std::int64_t patches = d.grid * d.grid;
        for (std::size_t row = 0; row * patches < b.conn_attn->data.size(); ++row) {
          const auto r = zktest::random_row(rng, patches, 1.0);
          std::copy(r.begin(), r.end(), b.conn_attn->data.begin() + static_cast<std::ptrdiff_t>(row * patches));
        }
      }
      double st = 0.0;
      for (std::int64_t t = 0; t < d.tokens; ++t) {
        for (std::int64_t h = 0; h < d.heads; ++h) st += b.ans_attn.data[static_cast<std::size_t>(h * d.tokens + t)];
      }
      st /= static_cast<double>(d.heads);
      double total = 0.0;
      for (double v : answer_to_image(b, {}).values) total += v;
      CHECK(total == doctest::Approx(st).epsilon(1e-5));
    }
    {  // grad maps are finite and nonnegative
      for (double v : grad_weighted_attention(b, {}).values) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
      }
    }
  }
}

TEST_CASE("default layers per model family") {
  CHECK(default_layer_choice(ModelFamily::kLlava15) == LayerChoice{14, 0, LayerMode::kSelected});
  CHECK(default_layer_choice(ModelFamily::kInstructBlip) == LayerChoice{15, 2, LayerMode::kSelected});
  CHECK(default_layer_choice_for("llava-hf/llava-1.5-7b-hf")->m == 14);
  CHECK(default_layer_choice_for("Salesforce/instructblip-vicuna-7b")->k == 2);
  CHECK_FALSE(default_layer_choice_for("qwen-vl").has_value());
}
