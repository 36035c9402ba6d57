// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <fstream>
#include <sstream>

#include "zoomkit/attention.hpp"

namespace zktest {

using zoomkit::AttentionBundle;
using zoomkit::Tensor;

namespace {

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Rows of `row_len` with independent random mass.
Tensor attention_tensor(Rng& rng, std::vector<std::int64_t> shape, std::int64_t row_len) {
  Tensor t(std::move(shape));
  for (std::size_t base = 0; base < t.data.size(); base += static_cast<std::size_t>(row_len)) {
    const auto row = random_row(rng, row_len, uniform_real(rng, 0.5, 1.0));
    std::copy(row.begin(), row.end(), t.data.begin() + static_cast<std::ptrdiff_t>(base));
  }
  return t;
}

Tensor signed_tensor(Rng& rng, std::vector<std::int64_t> shape) {
  Tensor t(std::move(shape));
  for (auto& v : t.data) v = static_cast<float>(uniform_real(rng, -1.0, 1.0));
  return t;
}

zoomkit::RunManifest manifest_for(const BundleDims& d, bool generic) {
  zoomkit::RunManifest m;
  m.model_id = d.connector_layers > 0 ? "synthetic-instructblip" : "synthetic-llava";
  m.num_layers = d.layers;
  m.num_heads = d.heads;
  m.num_connector_layers = d.connector_layers;
  m.num_connector_heads = d.connector_heads;
  m.num_image_tokens = d.tokens;
  m.patch_grid = d.grid;
  m.input_resolution = d.input_res;
  m.image_width = d.image_w;
  m.image_height = d.image_h;
  m.is_generic_instruction = generic;
  m.question = generic ? std::string(zoomkit::kGenericInstruction) : "what is in the picture?";
  return m;
}

void write_png(const fs::path& path, const zoomkit::Image& image) { zoomkit::write_image(path, image); }

}  // namespace

BundleDims random_dims(Rng& rng, std::int64_t max_dim) {
  BundleDims d;
  d.layers = uniform_int(rng, 1, max_dim);
  d.heads = uniform_int(rng, 1, max_dim);
  d.grid = uniform_int(rng, 1, max_dim);
  if (uniform_int(rng, 0, 1) == 0) {
    d.connector_layers = 0;
    d.connector_heads = 0;
    d.tokens = d.grid * d.grid;
  } else {
    d.connector_layers = uniform_int(rng, 1, max_dim);
    d.connector_heads = uniform_int(rng, 1, max_dim);
    d.tokens = uniform_int(rng, 1, max_dim);
  }
  d.image_w = d.grid * uniform_int(rng, 2, 8);
  d.image_h = d.grid * uniform_int(rng, 2, 8);
  d.input_res = uniform_int(rng, 1, std::min(d.image_w, d.image_h));
  return d;
}

std::vector<float> random_row(Rng& rng, std::int64_t n, double mass) {
  std::vector<double> raw(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& v : raw) {
    v = uniform_real(rng, 0.0, 1.0);
    total += v;
  }
  std::vector<float> row(raw.size());
  // Rounding to float keeps the row within the mass tolerance.
  for (std::size_t i = 0; i < raw.size(); ++i) row[i] = static_cast<float>(raw[i] / total * mass);
  return row;
}

AttentionBundle random_bundle(Rng& rng, const BundleDims& d, const BundleOptions& opts) {
  AttentionBundle b;
  b.manifest = manifest_for(d, opts.generic);
  b.ans_attn = attention_tensor(rng, {d.layers, d.heads, d.tokens}, d.tokens);
  if (opts.gradients) b.ans_attn_grad = signed_tensor(rng, {d.layers, d.heads, d.tokens});
  if (d.connector_layers > 0) {
    const std::int64_t patches = d.grid * d.grid;
    b.conn_attn = attention_tensor(rng, {d.connector_layers, d.connector_heads, d.tokens, patches}, patches);
    if (opts.gradients) {
      b.conn_attn_grad = signed_tensor(rng, {d.connector_layers, d.connector_heads, d.tokens, patches});
    }
  }
  if (opts.input_grad) b.input_grad = signed_tensor(rng, {3, d.image_h, d.image_w});
  zoomkit::sync_tensor_entries(b);
  return b;
}

AttentionBundle bundle_from_weights(const std::vector<float>& weights, std::int64_t grid, std::int64_t layers,
                                    std::int64_t image_w, std::int64_t image_h, std::int64_t input_res,
                                    bool generic) {
  BundleDims d;
  d.layers = layers;
  d.heads = 1;
  d.grid = grid;
  d.tokens = grid * grid;
  d.image_w = image_w;
  d.image_h = image_h;
  d.input_res = input_res;
  AttentionBundle b;
  b.manifest = manifest_for(d, generic);
  b.ans_attn = Tensor({layers, 1, d.tokens});
  for (std::int64_t l = 0; l < layers; ++l) {
    std::copy(weights.begin(), weights.end(), b.ans_attn.data.begin() + l * d.tokens);
  }
  zoomkit::sync_tensor_entries(b);
  return b;
}

zoomkit::ImportanceMap random_map(Rng& rng, std::int64_t rows, std::int64_t cols, std::int64_t width,
                                  std::int64_t height, bool dyadic) {
  auto map = zoomkit::ImportanceMap::uniform(rows, cols, static_cast<double>(width), static_cast<double>(height));
  for (auto& v : map.values) {
    v = dyadic ? static_cast<double>(uniform_int(rng, 0, 63)) / 16.0 : uniform_real(rng, 0.0, 1.0);
  }
  return map;
}

zoomkit::Image constant_image(std::int64_t w, std::int64_t h, std::uint8_t value) {
  zoomkit::Image img(w, h);
  std::fill(img.rgb.begin(), img.rgb.end(), value);
  return img;
}

zoomkit::Image step_edge_image(std::int64_t w, std::int64_t h, std::int64_t step_col) {
  zoomkit::Image img(w, h);
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = x < step_col ? 0 : 255;
    }
  }
  return img;
}

zoomkit::Image random_image(Rng& rng, std::int64_t w, std::int64_t h) {
  zoomkit::Image img(w, h);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(uniform_int(rng, 0, 255));
  return img;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "zoomkit_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Corpus write_corpus(const fs::path& root, int pairs, std::uint64_t seed) {
  Rng rng(seed);
  Corpus c;
  c.root = root;
  c.bundles = root / "bundles";
  c.images = root / "images";
  c.records = root / "records.jsonl";
  fs::create_directories(c.bundles / "generic");
  fs::create_directories(c.images);

  for (int i = 0; i < pairs; ++i) {
    BundleDims d;
    d.grid = uniform_int(rng, 4, 6);
    const std::int64_t cell_w = uniform_int(rng, 10, 16);
    const std::int64_t cell_h = uniform_int(rng, 10, 16);
    d.image_w = d.grid * cell_w;
    d.image_h = d.grid * cell_h;
    d.input_res = std::min(cell_w, cell_h);
    d.layers = 2;
    d.heads = 2;
    d.tokens = d.grid * d.grid;
    if (i % 2 == 1) {
      d.connector_layers = 2;
      d.connector_heads = 2;
    }
    const std::int64_t patches = d.grid * d.grid;
    const std::int64_t hot = uniform_int(rng, 0, patches - 1);

    auto make = [&](bool generic) {
      AttentionBundle b = random_bundle(rng, d, {true, true, generic});
      // Answer rows: mostly uniform, with a peak on `hot` for the question.
      for (std::size_t base = 0; base < b.ans_attn.data.size(); base += static_cast<std::size_t>(d.tokens)) {
        for (std::int64_t t = 0; t < d.tokens; ++t) {
          const double noise = uniform_real(rng, 0.9, 1.1) * 0.3 / static_cast<double>(d.tokens);
          const double peak = (!generic && t == hot) ? 0.6 : 0.0;
          b.ans_attn.data[base + static_cast<std::size_t>(t)] = static_cast<float>(noise + peak);
        }
      }
      // Connector rows map token t mostly onto patch t.
      if (b.conn_attn) {
        for (std::size_t row = 0; row * patches < b.conn_attn->data.size(); ++row) {
          const auto t = static_cast<std::int64_t>(row) % d.tokens;
          for (std::int64_t p = 0; p < patches; ++p) {
            b.conn_attn->data[row * patches + static_cast<std::size_t>(p)] =
                static_cast<float>((p == t ? 0.8 : 0.0) + 0.15 / static_cast<double>(patches));
          }
        }
      }
      zoomkit::sync_tensor_entries(b);
      return b;
    };

    zoomkit::EvalRecord r;
    r.question_id = "q" + std::to_string(1000 + i);
    r.image_id = "img" + std::to_string(i);
    r.question = "what is in the picture?";
    r.gt_answers = {"sign", "sign", "a sign", "board", "sign", "sign", "text", "sign", "sign", "sign"};
    r.gt_bbox = zoomkit::BBox{(hot % d.grid) * cell_w, (hot / d.grid) * cell_h, cell_w, cell_h};
    r.prediction = i % 3 == 0 ? "board" : (i % 3 == 1 ? "Sign." : "tree");

    zoomkit::write_bundle(c.bundles / r.question_id, make(false));
    zoomkit::write_bundle(c.bundles / "generic" / r.image_id, make(true));
    write_png(c.images / (r.image_id + ".png"), random_image(rng, d.image_w, d.image_h));
    c.entries.push_back(r);
    c.hot_patch.push_back(hot);
  }
  zoomkit::write_records(c.entries, c.records);
  return c;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace zktest
