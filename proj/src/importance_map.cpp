// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/importance_map.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

namespace zoomkit {

ImportanceMap ImportanceMap::uniform(std::int64_t rows, std::int64_t cols, double width,
                                     double height, double origin_x, double origin_y) {
  ImportanceMap map;
  map.rows = rows;
  map.cols = cols;
  map.values.assign(static_cast<std::size_t>(rows * cols), 0.0);
  map.col_edges.resize(static_cast<std::size_t>(cols + 1));
  map.row_edges.resize(static_cast<std::size_t>(rows + 1));
  for (std::int64_t c = 0; c <= cols; ++c) {
    map.col_edges[c] = origin_x + width * static_cast<double>(c) / static_cast<double>(cols);
  }
  for (std::int64_t r = 0; r <= rows; ++r) {
    map.row_edges[r] = origin_y + height * static_cast<double>(r) / static_cast<double>(rows);
  }
  return map;
}

double ImportanceMap::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

double ImportanceMap::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

ImportanceMap ImportanceMap::translated(double dx, double dy) const {
  ImportanceMap out = *this;
  for (auto& e : out.col_edges) e += dx;
  for (auto& e : out.row_edges) e += dy;
  return out;
}

std::string map_to_json(const ImportanceMap& map) {
  nlohmann::ordered_json j;
  j["rows"] = map.rows;
  j["cols"] = map.cols;
  j["source"] = method_name(map.source);
  j["col_edges"] = map.col_edges;
  j["row_edges"] = map.row_edges;
  auto grid = nlohmann::ordered_json::array();
  for (std::int64_t r = 0; r < map.rows; ++r) {
    auto row = nlohmann::ordered_json::array();
    for (std::int64_t c = 0; c < map.cols; ++c) row.push_back(map.at(r, c));
    grid.push_back(std::move(row));
  }
  j["values"] = std::move(grid);
  return j.dump();
}

}  // namespace zoomkit
