// Copyright 2026 The zoomkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "zoomkit/records.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "zoomkit/error.hpp"

namespace zoomkit {

using json = nlohmann::ordered_json;

namespace {

std::string id_string(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  fail(ErrorCode::kParseError, "record id must be a string or integer");
}

json bbox_json(const BBox& b) { return {{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}}; }

BBox bbox_from(const json& j) {
  // [x, y, w, h] is accepted as well as the object form.
  if (j.is_array()) {
    if (j.size() != 4) fail(ErrorCode::kParseError, "bbox array must have 4 entries");
    auto v = [&](std::size_t i) { return static_cast<std::int64_t>(std::llround(j[i].get<double>())); };
    return {v(0), v(1), v(2), v(3)};
  }
  auto v = [&](const char* k) { return static_cast<std::int64_t>(std::llround(j.at(k).get<double>())); };
  return {v("x"), v("y"), v("w"), v("h")};
}

}  // namespace

std::string record_to_json_line(const EvalRecord& r) {
  json j;
  j["question_id"] = r.question_id;
  j["image_id"] = r.image_id;
  j["question"] = r.question;
  j["gt_answers"] = r.gt_answers;
  if (r.gt_bbox) j["gt_bbox"] = bbox_json(*r.gt_bbox);
  if (r.prediction) j["prediction"] = *r.prediction;
  if (r.prediction_cropped) j["prediction_cropped"] = *r.prediction_cropped;
  if (r.partition) j["partition"] = partition_name(*r.partition);
  if (!r.scores.empty()) {
    json s = json::object();
    for (const auto& [k, v] : r.scores) s[k] = v;
    j["score"] = std::move(s);
  }
  if (r.crop) {
    const auto& c = *r.crop;
    json cj = bbox_json(c.window);
    cj["method"] = method_name(c.method);
    cj["layer"] = {{"m", c.layer.m}, {"k", c.layer.k}, {"mode", layer_mode_name(c.layer.mode)}};
    cj["resize_to"] = c.resize_to;
    j["crop"] = std::move(cj);
  }
  return j.dump(-1, ' ', false, json::error_handler_t::strict);
}

EvalRecord record_from_json_line(const std::string& line) {
  EvalRecord r;
  try {
    const json j = json::parse(line);
    r.question_id = id_string(j.at("question_id"));
    r.image_id = id_string(j.at("image_id"));
    r.question = j.value("question", std::string());
    if (j.contains("gt_answers")) {
      const auto& a = j.at("gt_answers");
      if (a.is_string()) {
        r.gt_answers.push_back(a.get<std::string>());
      } else {
        r.gt_answers = a.get<std::vector<std::string>>();
      }
    }
    if (j.contains("gt_bbox") && !j["gt_bbox"].is_null()) r.gt_bbox = bbox_from(j["gt_bbox"]);
    if (j.contains("prediction") && !j["prediction"].is_null()) {
      r.prediction = j["prediction"].get<std::string>();
    }
    if (j.contains("prediction_cropped") && !j["prediction_cropped"].is_null()) {
      r.prediction_cropped = j["prediction_cropped"].get<std::string>();
    }
    if (j.contains("partition") && !j["partition"].is_null()) {
      const auto name = j["partition"].get<std::string>();
      r.partition = parse_partition(name);
      if (!r.partition) fail(ErrorCode::kParseError, "unknown partition '" + name + "'");
    }
    if (j.contains("score") && !j["score"].is_null()) {
      const auto& s = j["score"];
      if (s.is_number()) {
        r.scores["original"] = s.get<double>();
      } else {
        for (const auto& [k, v] : s.items()) r.scores[k] = v.get<double>();
      }
    }
    if (j.contains("crop") && !j["crop"].is_null()) {
      const auto& c = j["crop"];
      CropDirective d;
      d.window = bbox_from(c);
      const auto name = c.at("method").get<std::string>();
      auto method = parse_method(name);
      if (!method) fail(ErrorCode::kParseError, "unknown crop method '" + name + "'");
      d.method = *method;
      if (c.contains("layer")) {
        const auto& l = c["layer"];
        d.layer.m = l.value("m", std::int64_t{0});
        d.layer.k = l.value("k", std::int64_t{0});
        auto mode = parse_layer_mode(l.value("mode", std::string("selected")));
        if (!mode) fail(ErrorCode::kParseError, "unknown layer mode");
        d.layer.mode = *mode;
      }
      d.resize_to = c.value("resize_to", std::int64_t{0});
      r.crop = d;
    }
  } catch (const json::exception& ex) {
    fail(ErrorCode::kParseError, std::string("record: ") + ex.what());
  }
  return r;
}

void write_records(std::span<const EvalRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot open " + path.string() + " for writing");
  for (const auto& r : records) out << record_to_json_line(r) << '\n';
  out.flush();
  if (!out) fail(ErrorCode::kIoFailure, "write failed for " + path.string());
}

std::vector<EvalRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json_line(line));
    } catch (const Error& e) {
      fail(e.code(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace zoomkit
